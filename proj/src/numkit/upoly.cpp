#include "lauricella/numkit/upoly.hpp"

#include <stdexcept>

namespace lauricella {

UPoly UPoly::t_power(int k) {
    UPoly p;
    p.c.assign(static_cast<size_t>(k) + 1, QG());
    p.c.back() = QG(1);
    return p;
}

void UPoly::trim() {
    while (!c.empty() && c.back().is_zero()) c.pop_back();
}

UPoly& UPoly::operator+=(const UPoly& o) {
    if (o.c.size() > c.size()) c.resize(o.c.size());
    for (size_t i = 0; i < o.c.size(); ++i) c[i] += o.c[i];
    trim();
    return *this;
}

UPoly& UPoly::operator-=(const UPoly& o) {
    if (o.c.size() > c.size()) c.resize(o.c.size());
    for (size_t i = 0; i < o.c.size(); ++i) c[i] -= o.c[i];
    trim();
    return *this;
}

UPoly& UPoly::operator*=(const QG& s) {
    if (s.is_zero()) {
        c.clear();
        return *this;
    }
    for (auto& x : c) x *= s;
    return *this;
}

QG UPoly::eval(const QG& t) const {
    QG r;
    for (size_t i = c.size(); i-- > 0;) r = r * t + c[i];
    return r;
}

Complex UPoly::eval(const Complex& t) const {
    mpfr_prec_t p = t.prec();
    Complex r(p);
    for (size_t i = c.size(); i-- > 0;) {
        r *= t;
        r += c[i].to_complex(p);
    }
    return r;
}

UPoly UPoly::derivative() const {
    UPoly r;
    for (size_t i = 1; i < c.size(); ++i) r.c.push_back(c[i] * QG(Q(static_cast<long>(i))));
    r.trim();
    return r;
}

UPoly UPoly::shift(const QG& a) const {
    // Horner-style Taylor shift.
    std::vector<QG> r = c;
    size_t n = r.size();
    if (a.is_zero() || n < 2) return UPoly(r);
    for (size_t i = 0; i + 1 < n; ++i)
        for (size_t j = n - 1; j > i; --j) r[j - 1] += a * r[j];
    return UPoly(std::move(r));
}

QG UPoly::make_monic() {
    if (c.empty()) return QG(1);
    QG lc = c.back();
    if (lc.is_one()) return lc;
    QG inv = QG(1) / lc;
    for (auto& x : c) x *= inv;
    return lc;
}

int UPoly::zero_order() const {
    int k = 0;
    while (k < static_cast<int>(c.size()) && c[static_cast<size_t>(k)].is_zero()) ++k;
    return k;
}

UPoly operator+(const UPoly& a, const UPoly& b) { UPoly r = a; r += b; return r; }
UPoly operator-(const UPoly& a, const UPoly& b) { UPoly r = a; r -= b; return r; }
UPoly operator*(const UPoly& a, const QG& s) { UPoly r = a; r *= s; return r; }

UPoly operator*(const UPoly& a, const UPoly& b) {
    if (a.is_zero() || b.is_zero()) return UPoly();
    std::vector<QG> r(a.c.size() + b.c.size() - 1);
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i].is_zero()) continue;
        for (size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
    }
    return UPoly(std::move(r));
}

std::pair<UPoly, UPoly> divmod(const UPoly& a, const UPoly& b) {
    if (b.is_zero()) throw std::domain_error("univariate division by zero");
    UPoly r = a;
    if (a.deg() < b.deg()) return {UPoly(), r};
    std::vector<QG> q(static_cast<size_t>(a.deg() - b.deg() + 1));
    QG inv = QG(1) / b.lead();
    while (!r.is_zero() && r.deg() >= b.deg()) {
        int s = r.deg() - b.deg();
        QG f = r.lead() * inv;
        q[static_cast<size_t>(s)] = f;
        for (int i = 0; i <= b.deg(); ++i) r.c[static_cast<size_t>(i + s)] -= f * b.c[static_cast<size_t>(i)];
        r.c.pop_back();
        r.trim();
    }
    return {UPoly(std::move(q)), r};
}

UPoly gcd(UPoly a, UPoly b) {
    while (!b.is_zero()) {
        UPoly r = divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    a.make_monic();
    return a;
}

UPoly exact_div(const UPoly& a, const UPoly& b) {
    auto [q, r] = divmod(a, b);
    if (!r.is_zero()) throw std::domain_error("inexact univariate division");
    return q;
}

std::vector<std::pair<UPoly, int>> squarefree(const UPoly& p) {
    std::vector<std::pair<UPoly, int>> out;
    if (p.deg() < 1) return out;
    UPoly f = p;
    f.make_monic();
    UPoly d = f.derivative();
    UPoly a = gcd(f, d);
    UPoly b = exact_div(f, a);
    UPoly c = exact_div(d, a);
    UPoly e = c - b.derivative();
    int i = 1;
    while (b.deg() >= 1) {
        UPoly g = gcd(b, e);
        if (g.deg() >= 1) out.emplace_back(g, i);
        b = exact_div(b, g);
        c = exact_div(e, g);
        e = c - b.derivative();
        ++i;
    }
    return out;
}

URatFun::URatFun(UPoly n, UPoly d) : num(std::move(n)), den(std::move(d)) {
    if (den.is_zero()) throw std::domain_error("univariate rational function with zero denominator");
    if (num.is_zero()) {
        den = UPoly(QG(1));
        return;
    }
    UPoly g = gcd(num, den);
    if (g.deg() > 0) {
        num = exact_div(num, g);
        den = exact_div(den, g);
    }
    QG lc = den.make_monic();
    if (!lc.is_one()) num *= QG(1) / lc;
}

URatFun operator+(const URatFun& a, const URatFun& b) {
    if (a.den == b.den) return URatFun(a.num + b.num, a.den);
    UPoly g = gcd(a.den, b.den);
    UPoly bd = exact_div(b.den, g), ad = exact_div(a.den, g);
    return URatFun(a.num * bd + b.num * ad, a.den * bd);
}

URatFun operator*(const URatFun& a, const QG& s) { return URatFun(a.num * s, a.den); }

UPoly line_restrict(const MPoly& p, const std::vector<int>& var_index, const std::vector<QG>& anchor,
                    const std::vector<QG>& kappa) {
    size_t n = var_index.size();
    std::vector<std::vector<UPoly>> pw(n);
    for (size_t i = 0; i < n; ++i) {
        UPoly lin(std::vector<QG>{anchor[i], kappa[i]});
        pw[i].push_back(UPoly(QG(1)));
        int dmax = std::max(p.degree(var_index[i]), 0);
        for (int k = 1; k <= dmax; ++k) pw[i].push_back(pw[i].back() * lin);
    }
    UPoly r;
    for (const auto& [e, c] : p.terms()) {
        UPoly term{QG(c)};
        for (int v = 0; v < kMaxVars; ++v) {
            if (!e[v]) continue;
            size_t slot = n;
            for (size_t i = 0; i < n; ++i)
                if (var_index[i] == v) slot = i;
            if (slot == n) throw std::logic_error("line_restrict: unsubstituted variable");
            term = term * pw[slot][e[v]];
        }
        r += term;
    }
    return r;
}

std::vector<Complex> to_hp(const UPoly& p, mpfr_prec_t bits) {
    std::vector<Complex> out;
    out.reserve(p.c.size());
    for (const auto& x : p.c) out.push_back(x.to_complex(bits));
    return out;
}

}  // namespace lauricella
