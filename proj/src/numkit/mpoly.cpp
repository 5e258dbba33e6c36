#include "lauricella/numkit/mpoly.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace lauricella {

namespace {

Exp zero_exp() {
    Exp e{};
    return e;
}

bool exp_divides(const Exp& b, const Exp& a) {
    for (int i = 0; i < kMaxVars; ++i)
        if (b[i] > a[i]) return false;
    return true;
}

Exp exp_add(const Exp& a, const Exp& b) {
    Exp r;
    for (int i = 0; i < kMaxVars; ++i) {
        int s = a[i] + b[i];
        if (s > 255) throw std::overflow_error("polynomial exponent overflow");
        r[i] = static_cast<std::uint8_t>(s);
    }
    return r;
}

Exp exp_sub(const Exp& a, const Exp& b) {
    Exp r;
    for (int i = 0; i < kMaxVars; ++i) r[i] = static_cast<std::uint8_t>(a[i] - b[i]);
    return r;
}

}  // namespace

MPoly::MPoly(const Q& c) {
    if (sgn(c) != 0) t_.emplace(zero_exp(), c);
}

MPoly MPoly::var(int i, int power) {
    Exp e = zero_exp();
    e[i] = static_cast<std::uint8_t>(power);
    return monomial(e, Q(1));
}

MPoly MPoly::monomial(const Exp& e, const Q& c) {
    MPoly p;
    if (sgn(c) != 0) p.t_.emplace(e, c);
    return p;
}

bool MPoly::is_const() const { return t_.empty() || (t_.size() == 1 && t_.begin()->first == zero_exp()); }

Q MPoly::const_value() const {
    auto it = t_.find(zero_exp());
    return it == t_.end() ? Q(0) : it->second;
}

int MPoly::degree(int v) const {
    int d = -1;
    for (const auto& [e, c] : t_) d = std::max(d, static_cast<int>(e[v]));
    return d;
}

int MPoly::total_degree() const {
    int d = -1;
    for (const auto& [e, c] : t_) {
        int s = 0;
        for (auto x : e) s += x;
        d = std::max(d, s);
    }
    return d;
}

bool MPoly::uses(int v) const {
    for (const auto& [e, c] : t_)
        if (e[v]) return true;
    return false;
}

std::uint32_t MPoly::var_mask() const {
    std::uint32_t m = 0;
    for (const auto& [e, c] : t_)
        for (int i = 0; i < kMaxVars; ++i)
            if (e[i]) m |= 1u << i;
    return m;
}

void MPoly::add_term(const Exp& e, const Q& c) {
    if (sgn(c) == 0) return;
    auto [it, inserted] = t_.emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (sgn(it->second) == 0) t_.erase(it);
    }
}

MPoly& MPoly::operator+=(const MPoly& o) {
    for (const auto& [e, c] : o.t_) add_term(e, c);
    return *this;
}

MPoly& MPoly::operator-=(const MPoly& o) {
    for (const auto& [e, c] : o.t_) add_term(e, -c);
    return *this;
}

MPoly& MPoly::operator*=(const MPoly& o) {
    *this = *this * o;
    return *this;
}

MPoly& MPoly::operator*=(const Q& c) {
    if (sgn(c) == 0) {
        t_.clear();
        return *this;
    }
    for (auto& [e, v] : t_) v *= c;
    return *this;
}

MPoly MPoly::derivative(int v) const {
    MPoly r;
    for (const auto& [e, c] : t_) {
        if (!e[v]) continue;
        Exp f = e;
        f[v]--;
        r.add_term(f, c * e[v]);
    }
    return r;
}

MPoly MPoly::subst(int v, const Q& value) const {
    MPoly r;
    std::vector<Q> pw{Q(1)};
    for (const auto& [e, c] : t_) {
        while (static_cast<int>(pw.size()) <= e[v]) pw.push_back(pw.back() * value);
        Exp f = e;
        f[v] = 0;
        r.add_term(f, c * pw[e[v]]);
    }
    return r;
}

std::vector<MPoly> MPoly::coeffs_in(int v) const {
    std::vector<MPoly> out(static_cast<size_t>(std::max(degree(v), 0) + 1));
    if (t_.empty()) return {};
    for (const auto& [e, c] : t_) {
        Exp f = e;
        f[v] = 0;
        out[e[v]].add_term(f, c);
    }
    return out;
}

MPoly MPoly::from_coeffs(int v, const std::vector<MPoly>& c) {
    MPoly r;
    for (size_t k = 0; k < c.size(); ++k)
        for (const auto& [e, q] : c[k].t_) {
            Exp f = e;
            f[v] = static_cast<std::uint8_t>(f[v] + k);
            r.add_term(f, q);
        }
    return r;
}

Q MPoly::make_monic() {
    if (t_.empty()) return Q(1);
    Q lc = t_.begin()->second;
    if (lc == 1) return lc;
    Q inv = 1 / lc;
    for (auto& [e, c] : t_) c *= inv;
    return lc;
}

std::string MPoly::to_string(const std::vector<std::string>& names) const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : t_) {
        bool is_one_mono = e == zero_exp();
        Q a = abs(c);
        if (first)
            os << (sgn(c) < 0 ? "-" : "");
        else
            os << (sgn(c) < 0 ? " - " : " + ");
        first = false;
        bool need_star = false;
        if (a != 1 || is_one_mono) {
            os << a.get_str();
            need_star = true;
        }
        for (int i = 0; i < kMaxVars; ++i) {
            if (!e[i]) continue;
            if (need_star) os << "*";
            os << (i < static_cast<int>(names.size()) ? names[i] : "v" + std::to_string(i));
            if (e[i] > 1) os << "^" << static_cast<int>(e[i]);
            need_star = true;
        }
    }
    return os.str();
}

MPoly operator+(const MPoly& a, const MPoly& b) { MPoly r = a; r += b; return r; }
MPoly operator-(const MPoly& a, const MPoly& b) { MPoly r = a; r -= b; return r; }
MPoly operator-(const MPoly& a) { MPoly r = a; r *= Q(-1); return r; }

MPoly operator*(const MPoly& a, const MPoly& b) {
    MPoly r;
    if (a.is_zero() || b.is_zero()) return r;
    MPoly::Terms acc;
    Q t;
    for (const auto& [ea, ca] : a.terms())
        for (const auto& [eb, cb] : b.terms()) {
            mpq_mul(t.get_mpq_t(), ca.get_mpq_t(), cb.get_mpq_t());
            auto [it, fresh] = acc.try_emplace(exp_add(ea, eb));
            if (fresh) mpq_swap(it->second.get_mpq_t(), t.get_mpq_t());
            else mpq_add(it->second.get_mpq_t(), it->second.get_mpq_t(), t.get_mpq_t());
        }
    for (const auto& [e, c] : acc)
        if (sgn(c) != 0) r.add_term(e, c);
    return r;
}

MPoly operator*(const MPoly& a, const Q& c) { MPoly r = a; r *= c; return r; }

MPoly pow(const MPoly& a, int e) {
    MPoly r(Q(1)), b = a;
    while (e > 0) {
        if (e & 1) r *= b;
        e >>= 1;
        if (e) b *= b;
    }
    return r;
}

bool divides(const MPoly& b, const MPoly& a, MPoly* quotient) {
    if (b.is_zero()) throw std::domain_error("polynomial division by zero");
    MPoly q, r = a;
    const Exp& lb = b.lead_exp();
    Q lbc_inv = 1 / b.lead_coef();
    while (!r.is_zero()) {
        const Exp& lr = r.lead_exp();
        if (!exp_divides(lb, lr)) return false;
        MPoly m = MPoly::monomial(exp_sub(lr, lb), r.lead_coef() * lbc_inv);
        q += m;
        r -= m * b;
    }
    if (quotient) *quotient = std::move(q);
    return true;
}

MPoly exact_div(const MPoly& a, const MPoly& b) {
    if (b.is_const()) return a * (1 / b.const_value());
    MPoly q;
    if (!divides(b, a, &q)) throw std::domain_error("inexact polynomial division");
    return q;
}

namespace {

using UCoef = std::vector<MPoly>;

void trim(UCoef& p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
}

MPoly content(const UCoef& p) {
    MPoly g;
    for (const auto& c : p) {
        if (c.is_zero()) continue;
        g = gcd(g, c);
        if (g.is_const()) return MPoly(Q(1));
    }
    return g;
}

// Scale to integer coefficients with unit gcd; keeps PRS coefficient growth in check.
void scalar_primitive(UCoef& p) {
    mpz_class num, den = 1;
    for (const auto& x : p)
        for (const auto& [e, c] : x.terms()) {
            mpz_gcd(num.get_mpz_t(), num.get_mpz_t(), c.get_num_mpz_t());
            mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
        }
    if (num == 0) return;
    Q f(den, num);
    f.canonicalize();
    if (f == 1) return;
    for (auto& x : p) x *= f;
}

void make_primitive(UCoef& p) {
    MPoly c = content(p);
    if (!c.is_const())
        for (auto& x : p)
            if (!x.is_zero()) x = exact_div(x, c);
    scalar_primitive(p);
}

UCoef prem(UCoef a, const UCoef& b) {
    const MPoly& lb = b.back();
    size_t db = b.size() - 1;
    while (!a.empty() && a.size() - 1 >= db) {
        MPoly la = a.back();
        size_t shift = a.size() - 1 - db;
        for (auto& x : a) x *= lb;
        for (size_t i = 0; i < b.size(); ++i) a[i + shift] -= la * b[i];
        a.pop_back();
        trim(a);
    }
    return a;
}

}  // namespace

MPoly gcd(const MPoly& a, const MPoly& b) {
    if (a.is_zero()) {
        MPoly r = b;
        r.make_monic();
        return r;
    }
    if (b.is_zero()) {
        MPoly r = a;
        r.make_monic();
        return r;
    }
    if (a.is_const() || b.is_const()) return MPoly(Q(1));
    std::uint32_t ma = a.var_mask(), mb = b.var_mask();
    // Prefer a variable present in only one operand: the gcd is then the gcd
    // of the other operand with all coefficients in that variable.
    int v = (ma ^ mb) ? __builtin_ctz(ma ^ mb) : __builtin_ctz(ma | mb);
    if (!((ma >> v) & 1u) || !((mb >> v) & 1u)) {
        const MPoly& free = ((ma >> v) & 1u) ? b : a;
        const MPoly& dep = ((ma >> v) & 1u) ? a : b;
        MPoly g = free;
        for (const auto& c : dep.coeffs_in(v)) {
            if (c.is_zero()) continue;
            g = gcd(g, c);
            if (g.is_const()) return MPoly(Q(1));
        }
        g.make_monic();
        return g;
    }
    UCoef A = a.coeffs_in(v), B = b.coeffs_in(v);
    MPoly ca = content(A), cb = content(B);
    if (!ca.is_const())
        for (auto& x : A)
            if (!x.is_zero()) x = exact_div(x, ca);
    if (!cb.is_const())
        for (auto& x : B)
            if (!x.is_zero()) x = exact_div(x, cb);
    MPoly c = gcd(ca, cb);
    scalar_primitive(A);
    scalar_primitive(B);
    if (A.size() < B.size()) std::swap(A, B);
    while (!B.empty()) {
        if (B.size() == 1) {
            A = {MPoly(Q(1))};
            break;
        }
        UCoef R = prem(A, B);
        if (R.empty()) {
            A = std::move(B);
            break;
        }
        make_primitive(R);
        A = std::move(B);
        B = std::move(R);
    }
    MPoly g = MPoly::from_coeffs(v, A) * c;
    g.make_monic();
    return g;
}

RatFun::RatFun(MPoly n, MPoly d, bool reduce) : num(std::move(n)), den(std::move(d)) {
    if (den.is_zero()) throw std::domain_error("rational function with zero denominator");
    if (reduce)
        normalize();
}

void RatFun::normalize() {
    if (num.is_zero()) {
        den = MPoly(Q(1));
        return;
    }
    if (!den.is_const()) {
        MPoly g = gcd(num, den);
        if (!g.is_const()) {
            num = exact_div(num, g);
            den = exact_div(den, g);
        }
    }
    Q lc = den.make_monic();
    if (lc != 1) num *= 1 / lc;
}

RatFun RatFun::derivative(int v) const {
    MPoly n = num.derivative(v) * den - num * den.derivative(v);
    return RatFun(std::move(n), den * den);
}

RatFun operator+(const RatFun& a, const RatFun& b) {
    if (a.den == b.den) return RatFun(a.num + b.num, a.den);
    return RatFun(a.num * b.den + b.num * a.den, a.den * b.den);
}

RatFun operator-(const RatFun& a, const RatFun& b) {
    if (a.den == b.den) return RatFun(a.num - b.num, a.den);
    return RatFun(a.num * b.den - b.num * a.den, a.den * b.den);
}

RatFun operator*(const RatFun& a, const RatFun& b) {
    if (a.is_zero() || b.is_zero()) return RatFun();
    return RatFun(a.num * b.num, a.den * b.den);
}

RatFun operator/(const RatFun& a, const RatFun& b) {
    if (b.is_zero()) throw std::domain_error("rational function division by zero");
    return RatFun(a.num * b.den, a.den * b.num);
}

RatFun operator-(const RatFun& a) { return RatFun(-a.num, a.den, false); }

bool equal_cross(const RatFun& a, const RatFun& b) { return a.num * b.den == b.num * a.den; }

namespace {

class ExprParser {
public:
    ExprParser(const std::string& s, const std::vector<std::string>& names) : s_(s), names_(names) {}

    RatFun parse() {
        RatFun r = expr();
        skip();
        if (pos_ != s_.size()) fail("trailing input");
        return r;
    }

private:
    const std::string& s_;
    const std::vector<std::string>& names_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) {
        throw std::invalid_argument("expression parse error at " + std::to_string(pos_) + ": " + msg);
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    RatFun expr() {
        RatFun r = term();
        for (;;) {
            if (eat('+'))
                r = r + term();
            else if (eat('-'))
                r = r - term();
            else
                return r;
        }
    }

    RatFun term() {
        RatFun r = unary();
        for (;;) {
            if (eat('*'))
                r = r * unary();
            else if (eat('/'))
                r = r / unary();
            else
                return r;
        }
    }

    RatFun unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }

    RatFun power() {
        RatFun b = primary();
        if (eat('^')) {
            skip();
            bool neg = eat('-');
            skip();
            size_t st = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (st == pos_) fail("expected integer exponent");
            int e = std::stoi(s_.substr(st, pos_ - st));
            RatFun r(MPoly(Q(1)));
            for (int i = 0; i < e; ++i) r = r * b;
            if (neg) r = RatFun(MPoly(Q(1))) / r;
            return r;
        }
        return b;
    }

    RatFun primary() {
        skip();
        if (eat('(')) {
            RatFun r = expr();
            if (!eat(')')) fail("expected ')'");
            return r;
        }
        if (pos_ >= s_.size()) fail("unexpected end");
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t st = pos_;
            while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
            auto q = parse_rational(s_.substr(st, pos_ - st));
            if (!q) fail("bad number");
            return RatFun(MPoly(*q));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t st = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            std::string id = s_.substr(st, pos_ - st);
            for (size_t i = 0; i < names_.size(); ++i)
                if (names_[i] == id) return RatFun(MPoly::var(static_cast<int>(i)));
            fail("unknown variable '" + id + "'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

}  // namespace

RatFun parse_ratfun(const std::string& text, const std::vector<std::string>& names) {
    return ExprParser(text, names).parse();
}

MPoly parse_mpoly(const std::string& text, const std::vector<std::string>& names) {
    RatFun r = parse_ratfun(text, names);
    if (!r.den.is_const()) throw std::invalid_argument("expression is not a polynomial");
    return r.num * (1 / r.den.const_value());
}

}  // namespace lauricella
