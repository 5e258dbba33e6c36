#include "lauricella/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lauricella/error.hpp"

namespace lauricella {

std::string LinearForm::to_string(const std::string& eps) const {
    std::string s;
    if (sgn(b) == 0) return q_to_string(a);
    if (sgn(a) != 0) s = q_to_string(a) + (sgn(b) > 0 ? "+" : "-");
    else if (sgn(b) < 0) s = "-";
    Q mb = abs(b);
    if (mb != 1) s += q_to_string(mb) + "*";
    return s + eps;
}

const char* family_name(Family f) {
    switch (f) {
        case Family::FA: return "FA";
        case Family::FB: return "FB";
        case Family::FD: return "FD";
    }
    return "?";
}

void FunctionSpec::validate() const {
    auto bad = [](const std::string& m) { throw Error(ErrorCode::usage, "invalid function specification", m); };
    if (n < 1 || n > 3) bad("number of variables must be 1..3");
    size_t un = static_cast<size_t>(n);
    size_t na = family == Family::FB ? un : 1, ng = family == Family::FA ? un : 1;
    if (alpha.size() != na || beta.size() != un || gamma.size() != ng) bad("parameter list lengths do not match the family shape");
    if (args.size() != un) bad("argument count does not match n");
}

FunctionSpec FunctionSpec::reduced(const std::vector<int>& keep) const {
    FunctionSpec r;
    r.family = family;
    r.n = static_cast<int>(keep.size());
    auto pick = [&](const std::vector<LinearForm>& v) {
        std::vector<LinearForm> o;
        for (int k : keep) o.push_back(v[static_cast<size_t>(k)]);
        return o;
    };
    r.alpha = family == Family::FB ? pick(alpha) : alpha;
    r.beta = pick(beta);
    r.gamma = family == Family::FA ? pick(gamma) : gamma;
    for (int k : keep) r.args.push_back(args[static_cast<size_t>(k)]);
    return r;
}

std::string FunctionSpec::to_string(const std::string& eps) const {
    auto list = [&](const std::vector<LinearForm>& v) {
        std::string s = "{";
        for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i].to_string(eps);
        return s + "}";
    };
    std::string x = "{";
    for (size_t i = 0; i < args.size(); ++i) x += (i ? ", " : "") + args[i].to_string();
    x += "}";
    std::ostringstream os;
    os << "Lauricella" << family_name(family) << "[";
    switch (family) {
        case Family::FA: os << alpha[0].to_string(eps) << ", " << list(beta) << ", " << list(gamma); break;
        case Family::FB: os << list(alpha) << ", " << list(beta) << ", " << gamma[0].to_string(eps); break;
        case Family::FD: os << alpha[0].to_string(eps) << ", " << list(beta) << ", " << gamma[0].to_string(eps); break;
    }
    os << ", " << x << "]";
    return os.str();
}

NodeParams NodeParams::at(const FunctionSpec& s, const Q& eps) {
    NodeParams p;
    p.family = s.family;
    p.n = s.n;
    for (const auto& f : s.alpha) p.alpha.push_back(f.at(eps));
    for (const auto& f : s.beta) p.beta.push_back(f.at(eps));
    for (const auto& f : s.gamma) p.gamma.push_back(f.at(eps));
    return p;
}

bool NodeParams::degenerate() const {
    for (const auto& g : gamma)
        if (g.get_den() == 1 && g <= 0) return true;
    return false;
}

Q coefficient_ratio(const NodeParams& p, const std::vector<int>& i, int k) {
    long tot = 0;
    for (int x : i) tot += x;
    long ik = i[static_cast<size_t>(k)];
    size_t uk = static_cast<size_t>(k);
    Q num, den;
    switch (p.family) {
        case Family::FA:
            num = (p.alpha[0] + tot) * (p.beta[uk] + ik);
            den = (p.gamma[uk] + ik) * (1 + ik);
            break;
        case Family::FB:
            num = (p.alpha[uk] + ik) * (p.beta[uk] + ik);
            den = (p.gamma[0] + tot) * (1 + ik);
            break;
        case Family::FD:
            num = (p.alpha[0] + tot) * (p.beta[uk] + ik);
            den = (p.gamma[0] + tot) * (1 + ik);
            break;
    }
    if (sgn(den) == 0) throw Error(ErrorCode::math_domain, "degenerate parameters at node", "Pochhammer denominator vanishes");
    return num / den;
}

std::vector<std::uint32_t> theta_basis(Family f, int n) {
    std::vector<std::uint32_t> b;
    if (f == Family::FD) {
        b.push_back(0);
        for (int j = 0; j < n; ++j) b.push_back(1u << j);
    } else {
        for (std::uint32_t m = 0; m < (1u << n); ++m) b.push_back(m);
    }
    return b;
}

DomainCheck convergence_check(Family f, const std::vector<QG>& args) {
    // |x| for complex x is irrational; use 60-bit HP and round the margin down
    // to a rational with denominator 10^15.
    mpfr_prec_t bits = 200;
    Real acc(0L, bits), mx(0L, bits);
    bool all_real = true;
    for (const auto& x : args) {
        if (!x.is_real()) all_real = false;
        Real m = abs(x.to_complex(bits));
        acc += m;
        if (m > mx) mx = m;
    }
    DomainCheck r;
    if (all_real) {
        Q s, best;
        for (const auto& x : args) {
            Q a = abs(x.re);
            s += a;
            best = std::max(best, a);
        }
        r.margin = 1 - (f == Family::FA ? s : best);
        r.inside = sgn(r.margin) > 0;
        return r;
    }
    Real used = f == Family::FA ? acc : mx;
    Real marg = Real(1L, bits) - used;
    mpz_class scaled;
    Real big = marg * Real(Q(mpz_class("1000000000000000")), bits);
    mpfr_get_z(scaled.get_mpz_t(), big.get(), MPFR_RNDD);
    r.margin = Q(scaled, mpz_class("1000000000000000"));
    r.margin.canonicalize();
    if (marg.is_zero() || marg.sign() < 0) {
        r.inside = false;
    } else {
        r.inside = true;
    }
    return r;
}

namespace {

// Compositions of m into n parts, enumerated lexicographically.
struct Shell {
    int n, m;
    std::vector<std::vector<int>> idx;

    Shell(int n_, int m_) : n(n_), m(m_) {
        std::vector<int> cur(static_cast<size_t>(n), 0);
        fill(0, m, cur);
    }

    void fill(int pos, int left, std::vector<int>& cur) {
        if (pos == n - 1) {
            cur[static_cast<size_t>(pos)] = left;
            idx.push_back(cur);
            return;
        }
        for (int a = 0; a <= left; ++a) {
            cur[static_cast<size_t>(pos)] = a;
            fill(pos + 1, left - a, cur);
        }
    }
};

// Position of composition i (of m into n parts) in Shell(n, m).
size_t shell_rank(const std::vector<int>& i, int m) {
    size_t n = i.size();
    if (n == 1) return 0;
    if (n == 2) return static_cast<size_t>(i[0]);
    size_t r = 0;
    for (int a = 0; a < i[0]; ++a) r += static_cast<size_t>(m - a + 1);
    return r + static_cast<size_t>(i[1]);
}

// Predecessor direction: first coordinate with a positive index.
int pred_dir(const std::vector<int>& i) {
    for (size_t k = 0; k < i.size(); ++k)
        if (i[k] > 0) return static_cast<int>(k);
    return -1;
}

long weight(std::uint32_t mask, const std::vector<int>& i) {
    long w = 1;
    for (size_t j = 0; j < i.size(); ++j)
        if (mask & (1u << j)) w *= i[j];
    return w;
}

std::vector<Complex> sum_series_at(const NodeParams& p, const std::vector<QG>& args, int target, int work) {
    mpfr_prec_t bits = Prec{work}.bits();
    auto basis = theta_basis(p.family, p.n);
    std::vector<Complex> J;
    for (size_t b = 0; b < basis.size(); ++b) J.emplace_back(bits);
    std::vector<Complex> x;
    for (const auto& a : args) x.push_back(a.to_complex(bits));

    std::vector<Complex> prev{Complex(1L, bits)};
    J[0] = Complex(1L, bits);
    long double last = 1, peak = 1;
    std::vector<long double> history;
    const long double stop = std::pow(10.0L, -(target + 5));
    for (int m = 1;; ++m) {
        if (m > 200000) throw Error(ErrorCode::internal, "oracle did not converge", "");
        Shell sh(p.n, m);
        std::vector<Complex> cur;
        cur.reserve(sh.idx.size());
        long double shell_mag = 0;
        for (auto& i : sh.idx) {
            int k = pred_dir(i);
            std::vector<int> j = i;
            j[static_cast<size_t>(k)]--;
            Complex t = prev[shell_rank(j, m - 1)] * x[static_cast<size_t>(k)];
            Q r = coefficient_ratio(p, j, k);
            mpfr_mul_q(t.re.get(), t.re.get(), r.get_mpq_t(), MPFR_RNDN);
            mpfr_mul_q(t.im.get(), t.im.get(), r.get_mpq_t(), MPFR_RNDN);
            long double tm = mag(t);
            for (size_t b = 0; b < basis.size(); ++b) {
                long w = weight(basis[b], i);
                if (w == 0) continue;
                if (w == 1) {
                    J[b] += t;
                } else {
                    Complex tw = t;
                    mpfr_mul_si(tw.re.get(), tw.re.get(), w, MPFR_RNDN);
                    mpfr_mul_si(tw.im.get(), tw.im.get(), w, MPFR_RNDN);
                    J[b] += tw;
                }
                shell_mag += tm * static_cast<long double>(std::labs(w));
            }
            cur.push_back(std::move(t));
        }
        prev = std::move(cur);
        peak = std::max(peak, shell_mag);
        history.push_back(shell_mag);
        long double scale = std::max(1.0L, mag(J[0]));
        if (m > 4 && shell_mag < stop * scale) {
            // Geometric tail certificate from the trailing shell ratios.
            long double q = 0;
            size_t h = history.size();
            for (size_t a = h - 4; a < h; ++a)
                if (history[a - 1] > 0) q = std::max(q, history[a] / history[a - 1]);
            if (q < 0.98L && shell_mag * q / (1 - q) < stop * scale) break;
        }
        last = shell_mag;
    }
    (void)last;
    if (peak > std::pow(10.0L, work - target - 3)) {
        int extra = static_cast<int>(std::ceil(std::log10(peak))) + 5;
        return sum_series_at(p, args, target, target + 10 + extra);
    }
    return J;
}

}  // namespace

std::vector<Complex> sum_series(const NodeParams& p, const std::vector<QG>& args, int target_digits) {
    DomainCheck dc = convergence_check(p.family, args);
    if (!dc.inside || dc.margin < Q(1, 4))
        throw Error(ErrorCode::math_domain, "oracle domain error", "summation requires margin >= 1/4");
    auto J = sum_series_at(p, args, target_digits, target_digits + 12);
    mpfr_prec_t bits = Prec{target_digits}.bits();
    std::vector<Complex> out;
    for (auto& z : J) {
        Complex w(bits);
        w.set(z);
        out.push_back(std::move(w));
    }
    return out;
}

std::vector<std::vector<QG>> line_taylor_exact(const NodeParams& p, const std::vector<QG>& kappa, int mmax) {
    auto basis = theta_basis(p.family, p.n);
    std::vector<std::vector<QG>> v(static_cast<size_t>(mmax) + 1, std::vector<QG>(basis.size()));
    v[0][0] = QG(1);
    std::vector<QG> prev{QG(1)};
    for (int m = 1; m <= mmax; ++m) {
        Shell sh(p.n, m);
        std::vector<QG> cur;
        for (auto& i : sh.idx) {
            int k = pred_dir(i);
            std::vector<int> j = i;
            j[static_cast<size_t>(k)]--;
            QG t = prev[shell_rank(j, m - 1)] * kappa[static_cast<size_t>(k)] * QG(coefficient_ratio(p, j, k));
            for (size_t b = 0; b < basis.size(); ++b) {
                long w = weight(basis[b], i);
                if (w) v[static_cast<size_t>(m)][b] += t * QG(Q(w));
            }
            cur.push_back(std::move(t));
        }
        prev = std::move(cur);
    }
    return v;
}

namespace {

// Truncated complex power series in eps.
using Series = std::vector<Complex>;

void mul_linear(Series& s, const Q& a, const Q& b, Real& tmp) {
    // s *= (a + b eps)
    for (size_t c = s.size(); c-- > 0;) {
        mpfr_mul_q(s[c].re.get(), s[c].re.get(), a.get_mpq_t(), MPFR_RNDN);
        mpfr_mul_q(s[c].im.get(), s[c].im.get(), a.get_mpq_t(), MPFR_RNDN);
        if (c > 0 && sgn(b) != 0) {
            mpfr_mul_q(tmp.get(), s[c - 1].re.get(), b.get_mpq_t(), MPFR_RNDN);
            mpfr_add(s[c].re.get(), s[c].re.get(), tmp.get(), MPFR_RNDN);
            mpfr_mul_q(tmp.get(), s[c - 1].im.get(), b.get_mpq_t(), MPFR_RNDN);
            mpfr_add(s[c].im.get(), s[c].im.get(), tmp.get(), MPFR_RNDN);
        }
    }
}

void div_linear(Series& s, const Q& a, const Q& b, Real& tmp) {
    // s /= (a + b eps), a != 0
    if (sgn(a) == 0) throw Error(ErrorCode::math_domain, "eps pole in series coefficient", "oracle supports pole order 0 only");
    Q ia = 1 / a;
    for (size_t c = 0; c < s.size(); ++c) {
        if (c > 0 && sgn(b) != 0) {
            mpfr_mul_q(tmp.get(), s[c - 1].re.get(), b.get_mpq_t(), MPFR_RNDN);
            mpfr_sub(s[c].re.get(), s[c].re.get(), tmp.get(), MPFR_RNDN);
            mpfr_mul_q(tmp.get(), s[c - 1].im.get(), b.get_mpq_t(), MPFR_RNDN);
            mpfr_sub(s[c].im.get(), s[c].im.get(), tmp.get(), MPFR_RNDN);
        }
        mpfr_mul_q(s[c].re.get(), s[c].re.get(), ia.get_mpq_t(), MPFR_RNDN);
        mpfr_mul_q(s[c].im.get(), s[c].im.get(), ia.get_mpq_t(), MPFR_RNDN);
    }
}

}  // namespace

std::vector<Complex> eps_series_oracle(const FunctionSpec& s, int order, int digits) {
    std::vector<int> keep;
    for (int i = 0; i < s.n; ++i)
        if (!s.args[static_cast<size_t>(i)].is_zero()) keep.push_back(i);
    if (keep.empty()) {
        std::vector<Complex> one(static_cast<size_t>(order), Complex(Prec{digits}.bits()));
        one[0] = Complex(1L, Prec{digits}.bits());
        return one;
    }
    if (static_cast<int>(keep.size()) < s.n) return eps_series_oracle(s.reduced(keep), order, digits);
    DomainCheck dc = convergence_check(s.family, s.args);
    if (!dc.inside || dc.margin < Q(1, 4))
        throw Error(ErrorCode::math_domain, "oracle domain error", "summation requires margin >= 1/4");
    int work = digits + 15;
    mpfr_prec_t bits = Prec{work}.bits();
    size_t K = static_cast<size_t>(order);
    std::vector<Complex> x;
    for (const auto& a : s.args) x.push_back(a.to_complex(bits));
    auto zero_series = [&] {
        Series z;
        for (size_t c = 0; c < K; ++c) z.emplace_back(bits);
        return z;
    };
    Series total = zero_series();
    total[0] = Complex(1L, bits);
    std::vector<Series> prev(1, zero_series());
    prev[0][0] = Complex(1L, bits);
    Real tmp(bits);
    const long double stop = std::pow(10.0L, -(digits + 5));
    std::vector<long double> history;
    for (int m = 1;; ++m) {
        if (m > 200000) throw Error(ErrorCode::internal, "oracle did not converge", "");
        Shell sh(s.n, m);
        std::vector<Series> cur;
        cur.reserve(sh.idx.size());
        long double shell_mag = 0;
        for (auto& i : sh.idx) {
            int k = pred_dir(i);
            size_t uk = static_cast<size_t>(k);
            std::vector<int> j = i;
            j[uk]--;
            long tot = 0;
            for (int a : j) tot += a;
            long jk = j[uk];
            Series t = prev[shell_rank(j, m - 1)];
            for (auto& c : t) c *= x[uk];
            switch (s.family) {
                case Family::FA:
                    mul_linear(t, s.alpha[0].a + tot, s.alpha[0].b, tmp);
                    mul_linear(t, s.beta[uk].a + jk, s.beta[uk].b, tmp);
                    div_linear(t, s.gamma[uk].a + jk, s.gamma[uk].b, tmp);
                    break;
                case Family::FB:
                    mul_linear(t, s.alpha[uk].a + jk, s.alpha[uk].b, tmp);
                    mul_linear(t, s.beta[uk].a + jk, s.beta[uk].b, tmp);
                    div_linear(t, s.gamma[0].a + tot, s.gamma[0].b, tmp);
                    break;
                case Family::FD:
                    mul_linear(t, s.alpha[0].a + tot, s.alpha[0].b, tmp);
                    mul_linear(t, s.beta[uk].a + jk, s.beta[uk].b, tmp);
                    div_linear(t, s.gamma[0].a + tot, s.gamma[0].b, tmp);
                    break;
            }
            div_linear(t, Q(1 + jk), Q(0), tmp);
            for (size_t c = 0; c < K; ++c) {
                total[c] += t[c];
                shell_mag = std::max(shell_mag, mag(t[c]));
            }
            cur.push_back(std::move(t));
        }
        prev = std::move(cur);
        history.push_back(shell_mag * static_cast<long double>(sh.idx.size()));
        long double last = history.back();
        if (m > 4 && last < stop) {
            long double q = 0;
            size_t h = history.size();
            for (size_t a = h - 4; a < h; ++a)
                if (history[a - 1] > 0) q = std::max(q, history[a] / history[a - 1]);
            if (q < 0.98L && last * q / (1 - q) < stop) break;
        }
    }
    std::vector<Complex> out;
    for (auto& z : total) {
        Complex w(Prec{digits}.bits());
        w.set(z);
        out.push_back(std::move(w));
    }
    return out;
}

}  // namespace lauricella
