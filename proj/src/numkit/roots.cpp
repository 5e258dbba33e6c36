#include "lauricella/numkit/roots.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "lauricella/error.hpp"

namespace lauricella {

namespace {

using cd = std::complex<double>;

[[noreturn]] void fail(const std::vector<Complex>& coeffs, const std::string& why) {
    std::ostringstream os;
    os << why << "; polynomial degree " << coeffs.size() - 1 << " coefficients [";
    for (size_t i = 0; i < coeffs.size(); ++i)
        os << (i ? ", " : "") << coeffs[i].re.to_string(8) << (coeffs[i].im.sign() < 0 ? "" : "+")
           << coeffs[i].im.to_string(8) << "i";
    os << "]";
    throw Error(ErrorCode::internal, "root-finding failure", os.str());
}

void eval_with_deriv(const std::vector<Complex>& c, const Complex& z, Complex& p, Complex& dp) {
    p.set_zero();
    dp.set_zero();
    for (size_t i = c.size(); i-- > 0;) {
        dp *= z;
        dp += p;
        p *= z;
        p += c[i];
    }
}

std::vector<cd> seed_double(const std::vector<Complex>& coeffs) {
    size_t n = coeffs.size() - 1;
    std::vector<cd> c(coeffs.size());
    for (size_t i = 0; i < coeffs.size(); ++i) c[i] = cd(coeffs[i].re.to_double(), coeffs[i].im.to_double());
    // Fujiwara-style radius bound for the starting circle.
    double lead = std::abs(c[n]), rad = 0;
    for (size_t i = 0; i < n; ++i) rad = std::max(rad, std::pow(std::abs(c[i]) / lead, 1.0 / static_cast<double>(n - i)));
    rad = std::max(2 * rad, 1e-3);
    std::vector<cd> z(n);
    for (size_t k = 0; k < n; ++k) z[k] = std::polar(rad, 2 * M_PI * (static_cast<double>(k) + 0.25) / static_cast<double>(n) + 0.4);
    for (int it = 0; it < 500; ++it) {
        double worst = 0;
        for (size_t k = 0; k < n; ++k) {
            cd p = 0, dp = 0;
            for (size_t i = c.size(); i-- > 0;) {
                dp = dp * z[k] + p;
                p = p * z[k] + c[i];
            }
            if (p == cd(0)) continue;
            cd w = p / dp, s = 0;
            for (size_t j = 0; j < n; ++j)
                if (j != k) s += 1.0 / (z[k] - z[j]);
            cd corr = w / (1.0 - w * s);
            if (!std::isfinite(corr.real()) || !std::isfinite(corr.imag())) corr = w;
            z[k] -= corr;
            worst = std::max(worst, std::abs(corr) / std::max(1.0, std::abs(z[k])));
        }
        if (worst < 1e-14) break;
    }
    return z;
}

}  // namespace

std::vector<Root> poly_roots(const std::vector<Complex>& coeffs_in, int digits) {
    std::vector<Complex> coeffs = coeffs_in;
    while (!coeffs.empty() && coeffs.back().is_zero()) coeffs.pop_back();
    if (coeffs.size() < 2) fail(coeffs_in, "degree < 1");
    size_t n = coeffs.size() - 1;
    mpfr_prec_t bits = Prec{digits}.bits() + 32;
    for (auto& c : coeffs) {
        Complex w(bits);
        w.set(c);
        c = std::move(w);
    }
    std::vector<Root> out;
    if (n == 1) {
        Root r;
        r.z = -coeffs[0] / coeffs[1];
        out.push_back(std::move(r));
        return out;
    }
    auto seeds = seed_double(coeffs);
    std::vector<Complex> z;
    for (const auto& s : seeds) z.emplace_back(Real(s.real(), bits), Real(s.imag(), bits));

    long double tol = std::pow(10.0L, -(digits + 4));
    Complex p(bits), dp(bits);
    bool converged = false;
    std::vector<bool> settled(n, false);
    for (int it = 0; it < 200 && !converged; ++it) {
        converged = true;
        for (size_t k = 0; k < n; ++k) {
            if (settled[k]) continue;
            eval_with_deriv(coeffs, z[k], p, dp);
            if (p.is_zero()) {
                settled[k] = true;
                continue;
            }
            if (dp.is_zero()) {
                converged = false;
                z[k] += Complex(Real(1e-10, bits), Real(1e-10, bits));
                continue;
            }
            Complex w = p / dp;
            Complex s(bits);
            for (size_t j = 0; j < n; ++j) {
                if (j == k) continue;
                Complex d = z[k] - z[j];
                if (d.is_zero()) continue;
                s += Complex(1L, bits) / d;
            }
            Complex den = Complex(1L, bits) - w * s;
            Complex corr = den.is_zero() ? w : w / den;
            z[k] -= corr;
            long double rel = mag(corr) / std::max(1.0L, mag(z[k]));
            if (rel > tol) converged = false;
            else settled[k] = true;
        }
    }
    // Inclusion radii from the Weierstrass correction n|p(z_k)| / |lc prod (z_k - z_j)|,
    // with |p| floored at the rounding level. Clustered roots get large radii.
    long double pnorm = 0;
    for (const auto& c : coeffs) pnorm = std::max(pnorm, mag(c));
    long double lc = mag(coeffs[n]);
    std::vector<long double> rad(n);
    for (size_t k = 0; k < n; ++k) {
        eval_with_deriv(coeffs, z[k], p, dp);
        long double zk = std::max(1.0L, mag(z[k]));
        long double floor = std::pow(10.0L, -(digits + 9)) * pnorm * std::pow(zk, static_cast<long double>(n));
        long double mp = std::max(mag(p), floor);
        long double prod = lc;
        for (size_t j = 0; j < n; ++j)
            if (j != k) prod *= mag(z[k] - z[j]);
        rad[k] = prod > 0 ? static_cast<long double>(n) * mp / prod : zk;
    }
    std::vector<int> cluster(n);
    for (size_t k = 0; k < n; ++k) cluster[k] = static_cast<int>(k);
    for (size_t k = 0; k < n; ++k)
        for (size_t j = k + 1; j < n; ++j) {
            long double d = mag(z[k] - z[j]);
            if (d <= rad[k] + rad[j]) {
                int a = cluster[j], b = cluster[k];
                for (auto& c : cluster)
                    if (c == a) c = b;
            }
        }
    for (size_t k = 0; k < n; ++k) {
        Root r;
        r.z = z[k];
        r.radius = rad[k];
        r.multiplicity = static_cast<int>(std::count(cluster.begin(), cluster.end(), cluster[k]));
        if (r.multiplicity == 1) {
            eval_with_deriv(coeffs, z[k], p, dp);
            if (mag(p) > std::pow(10.0L, -digits + 4) * pnorm * std::max(1.0L, std::pow(mag(z[k]), static_cast<long double>(n))))
                fail(coeffs_in, "residual too large after polishing");
        }
        out.push_back(std::move(r));
    }
    if (!converged) {
        for (const auto& r : out)
            if (r.multiplicity == 1 && r.radius > std::pow(10.0L, -digits / 2.0L) * std::max(1.0L, mag(r.z)))
                fail(coeffs_in, "no convergence after 200 iterations");
    }
    // Deterministic order: by real part then imaginary part.
    std::sort(out.begin(), out.end(), [](const Root& a, const Root& b) {
        int c = mpfr_cmp(a.z.re.get(), b.z.re.get());
        if (c != 0) return c < 0;
        return mpfr_cmp(a.z.im.get(), b.z.im.get()) < 0;
    });
    for (auto& r : out) {
        Complex w(Prec{digits}.bits());
        w.set(r.z);
        r.z = std::move(w);
    }
    return out;
}

std::optional<Q> rationalize(const Real& x, long denom_bound, int digits) {
    if (!x.is_finite()) return std::nullopt;
    mpq_class exact;
    mpfr_get_q(exact.get_mpq_t(), x.get());
    // Continued-fraction convergents of the exact binary value.
    mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    mpq_class rest = exact;
    mpq_class best;
    bool have = false;
    for (int it = 0; it < 400; ++it) {
        mpz_class a;
        mpz_fdiv_q(a.get_mpz_t(), rest.get_num_mpz_t(), rest.get_den_mpz_t());
        mpz_class p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > denom_bound) break;
        best = mpq_class(p2, q2);
        best.canonicalize();
        have = true;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        mpq_class frac = rest - mpq_class(a);
        if (sgn(frac) == 0) break;
        rest = 1 / frac;
    }
    if (!have) return std::nullopt;
    Real diff(Q(best), x.prec());
    diff -= x;
    Real tol(1L, x.prec());
    mpfr_ui_pow_ui(tol.get(), 10, static_cast<unsigned long>(digits / 2), MPFR_RNDN);
    tol = Real(1L, x.prec()) / tol;
    if (abs(diff) > tol) return std::nullopt;
    return best;
}

std::optional<QG> rationalize(const Complex& x, long denom_bound, int digits) {
    auto r = rationalize(x.re, denom_bound, digits);
    auto i = rationalize(x.im, denom_bound, digits);
    if (!r || !i) return std::nullopt;
    return QG(*r, *i);
}

std::vector<ExactRoot> roots_exact(const UPoly& p, int digits, long denom_bound) {
    std::vector<ExactRoot> out;
    if (p.deg() < 1) return out;
    int work = std::max(digits, 40);
    mpfr_prec_t bits = Prec{work}.bits();
    for (auto& [f, mult] : squarefree(p)) {
        UPoly g = f;
        // Peel off exact linear factors first: t = 0 and then rational roots found numerically.
        int z0 = g.zero_order();
        if (z0 > 0) {
            ExactRoot r;
            r.approx = Complex(bits);
            r.exact = QG();
            r.multiplicity = mult;
            out.push_back(std::move(r));
            g = UPoly(std::vector<QG>(g.c.begin() + z0, g.c.end()));
        }
        if (g.deg() < 1) continue;
        auto num = poly_roots(to_hp(g, bits), work);
        for (auto& nr : num) {
            ExactRoot r;
            r.multiplicity = mult;
            auto q = rationalize(nr.z, denom_bound, work);
            if (q && g.eval(*q).is_zero()) {
                r.exact = *q;
                r.approx = q->to_complex(Prec{digits}.bits());
            } else {
                Complex w(Prec{digits}.bits());
                w.set(nr.z);
                r.approx = std::move(w);
            }
            out.push_back(std::move(r));
        }
    }
    std::sort(out.begin(), out.end(), [](const ExactRoot& a, const ExactRoot& b) {
        int c = mpfr_cmp(a.approx.re.get(), b.approx.re.get());
        if (c != 0) return c < 0;
        return mpfr_cmp(a.approx.im.get(), b.approx.im.get()) < 0;
    });
    return out;
}

}  // namespace lauricella
