#include "lauricella/frobenius.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lauricella/error.hpp"

namespace lauricella {

namespace {

bool is_root(const UPoly& p, const Q& x) { return p.eval(QG(x)).is_zero(); }

// Exact real rational roots of p with multiplicities; `all` reports whether
// every root was rational.
std::vector<std::pair<Q, int>> rational_roots(const UPoly& p, bool& all) {
    std::vector<std::pair<Q, int>> out;
    all = true;
    for (auto& [f, mult] : squarefree(p)) {
        UPoly g = f;
        int z = g.zero_order();
        if (z > 0) {
            out.emplace_back(Q(0), mult);
            g = UPoly(std::vector<QG>(g.c.begin() + z, g.c.end()));
        }
        if (g.deg() < 1) continue;
        size_t bits = 64;
        for (const auto& c : g.c)
            bits = std::max(bits, mpz_sizeinbase(c.re.get_num_mpz_t(), 2) + mpz_sizeinbase(c.re.get_den_mpz_t(), 2) +
                                      mpz_sizeinbase(c.im.get_num_mpz_t(), 2) + mpz_sizeinbase(c.im.get_den_mpz_t(), 2));
        int work = 60 + static_cast<int>(2 * bits / 3.32) + 10 * g.deg();
        auto num = poly_roots(to_hp(g, Prec{work}.bits()), work);
        for (auto& r : num) {
            // Walk the continued-fraction convergents of the real part.
            mpq_class x;
            mpfr_get_q(x.get_mpq_t(), r.z.re.get());
            mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
            mpq_class rest = x;
            std::optional<Q> hit;
            for (int it = 0; it < 2000 && !hit; ++it) {
                mpz_class a;
                mpz_fdiv_q(a.get_mpz_t(), rest.get_num_mpz_t(), rest.get_den_mpz_t());
                mpz_class p2 = a * p1 + p0, q2 = a * q1 + q0;
                Q cand(p2, q2);
                cand.canonicalize();
                if (is_root(g, cand)) hit = cand;
                p0 = p1; q0 = q1; p1 = p2; q1 = q2;
                mpq_class frac = rest - mpq_class(a);
                if (sgn(frac) == 0) break;
                rest = 1 / frac;
            }
            if (!hit) {
                all = false;
                continue;
            }
            if (std::none_of(out.begin(), out.end(), [&](const auto& e) { return e.first == *hit; }))
                out.emplace_back(*hit, mult);
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

QMat scale(const QMat& a, const QG& s) {
    QMat r = a;
    for (auto& row : r)
        for (auto& v : row) v *= s;
    return r;
}

QMat add(const QMat& a, const QMat& b) {
    QMat r = a;
    for (size_t i = 0; i < r.size(); ++i)
        for (size_t j = 0; j < r[i].size(); ++j) r[i][j] += b[i][j];
    return r;
}

HMat hscaled(const HMat& a, const Complex& s) {
    HMat r = a;
    for (size_t i = 0; i < r.rows(); ++i)
        for (size_t j = 0; j < r.cols(); ++j) r(i, j) *= s;
    return r;
}

void hadd(HMat& acc, const HMat& a) {
    for (size_t i = 0; i < acc.rows(); ++i)
        for (size_t j = 0; j < acc.cols(); ++j) acc(i, j) += a(i, j);
}

// acc += a*b
void hmul_add(HMat& acc, const HMat& a, const HMat& b, Real& t) {
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t l = 0; l < a.cols(); ++l) {
            if (a(i, l).is_zero()) continue;
            for (size_t j = 0; j < b.cols(); ++j) mul_add(acc(i, j), a(i, l), b(l, j), t);
        }
}

long double pow10l(long double e) { return std::pow(10.0L, e); }

// Geometric extrapolation of the trailing term norms.
long double geometric_tail(const std::vector<long double>& tau, long double q_hint) {
    if (tau.empty()) return 0;
    size_t n = tau.size();
    long double q = q_hint;
    size_t used = 0;
    for (size_t i = n - 1; i > 0 && used < 4; --i, ++used) {
        if (tau[i - 1] > 0) q = std::max(q, tau[i] / tau[i - 1]);
    }
    long double last = 0;
    for (size_t i = n >= 5 ? n - 5 : 0; i < n; ++i) last = std::max(last, tau[i]);
    if (last == 0) return 0;
    if (q >= 0.999L) return std::numeric_limits<long double>::infinity();
    return last * q / (1 - q);
}

}  // namespace

ShiftedSystem shift_system(const LocalSystem& ls, const QG& point) {
    ShiftedSystem sh;
    sh.point = point;
    sh.D = ls.D.shift(point);
    sh.P.assign(ls.P.size(), std::vector<UPoly>(ls.P.size()));
    for (size_t i = 0; i < ls.P.size(); ++i)
        for (size_t j = 0; j < ls.P.size(); ++j) sh.P[i][j] = ls.P[i][j].shift(point);
    sh.zero_order = sh.D.zero_order();
    if (sh.zero_order > 1)
        throw Error(ErrorCode::internal, "irregular singularity", "pole of order " + std::to_string(sh.zero_order) +
                                                                        " at t = " + point.to_string());
    return sh;
}

LocalData local_data(const LocalSystem& ls, const QG& point, int N, int digits, int exact_terms) {
    ShiftedSystem sh = shift_system(ls, point);
    size_t B = ls.dim();
    int z = sh.zero_order;
    std::vector<QG> d(sh.D.c.begin() + z, sh.D.c.end());
    int nq = N + z;  // series terms of P/d needed
    int nexact = std::min(nq, exact_terms + z);
    LocalData ld;
    ld.point = point;
    ld.singular = z == 1;

    // Exact leading terms: Q_n = (P_n - sum_{i>=1} d_i Q_{n-i}) / d_0.
    std::vector<QMat> Qe;
    QG inv0 = QG(1) / d[0];
    for (int n = 0; n < nexact; ++n) {
        QMat q = qmat_zero(B, B);
        for (size_t r = 0; r < B; ++r)
            for (size_t c = 0; c < B; ++c) q[r][c] = sh.P[r][c].coef(n);
        for (int i = 1; i <= n && i < static_cast<int>(d.size()); ++i) q = add(q, scale(Qe[static_cast<size_t>(n - i)], -d[static_cast<size_t>(i)]));
        Qe.push_back(scale(q, inv0));
    }
    ld.A0 = z == 1 ? (Qe.empty() ? QMat() : Qe[0]) : qmat_zero(B, B);
    if (z == 1 && Qe.empty()) {
        QMat q = qmat_zero(B, B);
        for (size_t r = 0; r < B; ++r)
            for (size_t c = 0; c < B; ++c) q[r][c] = sh.P[r][c].coef(0) * inv0;
        ld.A0 = q;
    }
    for (size_t n = static_cast<size_t>(z); n < Qe.size(); ++n) ld.Bexact.push_back(Qe[n]);

    mpfr_prec_t bits = Prec{digits}.bits();
    std::vector<HMat> Qh;
    Real t(bits);
    std::vector<Complex> dh;
    for (const auto& v : d) dh.push_back(v.to_complex(bits));
    Complex hinv0 = Complex(1L, bits) / dh[0];
    for (int n = 0; n < nq; ++n) {
        HMat q(B, B, bits);
        if (n < static_cast<int>(Qe.size())) {
            q = HMat::from_exact(Qe[static_cast<size_t>(n)], bits);
        } else {
            for (size_t r = 0; r < B; ++r)
                for (size_t c = 0; c < B; ++c) {
                    q(r, c) = sh.P[r][c].coef(n).to_complex(bits);
                    for (int i = 1; i <= n && i < static_cast<int>(dh.size()); ++i)
                        mul_sub(q(r, c), dh[static_cast<size_t>(i)], Qh[static_cast<size_t>(n - i)](r, c), t);
                    q(r, c) *= hinv0;
                }
        }
        Qh.push_back(std::move(q));
    }
    for (size_t n = static_cast<size_t>(z); n < Qh.size(); ++n) ld.B.push_back(std::move(Qh[n]));
    return ld;
}

ExponentStructure exponents(const QMat& A0) {
    ExponentStructure ex;
    if (A0.empty()) return ex;
    UPoly cp = charpoly(A0);
    bool all = true;
    auto roots = rational_roots(cp, all);
    if (!all) throw Error(ErrorCode::internal, "unsupported spectrum", "residue matrix has a non-rational eigenvalue");
    for (auto& [x, m] : roots)
        for (int i = 0; i < m; ++i) ex.eigenvalues.push_back(x);
    for (auto& [x, m] : roots) {
        bool placed = false;
        for (auto& c : ex.classes) {
            Q diff = x - c.base;
            if (diff.get_den() == 1) {
                c.members.emplace_back(x, m);
                c.size += m;
                if (x < c.base) c.base = x;
                placed = true;
                break;
            }
        }
        if (!placed) {
            ExponentClass c;
            c.base = x;
            c.members.emplace_back(x, m);
            c.size = m;
            ex.classes.push_back(c);
        }
    }
    for (auto& c : ex.classes) {
        std::sort(c.members.begin(), c.members.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        Q off = c.members.back().first - c.base;
        c.max_offset = static_cast<int>(off.get_num().get_si());
    }
    return ex;
}

FrobeniusSolution frobenius_series(const LocalData& ld, const ExponentStructure& ex, int N, int digits) {
    FrobeniusSolution sol;
    sol.point = ld.point;
    sol.ex = ex;
    sol.N = N;
    sol.digits = digits;
    size_t B = ld.A0.size();
    mpfr_prec_t bits = Prec{digits}.bits();
    Real t(bits);

    for (const auto& cls : ex.classes) {
        const int K = cls.size - 1;
        const size_t L = static_cast<size_t>(K + 1);
        const size_t m = B * L;
        if (static_cast<int>(ld.Bexact.size()) < cls.max_offset)
            throw std::logic_error("frobenius_series: not enough exact terms");
        if (static_cast<int>(ld.B.size()) < N) throw std::logic_error("frobenius_series: not enough terms");

        auto Tn = [&](int n) {
            QMat T = qmat_zero(m, m);
            QG lam(cls.base + n);
            for (size_t k = 0; k < L; ++k)
                for (size_t i = 0; i < B; ++i) {
                    for (size_t j = 0; j < B; ++j) T[k * B + i][k * B + j] = ld.A0[i][j];
                    T[k * B + i][k * B + i] -= lam;
                    if (k + 1 < L) T[k * B + i][(k + 1) * B + i] = QG(-static_cast<long>(k + 1));
                }
            return T;
        };

        // Exact phase: stacked coefficient blocks as functions of free parameters.
        std::vector<QMat> X;  // X[n]: m x F
        size_t F = 0;
        for (int n = 0; n <= cls.max_offset; ++n) {
            QMat R = qmat_zero(m, F);
            for (int j = 1; j <= n; ++j) {
                const QMat& Bj = ld.Bexact[static_cast<size_t>(j - 1)];
                const QMat& Xp = X[static_cast<size_t>(n - j)];
                for (size_t k = 0; k < L; ++k)
                    for (size_t i = 0; i < B; ++i)
                        for (size_t l = 0; l < B; ++l) {
                            if (Bj[i][l].is_zero()) continue;
                            for (size_t f = 0; f < F; ++f) R[k * B + i][f] -= Bj[i][l] * Xp[k * B + l][f];
                        }
            }
            QMat T = Tn(n);
            // Consistency: left null vectors of T annihilate R.
            QMat Tt = qmat_zero(m, m);
            for (size_t i = 0; i < m; ++i)
                for (size_t j = 0; j < m; ++j) Tt[i][j] = T[j][i];
            auto left = nullspace(Tt);
            if (!left.empty() && F > 0) {
                QMat C = qmat_zero(left.size(), F);
                for (size_t r = 0; r < left.size(); ++r)
                    for (size_t f = 0; f < F; ++f)
                        for (size_t i = 0; i < m; ++i) C[r][f] += left[r][i] * R[i][f];
                auto Z = nullspace(C);  // F x F'
                size_t F2 = Z.size();
                auto reparam = [&](QMat& A) {
                    QMat out = qmat_zero(A.size(), F2);
                    for (size_t i = 0; i < A.size(); ++i)
                        for (size_t c = 0; c < F2; ++c)
                            for (size_t f = 0; f < F; ++f) out[i][c] += A[i][f] * Z[c][f];
                    A = std::move(out);
                };
                for (auto& Xi : X) reparam(Xi);
                reparam(R);
                F = F2;
            }
            QMat Xn = qmat_zero(m, F);
            for (size_t f = 0; f < F; ++f) {
                QVec col(m);
                for (size_t i = 0; i < m; ++i) col[i] = R[i][f];
                auto s = solve(T, col);
                if (!s) throw Error(ErrorCode::internal, "Frobenius structure violation", "inconsistent resonant solve");
                for (size_t i = 0; i < m; ++i) Xn[i][f] = (*s)[i];
            }
            auto kern = nullspace(T);
            for (auto& Xi : X)
                for (auto& row : Xi) row.resize(F + kern.size());
            for (auto& row : Xn) row.resize(F + kern.size());
            for (size_t c = 0; c < kern.size(); ++c)
                for (size_t i = 0; i < m; ++i) Xn[i][F + c] = kern[c][i];
            F += kern.size();
            X.push_back(std::move(Xn));
        }
        if (static_cast<int>(F) != cls.size)
            throw Error(ErrorCode::internal, "Frobenius structure violation",
                        "class of size " + std::to_string(cls.size) + " produced " + std::to_string(F) + " solutions");

        ClassSeries cs;
        cs.lambda = cls.base;
        cs.cols = static_cast<int>(F);
        for (const auto& Xn : X) {
            std::vector<HMat> byk;
            for (size_t k = 0; k < L; ++k) {
                HMat h(B, F, bits);
                for (size_t i = 0; i < B; ++i)
                    for (size_t f = 0; f < F; ++f) h(i, f) = Xn[k * B + i][f].to_complex(bits);
                byk.push_back(std::move(h));
            }
            cs.X.push_back(std::move(byk));
        }
        // Numeric phase: T_n is regular beyond the last resonance.
        HMat A0h = HMat::from_exact(ld.A0, bits);
        for (int n = cls.max_offset + 1; n <= N; ++n) {
            HMat Tk = A0h;
            Real lam(Q(cls.base + n), bits);
            for (size_t i = 0; i < B; ++i) Tk(i, i).re -= lam;
            std::vector<HMat> byk(L, HMat(B, F, bits));
            for (size_t kk = L; kk-- > 0;) {
                HMat rhs(B, F, bits);
                for (int j = 1; j <= n; ++j) hmul_add(rhs, ld.B[static_cast<size_t>(j - 1)], cs.X[static_cast<size_t>(n - j)][kk], t);
                for (size_t i = 0; i < B; ++i)
                    for (size_t f = 0; f < F; ++f) rhs(i, f) = -rhs(i, f);
                if (kk + 1 < L) {
                    Real w(static_cast<long>(kk + 1), bits);
                    for (size_t i = 0; i < B; ++i)
                        for (size_t f = 0; f < F; ++f) rhs(i, f) += byk[kk + 1](i, f) * w;
                }
                byk[kk] = linsolve(Tk, rhs, digits);
            }
            cs.X.push_back(std::move(byk));
        }
        sol.classes.push_back(std::move(cs));
    }
    return sol;
}

FrobeniusSolution taylor_fundamental(const LocalData& ld, int N, int digits) {
    FrobeniusSolution sol;
    sol.point = ld.point;
    sol.N = N;
    sol.digits = digits;
    size_t B = ld.B.empty() ? ld.A0.size() : ld.B[0].rows();
    mpfr_prec_t bits = Prec{digits}.bits();
    Real t(bits);
    ExponentClass c0;
    c0.base = 0;
    c0.members.emplace_back(Q(0), static_cast<int>(B));
    c0.size = static_cast<int>(B);
    sol.ex.classes.push_back(c0);
    sol.ex.eigenvalues.assign(B, Q(0));
    ClassSeries cs;
    cs.lambda = 0;
    cs.cols = static_cast<int>(B);
    cs.X.push_back({HMat::identity(B, bits)});
    for (int n = 0; n < N; ++n) {
        HMat acc(B, B, bits);
        for (int j = 0; j <= n && j < static_cast<int>(ld.B.size()); ++j)
            hmul_add(acc, ld.B[static_cast<size_t>(j)], cs.X[static_cast<size_t>(n - j)][0], t);
        Real inv(1L, bits);
        inv /= Real(static_cast<long>(n + 1), bits);
        for (size_t i = 0; i < B; ++i)
            for (size_t j = 0; j < B; ++j) acc(i, j) *= inv;
        cs.X.push_back({std::move(acc)});
    }
    sol.classes.push_back(std::move(cs));
    return sol;
}

Evaluated evaluate(const FrobeniusSolution& sol, const Complex& s, int side) {
    mpfr_prec_t bits = Prec{sol.digits}.bits();
    size_t B = sol.classes.empty() ? 0 : sol.classes[0].X[0][0].rows();
    size_t total = 0;
    for (const auto& c : sol.classes) total += static_cast<size_t>(c.cols);
    Evaluated out;
    out.U = HMat(B, total, bits);
    Complex z(bits);
    z.set(s);
    bool at_point = z.is_zero();
    Complex lg(bits);
    long double absz = at_point ? 0 : mag(z);
    long double abslog = 0;
    if (!at_point) {
        lg = log(z, side);
        abslog = mag(lg);
    }
    size_t col0 = 0;
    for (const auto& cs : sol.classes) {
        size_t L = cs.X[0].size();
        std::vector<HMat> S(L, HMat(B, static_cast<size_t>(cs.cols), bits));
        std::vector<long double> tau;
        for (size_t n = cs.X.size(); n-- > 0;) {
            for (size_t k = 0; k < L; ++k) {
                for (size_t i = 0; i < B; ++i)
                    for (size_t f = 0; f < static_cast<size_t>(cs.cols); ++f) {
                        S[k](i, f) *= z;
                        S[k](i, f) += cs.X[n][k](i, f);
                    }
            }
        }
        for (size_t n = 0; n < cs.X.size(); ++n) {
            long double a = 0, lp = 1;
            for (size_t k = 0; k < L; ++k, lp *= abslog) a += cs.X[n][k].norm_inf() * lp;
            tau.push_back(a * std::pow(absz, static_cast<long double>(n)));
        }
        Complex pw(1L, bits);
        if (cs.lambda != 0) {
            if (at_point) {
                if (cs.lambda < 0) throw Error(ErrorCode::internal, "contract violation", "evaluation at a pole of the local solution");
                pw.set_zero();
            } else {
                pw = pow(z, cs.lambda, side);
            }
        }
        HMat colv = S[L - 1];
        for (size_t k = L - 1; k-- > 0;) {
            colv = hscaled(colv, lg);
            hadd(colv, S[k]);
        }
        if (at_point && L > 1) colv = S[0];
        for (size_t i = 0; i < B; ++i)
            for (size_t f = 0; f < static_cast<size_t>(cs.cols); ++f) out.U(i, col0 + f) = colv(i, f) * pw;
        long double tail = geometric_tail(tau, 0);
        if (!at_point) tail *= mag(pw);
        out.tail = std::max(out.tail, tail);
        col0 += static_cast<size_t>(cs.cols);
    }
    return out;
}

int choose_truncation(long double q, int digits) {
    if (!(q > 0) || q > 0.75L + 1e-12L) throw std::invalid_argument("choose_truncation: ratio outside (0, 3/4]");
    return static_cast<int>(std::ceil(digits * std::log(10.0L) / std::log(1 / q))) + 20;
}

namespace {

struct HPoly {
    std::vector<HMat> P;  // P[i] scaled by ds^{i+shift}
    std::vector<Complex> d;
};

bool negligible(const std::vector<long double>& tau, long double ref, int digits) {
    if (tau.size() < 25) return false;
    long double lim = ref * pow10l(-digits - 3);
    for (size_t i = tau.size() - 5; i < tau.size(); ++i)
        if (tau[i] > lim) return false;
    return true;
}

}  // namespace

StepResult taylor_step(const ShiftedSystem& sh, const HVec& J0, const Complex& ds, int N, int digits) {
    if (sh.zero_order != 0) throw Error(ErrorCode::internal, "contract violation", "taylor_step at a singular point");
    mpfr_prec_t bits = Prec{digits}.bits();
    size_t B = J0.size();
    int degP = -1;
    for (const auto& row : sh.P)
        for (const auto& p : row) degP = std::max(degP, p.deg());
    int degD = sh.D.deg();
    Complex z(bits);
    z.set(ds);
    // Scaled: d~_i = d_i z^i, P~_i = P_i z^{i+1}.
    std::vector<Complex> dt;
    Complex zp(1L, bits);
    for (int i = 0; i <= degD; ++i) {
        dt.push_back(sh.D.coef(i).to_complex(bits) * zp);
        zp *= z;
    }
    std::vector<HMat> Pt;
    zp = z;
    for (int i = 0; i <= degP; ++i) {
        HMat m(B, B, bits);
        for (size_t r = 0; r < B; ++r)
            for (size_t c = 0; c < B; ++c) {
                const QG v = sh.P[r][c].coef(i);
                if (!v.is_zero()) m(r, c) = v.to_complex(bits) * zp;
            }
        Pt.push_back(std::move(m));
        zp *= z;
    }
    Complex inv0 = Complex(1L, bits) / dt[0];
    std::vector<HVec> w{J0};
    for (auto& v : w[0]) {
        Complex c(bits);
        c.set(v);
        v = c;
    }
    StepResult out;
    out.value = w[0];
    std::vector<long double> tau{norm_inf(J0)};
    out.peak = tau[0];
    Real t(bits + 8);
    for (int n = 0; n < N; ++n) {
        HVec acc(B, Complex(bits));
        for (int i = 0; i <= std::min(n, degP); ++i) {
            const HMat& m = Pt[static_cast<size_t>(i)];
            const HVec& v = w[static_cast<size_t>(n - i)];
            for (size_t r = 0; r < B; ++r)
                for (size_t c = 0; c < B; ++c)
                    if (!m(r, c).is_zero()) mul_add(acc[r], m(r, c), v[c], t);
        }
        for (int i = 1; i <= std::min(n + 1, degD); ++i) {
            Complex f = dt[static_cast<size_t>(i)] * Real(static_cast<long>(n + 1 - i), bits);
            const HVec& v = w[static_cast<size_t>(n + 1 - i)];
            for (size_t r = 0; r < B; ++r) mul_sub(acc[r], f, v[r], t);
        }
        Complex f = inv0 * Real(1L, bits) / Complex(static_cast<long>(n + 1), bits);
        for (auto& a : acc) a *= f;
        long double nv = norm_inf(acc);
        for (size_t r = 0; r < B; ++r) out.value[r] += acc[r];
        w.push_back(std::move(acc));
        tau.push_back(nv);
        out.peak = std::max(out.peak, nv);
        out.terms = n + 1;
        if (negligible(tau, std::max(out.peak, norm_inf(out.value)), digits)) break;
    }
    out.tail = geometric_tail(tau, 0);
    return out;
}

std::vector<int> resonant_orders(const ShiftedSystem& sh) {
    if (sh.zero_order != 1) return {};
    size_t B = sh.P.size();
    QG d0 = sh.D.coef(1);
    QMat A0 = qmat_zero(B, B);
    for (size_t r = 0; r < B; ++r)
        for (size_t c = 0; c < B; ++c) A0[r][c] = sh.P[r][c].coef(0) / d0;
    bool all = true;
    auto roots = rational_roots(charpoly(A0), all);
    std::vector<int> out;
    for (auto& [x, m] : roots)
        if (x.get_den() == 1 && x > 0) out.push_back(static_cast<int>(x.get_num().get_si()));
    return out;
}

StepResult analytic_origin_step(const ShiftedSystem& sh, const std::vector<HVec>& v, const Complex& ds, int N,
                                int digits) {
    if (sh.zero_order != 1) throw Error(ErrorCode::internal, "contract violation", "analytic_origin_step needs a simple pole");
    int given = static_cast<int>(v.size()) - 1;
    for (int r : resonant_orders(sh))
        if (r > given)
            throw Error(ErrorCode::math_domain, "resonant leg origin",
                        "integer exponent " + std::to_string(r) + " beyond the supplied Taylor data");
    mpfr_prec_t bits = Prec{digits}.bits();
    size_t B = v[0].size();
    int degP = -1;
    for (const auto& row : sh.P)
        for (const auto& p : row) degP = std::max(degP, p.deg());
    int degd = sh.D.deg() - 1;  // D = s d(s)
    Complex z(bits);
    z.set(ds);
    std::vector<Complex> dt;
    std::vector<HMat> Pt;
    Complex zp(1L, bits);
    for (int i = 0; i <= std::max(degP, degd); ++i) {
        dt.push_back(sh.D.coef(i + 1).to_complex(bits) * zp);
        HMat m(B, B, bits);
        for (size_t r = 0; r < B; ++r)
            for (size_t c = 0; c < B; ++c) {
                const QG q = sh.P[r][c].coef(i);
                if (!q.is_zero()) m(r, c) = q.to_complex(bits) * zp;
            }
        Pt.push_back(std::move(m));
        zp *= z;
    }
    StepResult out;
    out.value.assign(B, Complex(bits));
    std::vector<HVec> w;
    std::vector<long double> tau;
    Real t(bits + 8);
    zp = Complex(1L, bits);
    for (int n = 0; n <= N; ++n) {
        HVec cur;
        if (n <= given) {
            cur = v[static_cast<size_t>(n)];
            for (auto& c : cur) {
                Complex x(bits);
                x.set(c);
                c = x * zp;
            }
            zp *= z;
        } else {
            HVec rhs(B, Complex(bits));
            for (int i = 1; i <= n && i < static_cast<int>(Pt.size()); ++i) {
                const HVec& u = w[static_cast<size_t>(n - i)];
                const HMat& m = Pt[static_cast<size_t>(i)];
                for (size_t r = 0; r < B; ++r)
                    for (size_t c = 0; c < B; ++c)
                        if (!m(r, c).is_zero()) mul_add(rhs[r], m(r, c), u[c], t);
                Complex f = dt[static_cast<size_t>(i)] * Real(static_cast<long>(n - i), bits);
                for (size_t r = 0; r < B; ++r) mul_sub(rhs[r], f, u[r], t);
            }
            HMat T(B, B, bits);
            Complex nd0 = dt[0] * Real(static_cast<long>(n), bits);
            for (size_t r = 0; r < B; ++r)
                for (size_t c = 0; c < B; ++c) T(r, c) = -Pt[0](r, c);
            for (size_t r = 0; r < B; ++r) T(r, r) += nd0;
            cur = linsolve(std::move(T), rhs, digits);
        }
        long double nv = norm_inf(cur);
        for (size_t r = 0; r < B; ++r) out.value[r] += cur[r];
        w.push_back(std::move(cur));
        tau.push_back(nv);
        out.peak = std::max(out.peak, nv);
        out.terms = n;
        if (n > given && negligible(tau, std::max(out.peak, norm_inf(out.value)), digits)) break;
    }
    out.tail = geometric_tail(tau, 0);
    return out;
}

}  // namespace lauricella
