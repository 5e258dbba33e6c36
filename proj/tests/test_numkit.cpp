#include <doctest.h>

#include <cmath>
#include <random>

#include "lauricella/error.hpp"
#include "lauricella/numkit/hp.hpp"
#include "lauricella/numkit/linalg.hpp"
#include "lauricella/numkit/mpoly.hpp"
#include "lauricella/numkit/qgauss.hpp"
#include "lauricella/numkit/roots.hpp"
#include "lauricella/numkit/upoly.hpp"

using namespace lauricella;

namespace {

Q rand_q(std::mt19937_64& g, int range = 9, int den = 7) {
    std::uniform_int_distribution<int> n(-range, range), d(1, den);
    Q q(n(g), d(g));
    q.canonicalize();
    return q;
}

long double rel_diff(const Complex& a, const Complex& b) {
    return mag(a - b) / std::max(1.0L, mag(b));
}

}  // namespace

TEST_CASE("hp arithmetic and branches") {
    mpfr_prec_t b = Prec{50}.bits();
    Complex z(Q(1, 3), Q(-2, 5), b);
    Complex w = z * conj(z);
    CHECK(mag(w.im) == 0);
    CHECK(std::fabs(static_cast<double>(w.re.to_ldouble() - (1.0L / 9 + 4.0L / 25))) < 1e-15);

    Complex m(Q(-1, 4), Q(0), b);
    Complex below = log(m, -1), above = log(m, +1);
    CHECK(below.im.to_double() == doctest::Approx(-M_PI));
    CHECK(above.im.to_double() == doctest::Approx(M_PI));
    // t^{-1/2} at t = 1/4 is 2 on the principal branch.
    Complex q = pow(Complex(Q(1, 4), Q(0), b), Q(-1, 2));
    CHECK(rel_diff(q, Complex(2L, b)) < 1e-45L);
    // t = -1/4 below the cut: exp(-(1/2)(ln(1/4) - i pi)) = 2i.
    Complex r = pow(m, Q(-1, 2), -1);
    CHECK(rel_diff(r, Complex(Real(0L, b), Real(2L, b))) < 1e-45L);
    CHECK(Real(Q(1, 3), b).to_string(5) == "3.3333e-1");
    CHECK(Real(-1234L, b).to_string(3) == "-1.23e+3");
}

TEST_CASE("exact rational parsing") {
    CHECK(*parse_rational("1.25") == Q(5, 4));
    CHECK(*parse_rational("-3/6") == Q(-1, 2));
    CHECK(*parse_rational("2.5e-3") == Q(1, 400));
    CHECK(!parse_rational("1/0"));
    CHECK(!parse_rational("abc"));
}

TEST_CASE("rationalize") {
    int d = 60;
    mpfr_prec_t b = Prec{d}.bits();
    CHECK(*rationalize(Real(Q(1, 2), b), 10, d) == Q(1, 2));
    CHECK(*rationalize(Real(Q(1, 3), b), 10, d) == Q(1, 3));
    CHECK(!rationalize(Real(Q(3333, 10000), b), 10, d));
    // Identity on embedded exact rationals.
    std::mt19937_64 g(11);
    for (int i = 0; i < 200; ++i) {
        Q q = rand_q(g, 1000, 997);
        auto r = rationalize(Real(q, Prec{30}.bits()), 997, 30);
        REQUIRE(r);
        CHECK(*r == q);
    }
}

TEST_CASE("poly_roots") {
    int d = 40;
    mpfr_prec_t b = Prec{d}.bits();
    auto mk = [&](std::vector<long> c) {
        std::vector<Complex> v;
        for (long x : c) v.emplace_back(x, b);
        return v;
    };
    auto r1 = poly_roots(mk({-1, 0, 1}), d);
    REQUIRE(r1.size() == 2);
    CHECK(rel_diff(r1[0].z, Complex(-1L, b)) < 1e-38L);
    CHECK(rel_diff(r1[1].z, Complex(1L, b)) < 1e-38L);
    auto r2 = poly_roots(mk({0, -2, 1}), d);
    CHECK(mag(r2[0].z) < 1e-38L);
    CHECK(rel_diff(r2[1].z, Complex(2L, b)) < 1e-38L);
    // (t-1)^2 (t+2) reports a cluster of multiplicity 2.
    auto r3 = poly_roots(mk({2, -3, 0, 1}), d);
    REQUIRE(r3.size() == 3);
    CHECK(r3[0].multiplicity == 1);
    CHECK(r3[1].multiplicity == 2);
    CHECK(r3[2].multiplicity == 2);

    SUBCASE("residual invariant on random polynomials") {
        std::mt19937_64 g(5);
        for (int it = 0; it < 60; ++it) {
            int deg = 1 + static_cast<int>(g() % 10);
            std::vector<Complex> c;
            for (int i = 0; i <= deg; ++i) c.emplace_back(rand_q(g), rand_q(g), b);
            if (c.back().is_zero()) c.back() = Complex(1L, b);
            auto rs = poly_roots(c, d);
            REQUIRE(static_cast<int>(rs.size()) == deg);
            long double pn = 0;
            for (auto& x : c) pn = std::max(pn, mag(x));
            for (auto& r : rs) {
                Complex p(b);
                for (size_t i = c.size(); i-- > 0;) {
                    p *= r.z;
                    p += c[i];
                }
                long double scale = std::max(1.0L, std::pow(mag(r.z), static_cast<long double>(deg)));
                CHECK(mag(p) <= std::pow(10.0L, -d + 4) * pn * scale);
            }
        }
    }
}

TEST_CASE("roots_exact recovers rational roots") {
    // (t - 1)^2 (t - 2/3) (t^2 + 1)
    UPoly p(QG(1));
    p = p * UPoly({QG(-1), QG(1)}) * UPoly({QG(-1), QG(1)}) * UPoly({QG(Q(-2, 3)), QG(1)}) * UPoly({QG(1), QG(0), QG(1)});
    auto rs = roots_exact(p, 30);
    REQUIRE(rs.size() == 4);
    int exact = 0;
    for (auto& r : rs) {
        if (r.exact && *r.exact == QG(1)) CHECK(r.multiplicity == 2);
        if (r.exact) ++exact;
    }
    // +-i are Gaussian rationals too.
    CHECK(exact == 4);
}

TEST_CASE("univariate helpers") {
    UPoly p({QG(1), QG(2), QG(3)});
    UPoly s = p.shift(QG(Q(1, 2)));
    for (int i = -3; i <= 3; ++i) CHECK(s.eval(QG(Q(i))) == p.eval(QG(Q(i) + Q(1, 2))));
    auto sf = squarefree(UPoly({QG(-1), QG(1)}) * UPoly({QG(-1), QG(1)}) * UPoly({QG(2), QG(1)}));
    REQUIRE(sf.size() == 2);
    CHECK(sf[0].second == 1);
    CHECK(sf[1].second == 2);
    URatFun a(UPoly({QG(0), QG(1)}), UPoly({QG(0), QG(0), QG(2)}));
    CHECK(a.den == UPoly({QG(0), QG(1)}));
    CHECK(a.num == UPoly(QG(Q(1, 2))));
}

TEST_CASE("linsolve small and exact oracle") {
    int d = 40;
    mpfr_prec_t b = Prec{d}.bits();
    HMat id = HMat::identity(3, b);
    HVec v{Complex(1L, b), Complex(2L, b), Complex(3L, b)};
    auto x = linsolve(id, v, d);
    for (size_t i = 0; i < 3; ++i) CHECK(rel_diff(x[i], v[i]) == 0);
    HMat dg(2, 2, b);
    dg(0, 0) = Complex(2L, b);
    dg(1, 1) = Complex(4L, b);
    auto y = linsolve(dg, HVec{Complex(2L, b), Complex(4L, b)}, d);
    CHECK(rel_diff(y[0], Complex(1L, b)) < 1e-39L);
    CHECK(rel_diff(y[1], Complex(1L, b)) < 1e-39L);

    std::mt19937_64 g(17);
    for (int it = 0; it < 20; ++it) {
        QMat a = qmat_zero(8, 8);
        QVec rhs(8);
        for (auto& row : a)
            for (auto& e : row) e = QG(rand_q(g), rand_q(g));
        for (auto& e : rhs) e = QG(rand_q(g), rand_q(g));
        auto ex = solve(a, rhs);
        if (!inverse(a)) continue;
        REQUIRE(ex);
        HVec hb;
        for (auto& e : rhs) hb.push_back(e.to_complex(b));
        auto hx = linsolve(HMat::from_exact(a, b), hb, d);
        for (size_t i = 0; i < 8; ++i) CHECK(rel_diff(hx[i], (*ex)[i].to_complex(b)) < std::pow(10.0L, -d + 10));
    }
}

TEST_CASE("linsolve residual on 1000 random exact systems") {
    int d = 30;
    mpfr_prec_t b = Prec{d}.bits();
    std::mt19937_64 g(23);
    int solved = 0;
    for (int it = 0; it < 1000; ++it) {
        size_t m = 1 + g() % 8;
        QMat a = qmat_zero(m, m);
        for (auto& row : a)
            for (auto& e : row) e = QG(rand_q(g));
        HVec hb;
        for (size_t i = 0; i < m; ++i) hb.push_back(QG(rand_q(g)).to_complex(b));
        HMat ha = HMat::from_exact(a, b);
        try {
            auto x = linsolve(ha, hb, d);
            auto r = ha * x;
            long double res = 0;
            for (size_t i = 0; i < m; ++i) res = std::max(res, mag(r[i] - hb[i]));
            CHECK(res <= std::pow(10.0L, -d + static_cast<long double>(m)) * std::max(1.0L, ha.norm_inf() * norm_inf(x)));
            ++solved;
        } catch (const Error& e) {
            CHECK(e.kind() == "ill-conditioned solve");
            CHECK(!inverse(a));
        }
    }
    CHECK(solved > 900);
}

TEST_CASE("charpoly and nullspace") {
    QMat z = qmat_zero(2, 2);
    CHECK(charpoly(z) == UPoly({QG(0), QG(0), QG(1)}));
    CHECK(nullspace(z).size() == 2);
    QMat dg = qmat_zero(2, 2);
    dg[1][1] = QG(Q(-1, 2));
    CHECK(charpoly(dg) == UPoly({QG(0), QG(Q(1, 2)), QG(1)}));
    auto ns = nullspace(dg);
    REQUIRE(ns.size() == 1);
    CHECK(ns[0][0] == QG(1));
    CHECK(ns[0][1] == QG(0));
    // Cayley-Hamilton on random 5x5.
    std::mt19937_64 g(3);
    QMat a = qmat_zero(5, 5);
    for (auto& row : a)
        for (auto& e : row) e = QG(rand_q(g), rand_q(g));
    UPoly cp = charpoly(a);
    QMat acc = qmat_zero(5, 5), pw = qmat_identity(5);
    for (int k = 0; k <= cp.deg(); ++k) {
        for (size_t i = 0; i < 5; ++i)
            for (size_t j = 0; j < 5; ++j) acc[i][j] += cp.coef(k) * pw[i][j];
        pw = pw * a;
    }
    for (auto& row : acc)
        for (auto& e : row) CHECK(e.is_zero());
}

TEST_CASE("multivariate gcd and division") {
    std::vector<std::string> names{"a", "b", "x", "y"};
    MPoly p = parse_mpoly("(x-1)*(y+2)*(a*x+b)", names);
    MPoly q = parse_mpoly("(x-1)*(x+y)*(a*x+b)^2", names);
    MPoly g = gcd(p, q);
    CHECK(g == parse_mpoly("(x-1)*(a*x+b)", names) * (1 / parse_mpoly("(x-1)*(a*x+b)", names).lead_coef()));
    CHECK(exact_div(p, g) * g == p);
    CHECK(gcd(parse_mpoly("x^2-1", names), parse_mpoly("x*y-y", names)) == parse_mpoly("x-1", names));
    CHECK(gcd(parse_mpoly("x*y-x-y", names), parse_mpoly("x", names)).is_const());

    std::mt19937_64 rg(9);
    auto rnd = [&](int terms) {
        MPoly r;
        for (int i = 0; i < terms; ++i) {
            Exp e{};
            for (int v = 0; v < 4; ++v) e[v] = static_cast<std::uint8_t>(rg() % 3);
            r.add_term(e, rand_q(rg));
        }
        return r;
    };
    for (int it = 0; it < 15; ++it) {
        MPoly c = rnd(3), a = rnd(3), b = rnd(2);
        if (c.is_zero() || a.is_zero() || b.is_zero()) continue;
        MPoly gg = gcd(a * c, b * c);
        MPoly q1;
        CHECK(divides(c, gg * MPoly(gg.lead_coef()), nullptr) == true);
        CHECK(divides(gg, a * c, &q1));
    }
    RatFun r = parse_ratfun("(x^2-1)/(2*x-2)", names);
    CHECK(r.den == parse_mpoly("1", names));
    CHECK(r.num == parse_mpoly("x/2+1/2", names));
}

TEST_CASE("doubling precision is consistent") {
    std::mt19937_64 g(31);
    for (int it = 0; it < 20; ++it) {
        std::vector<Q> re(4), im(4);
        for (int i = 0; i < 4; ++i) {
            re[i] = rand_q(g);
            im[i] = rand_q(g);
        }
        if (sgn(re[3]) == 0) re[3] = 1;
        auto run = [&](int d) {
            std::vector<Complex> c;
            for (int i = 0; i < 4; ++i) c.emplace_back(re[i], im[i], Prec{d}.bits());
            return poly_roots(c, d);
        };
        auto lo = run(30), hi = run(60);
        for (size_t i = 0; i < lo.size(); ++i) {
            Complex h(Prec{30}.bits());
            h.set(hi[i].z);
            CHECK(rel_diff(lo[i].z, h) <= 1e-26L);
        }
    }
}
