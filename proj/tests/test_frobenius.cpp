#include <doctest.h>

#include <random>

#include "lauricella/error.hpp"
#include "lauricella/frobenius.hpp"
#include "support.hpp"

using namespace lauricella;
using testing::gauss;
using testing::node_system;

namespace {

constexpr int kDigits = 50;
const mpfr_prec_t kBits = Prec{kDigits}.bits();

LocalSystem scalar_system(UPoly P, UPoly D) {
    LocalSystem ls;
    ls.D = std::move(D);
    ls.P = {{std::move(P)}};
    return ls;
}

Leg line_leg(std::vector<QG> kappa) {
    Leg leg;
    for (size_t i = 0; i < kappa.size(); ++i) {
        leg.active.push_back(static_cast<int>(i));
        leg.anchor.emplace_back();
    }
    leg.kappa = std::move(kappa);
    leg.t_end = QG(1);
    return leg;
}

LocalSystem gauss_line(Q a, Q b, Q c) {
    return restrict_system(node_system(gauss(a, b, c, QG(Q(1, 2))), Q(0)), line_leg({QG(1)}), kDigits);
}

Complex cx(const Q& re, const Q& im = Q(0)) { return Complex(re, im, kBits); }

HVec column(const HMat& U, const HVec& C) { return U * C; }

HMat mt_at(const LocalSystem& ls, const Complex& t) {
    size_t B = ls.dim();
    HMat m(B, B, kBits);
    Complex d = ls.D.eval(t);
    for (size_t i = 0; i < B; ++i)
        for (size_t j = 0; j < B; ++j) m(i, j) = ls.P[i][j].eval(t) / d;
    return m;
}

// |U'(t) - M(t) U(t)| by a central difference at high precision.
long double residual(const FrobeniusSolution& sol, const LocalSystem& ls, const Complex& t) {
    Real h(1L, kBits);
    mpfr_div_2ui(h.get(), h.get(), 60, MPFR_RNDN);
    Complex hc(h, Real(0L, kBits));
    HMat up = evaluate(sol, t + hc).U, um = evaluate(sol, t - hc).U, u = evaluate(sol, t).U;
    HMat mu = mt_at(ls, t) * u;
    long double r = 0;
    Complex two_h = hc * Complex(2L, kBits);
    for (size_t i = 0; i < u.rows(); ++i)
        for (size_t j = 0; j < u.cols(); ++j) r = std::max(r, mag((up(i, j) - um(i, j)) / two_h - mu(i, j)));
    return r / std::max(1.0L, u.norm_inf());
}

}  // namespace

TEST_CASE("choose_truncation") {
    CHECK(choose_truncation(0.75L, 60) == 501);
    CHECK(choose_truncation(0.5L, 60) == 220);
    CHECK(choose_truncation(0.75L, 120) > 2 * choose_truncation(0.75L, 60) - 30);
    CHECK_THROWS(choose_truncation(0.8L, 30));
}

TEST_CASE("exponent classes") {
    auto mat = [](Q a, Q b) { return QMat{{QG(0), QG(1)}, {QG(0), QG(a)}}; };
    (void)mat;
    auto two = [](Q e1, Q e2) { return QMat{{QG(e1), QG(1)}, {QG(0), QG(e2)}}; };
    auto a = exponents(two(Q(0), Q(-1, 2)));
    CHECK(a.classes.size() == 2);
    auto b = exponents(two(Q(0), Q(0)));
    REQUIRE(b.classes.size() == 1);
    CHECK(b.classes[0].size == 2);
    CHECK(b.classes[0].base == 0);
    auto c = exponents(two(Q(0), Q(-2)));
    REQUIRE(c.classes.size() == 1);
    CHECK(c.classes[0].base == -2);
    CHECK(c.classes[0].max_offset == 2);
    // eigenvalues with large denominators stay exact
    auto d = exponents(two(Q(3, 7) * Q(1, 1000000000) * Q(1, 1000000000), Q(1, 3)));
    CHECK(d.eigenvalues[0] == Q(3, 7) * Q(1, 1000000000) * Q(1, 1000000000));
    // irrational spectrum
    QMat irr{{QG(0), QG(1)}, {QG(2), QG(0)}};
    CHECK_THROWS_AS(exponents(irr), Error);
}

TEST_CASE("local data of the Gauss system at the origin") {
    Q gam(3, 2);
    auto ls = gauss_line(Q(1, 3), Q(2, 7), gam);
    auto ld = local_data(ls, QG(), 10, kDigits, 4);
    CHECK(ld.singular);
    auto ex = exponents(ld.A0);
    CHECK(ex.eigenvalues == std::vector<Q>{Q(1) - gam, Q(0)});
    // ordinary point: no residue
    auto lo = local_data(ls, QG(Q(1, 2)), 5, kDigits, 2);
    CHECK_FALSE(lo.singular);
    for (auto& row : lo.A0)
        for (auto& v : row) CHECK(v.is_zero());
    // B_0 is the finite part of M at the origin (exact vs numeric)
    HMat b0 = HMat::from_exact(ld.Bexact[0], kBits);
    for (size_t i = 0; i < 2; ++i)
        for (size_t j = 0; j < 2; ++j) CHECK(mag(b0(i, j) - ld.B[0](i, j)) < 1e-40L);
    // exponents do not depend on the scale of kappa
    auto scaled = restrict_system(node_system(gauss(Q(1, 3), Q(2, 7), gam, QG(Q(1, 2))), Q(0)), line_leg({QG(3)}), kDigits);
    CHECK(exponents(local_data(scaled, QG(), 2, kDigits, 1).A0).eigenvalues == ex.eigenvalues);
}

TEST_CASE("scalar Frobenius series and branches") {
    auto ls = scalar_system(UPoly(QG(Q(-1, 2))), UPoly(std::vector<QG>{QG(0), QG(1)}));
    auto ld = local_data(ls, QG(), 30, kDigits, 2);
    auto sol = frobenius_series(ld, exponents(ld.A0), 30, kDigits);
    REQUIRE(sol.classes.size() == 1);
    CHECK(sol.classes[0].lambda == Q(-1, 2));
    CHECK(mag(evaluate(sol, cx(Q(1, 4))).U(0, 0) / sol.classes[0].X[0][0](0, 0) - cx(2)) < 1e-45L);
    // t = -1/4 approached from below: t^{-1/2} = exp(-(ln(1/4) - i pi)/2) = 2i
    Complex below = evaluate(sol, cx(Q(-1, 4)), -1).U(0, 0) / sol.classes[0].X[0][0](0, 0);
    CHECK(mag(below - cx(0, 2)) < 1e-45L);
    Complex above = evaluate(sol, cx(Q(-1, 4)), 1).U(0, 0) / sol.classes[0].X[0][0](0, 0);
    CHECK(mag(above - cx(0, -2)) < 1e-45L);
}

TEST_CASE("Taylor fundamental matrix") {
    // M = 1: U = exp(t - c)
    auto ls = scalar_system(UPoly(QG(1)), UPoly(QG(1)));
    auto ld = local_data(ls, QG(Q(1, 3)), 40, kDigits);
    auto sol = taylor_fundamental(ld, 40, kDigits);
    Q fact(1);
    for (int n = 0; n <= 10; ++n) {
        if (n) fact *= n;
        CHECK(mag(sol.classes[0].X[static_cast<size_t>(n)][0](0, 0) - cx(1 / fact)) < 1e-45L);
    }
    auto at = evaluate(sol, cx(0));
    CHECK(mag(at.U(0, 0) - cx(1)) == 0);
    // M = 0
    auto zero = scalar_system(UPoly(), UPoly(QG(1)));
    auto z = taylor_fundamental(local_data(zero, QG(), 10, kDigits), 10, kDigits);
    CHECK(mag(evaluate(z, cx(Q(7, 3))).U(0, 0) - cx(1)) == 0);
}

TEST_CASE("Gauss at an ordinary point matches the series oracle") {
    Q a(1, 3), b(2, 7), c(3, 2);
    auto ls = gauss_line(a, b, c);
    auto p = NodeParams::at(gauss(a, b, c, QG(1)), Q(0));
    HVec j0 = sum_series(p, {QG(Q(1, 2))}, kDigits);
    HVec want = sum_series(p, {QG(Q(3, 5))}, kDigits);
    int N = choose_truncation(0.2L, kDigits);
    auto ld = local_data(ls, QG(Q(1, 2)), N, kDigits);
    auto ref = evaluate(taylor_fundamental(ld, N, kDigits), cx(Q(1, 10)));
    HVec via_ref = column(ref.U, j0);
    auto sh = shift_system(ls, QG(Q(1, 2)));
    auto prod = taylor_step(sh, j0, cx(Q(1, 10)), N, kDigits);
    CHECK(testing::max_rel_diff(via_ref, want) < 1e-45L);
    CHECK(testing::max_rel_diff(prod.value, want) < 1e-45L);
    CHECK(testing::max_rel_diff(prod.value, via_ref) < 1e-46L);
    CHECK(prod.tail < 1e-45L);
}

TEST_CASE("matched Frobenius solutions at the origin") {
    struct Case {
        Q a, b, c;
    };
    // non-resonant, resonant with a pole (c = 2) and logarithmic (c = 1)
    for (Case k : {Case{Q(1, 3), Q(2, 7), Q(3, 2)}, Case{Q(1), Q(1), Q(2)}, Case{Q(1, 3), Q(2, 7), Q(1)}}) {
        auto ls = gauss_line(k.a, k.b, k.c);
        int N = 160;
        auto ld = local_data(ls, QG(), N, kDigits, 4);
        auto sol = frobenius_series(ld, exponents(ld.A0), N, kDigits);
        auto p = NodeParams::at(gauss(k.a, k.b, k.c, QG(1)), Q(0));
        HVec at_half = sum_series(p, {QG(Q(1, 2))}, kDigits);
        auto U = evaluate(sol, cx(Q(1, 2)));
        HVec C = linsolve(U.U, at_half, kDigits);
        HVec got = column(evaluate(sol, cx(Q(3, 10))).U, C);
        HVec want = sum_series(p, {QG(Q(3, 10))}, kDigits);
        CHECK(testing::max_rel_diff(got, want) < 1e-40L);
        CHECK(residual(sol, ls, cx(Q(2, 5), Q(1, 10))) < 1e-30L);
        if (k.c == 2) {
            // -ln(1-t)/t: Taylor coefficients 1/(n+1) of the first component
            const auto& cs = sol.classes[0];
            REQUIRE(cs.lambda == -1);
            for (int n = 0; n < 20; ++n) {
                Complex coef(kBits);
                Real t(kBits);
                for (size_t f = 0; f < C.size(); ++f) mul_add(coef, cs.X[static_cast<size_t>(n + 1)][0](0, f), C[f], t);
                CHECK(mag(coef - cx(Q(1, n + 1))) < 1e-40L);
            }
        }
    }
}

TEST_CASE("analytic origin step equals the defining series") {
    FunctionSpec s;
    s.family = Family::FD;
    s.n = 2;
    s.alpha = {LinearForm(Q(1, 2))};
    s.beta = {LinearForm(Q(1)), LinearForm(Q(1, 5))};
    s.gamma = {LinearForm(Q(3, 2))};
    s.args = {QG(Q(1, 2)), QG(Q(1, 3))};
    auto leg = line_leg({QG(Q(1, 2)), QG(Q(1, 3))});
    auto ls = restrict_system(node_system(s, Q(0)), leg, kDigits);
    auto p = NodeParams::at(s, Q(0));
    auto ex = line_taylor_exact(p, leg.kappa, 2);
    std::vector<HVec> v;
    for (auto& row : ex) {
        HVec h;
        for (auto& q : row) h.push_back(q.to_complex(kBits));
        v.push_back(h);
    }
    auto sh = shift_system(ls, QG());
    auto r = analytic_origin_step(sh, v, cx(1), choose_truncation(0.5L, kDigits), kDigits);
    HVec want = sum_series(p, s.args, kDigits);
    CHECK(testing::max_rel_diff(r.value, want) < 1e-45L);
    CHECK(resonant_orders(sh).empty());
}

TEST_CASE("doubling the truncation stays within the tail estimate") {
    std::mt19937_64 g(11);
    int checked = 0;
    for (int it = 0; it < 100; ++it) {
        Q a = testing::rparam(g), b = testing::rparam(g), c = testing::rparam(g);
        auto ls = gauss_line(a, b, c);
        QG c0(Q(1, 2), testing::rq(g, 1, 4));
        auto sh = shift_system(ls, c0);
        HVec j0{cx(1), cx(Q(1, 3))};
        Complex ds = cx(Q(1, 5), Q(1, 10));
        int N = choose_truncation(0.5L, 30);
        auto r1 = taylor_step(sh, j0, ds, N / 3, 30);
        auto r2 = taylor_step(sh, j0, ds, 2 * N, 30);
        long double diff = 0;
        for (size_t i = 0; i < 2; ++i) diff = std::max(diff, mag(r1.value[i] - r2.value[i]));
        CHECK(diff <= r1.tail + 1e-28L * r1.peak);
        ++checked;
    }
    CHECK(checked == 100);
}
