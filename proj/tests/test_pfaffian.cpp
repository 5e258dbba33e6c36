#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <map>
#include <random>

#include "lauricella/error.hpp"
#include "lauricella/pfaffian.hpp"
#include "corpus.hpp"
#include "support.hpp"

using namespace lauricella;

TEST_CASE("FB n=2 reproduces the published matrices") {
    auto s = derive_pfaffian(Family::FB, 2);
    REQUIRE(s.M.size() == 2);
    int checked = 0;
    for (size_t r = 0; r < 4; ++r)
        for (size_t c = 0; c < 4; ++c) {
            auto mx = parse_ratfun(testing::kPaperMx[r][c], testing::kFB2Names);
            auto my = parse_ratfun(testing::kPaperMy[r][c], testing::kFB2Names);
            CHECK_MESSAGE(equal_cross(s.M[0][r][c], mx), "Mx ", r, ",", c);
            CHECK_MESSAGE(equal_cross(s.M[1][r][c], my), "My ", r, ",", c);
            checked += 2;
        }
    CHECK(checked == 32);
}

TEST_CASE("all derived systems are flat") {
    for (Family f : {Family::FA, Family::FB, Family::FD})
        for (int n = 1; n <= 3; ++n) {
            auto t0 = std::chrono::steady_clock::now();
            const auto& s = testing::symbolic_system(f, n);
            double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            MESSAGE(std::string(family_name(f)), " n=", n, " derived+checked in ", dt, " s");
            CHECK(is_flat(s));
            CHECK(s.basis.size() == theta_basis(f, n).size());
        }
}

TEST_CASE("flatness check detects a perturbation") {
    auto s = derive_pfaffian(Family::FD, 2);
    s.M[0][1][2] = s.M[0][1][2] + RatFun(MPoly::var(1));
    CHECK(!is_flat(s));
}

TEST_CASE("n = 1 systems coincide with the Gauss system") {
    // vars: x, a, b, c
    std::vector<std::string> names{"x", "a", "b", "c"};
    RatFun m10 = parse_ratfun("a*b/(1-x)", names);
    RatFun m11 = parse_ratfun("((a+b)*x-c+1)/(x*(1-x))", names);
    for (Family f : {Family::FA, Family::FB, Family::FD}) {
        auto s = derive_pfaffian(f, 1);
        CHECK(s.M[0][0][0].is_zero());
        CHECK(equal_cross(s.M[0][0][1], parse_ratfun("1/x", names)));
        CHECK(equal_cross(s.M[0][1][0], m10));
        CHECK(equal_cross(s.M[0][1][1], m11));
    }
}

TEST_CASE("annihilator ratios match the series coefficients") {
    std::mt19937_64 g(3);
    std::uniform_int_distribution<int> id(0, 7), pn(-40, 40), pd(1, 9);
    for (Family f : {Family::FA, Family::FB, Family::FD})
        for (int n = 1; n <= 3; ++n) {
            VarLayout L{f, n};
            auto ann = annihilators(f, n);
            for (int rep = 0; rep < 20; ++rep) {
                NodeParams p;
                p.family = f;
                p.n = n;
                auto rnd = [&] {
                    Q q(pn(g), pd(g));
                    q.canonicalize();
                    if (q.get_den() == 1) q += Q(1, 2);
                    return q;
                };
                size_t un = static_cast<size_t>(n);
                p.alpha.resize(f == Family::FB ? un : 1);
                p.beta.resize(un);
                p.gamma.resize(f == Family::FA ? un : 1);
                for (auto& v : p.alpha) v = rnd();
                for (auto& v : p.beta) v = rnd();
                for (auto& v : p.gamma) v = rnd();
                std::vector<int> i(un);
                for (auto& v : i) v = id(g);
                int k = rep % n;
                auto eval = [&](MPoly m) {
                    for (size_t a = 0; a < p.alpha.size(); ++a) m = m.subst(L.alpha(static_cast<int>(a)), p.alpha[a]);
                    for (size_t a = 0; a < un; ++a) m = m.subst(L.beta(static_cast<int>(a)), p.beta[a]);
                    for (size_t a = 0; a < p.gamma.size(); ++a) m = m.subst(L.gamma(static_cast<int>(a)), p.gamma[a]);
                    for (size_t a = 0; a < un; ++a) m = m.subst(L.theta(static_cast<int>(a)), Q(i[a]));
                    return m.const_value();
                };
                const auto& A = ann[static_cast<size_t>(k)];
                CHECK(Q(eval(A.P) / eval(A.Pp)) == coefficient_ratio(p, i, k));
            }
        }
}

TEST_CASE("FD n=2 with beta_2 = 0 decouples") {
    auto s2 = derive_pfaffian(Family::FD, 2);
    auto s1 = derive_pfaffian(Family::FD, 1);
    VarLayout L2{Family::FD, 2}, L1{Family::FD, 1};
    // rename n=1 variables (x1, a, b1, c) into the n=2 layout
    auto lift = [&](const MPoly& p) {
        MPoly r;
        for (const auto& [e, c] : p.terms()) {
            Exp f{};
            f[L2.x(0)] = e[L1.x(0)];
            f[L2.alpha()] = e[L1.alpha()];
            f[L2.beta(0)] = e[L1.beta(0)];
            f[L2.gamma()] = e[L1.gamma()];
            r.add_term(f, c);
        }
        return r;
    };
    for (size_t r = 0; r < 2; ++r)
        for (size_t c = 0; c < 2; ++c) {
            const RatFun& e = s2.M[0][r][c];
            RatFun sub(e.num.subst(L2.beta(1), Q(0)), e.den.subst(L2.beta(1), Q(0)));
            RatFun ref(lift(s1.M[0][r][c].num), lift(s1.M[0][r][c].den));
            CHECK(equal_cross(sub, ref));
        }
}

TEST_CASE("polar structure: x_k M_k is regular at x_k = 0") {
    for (Family f : {Family::FA, Family::FB, Family::FD})
        for (int n = 1; n <= 3; ++n) {
            const auto& s = testing::symbolic_system(f, n);
            for (int k = 0; k < n; ++k)
                for (const auto& row : s.M[static_cast<size_t>(k)])
                    for (const auto& e : row) {
                        if (e.is_zero()) continue;
                        RatFun c = e * RatFun(MPoly::var(k));
                        CHECK(!c.den.subst(k, Q(0)).is_zero());
                    }
        }
}

TEST_CASE("substitution") {
    auto s = derive_pfaffian(Family::FB, 2);
    NodeParams p;
    p.family = Family::FB;
    p.n = 2;
    p.alpha = {Q(1), Q(1, 3)};
    p.beta = {Q(1), Q(2, 5)};
    p.gamma = {Q(2)};
    auto t = substitute(s, p);
    CHECK(equal_cross(t.M[0][1][0], parse_ratfun("-1/(x-1)", testing::kFB2Names)));
    CHECK(LinearForm(Q(1), Q(2)).at(Q(1, 100)) == Q(51, 50));
    auto u = substitute(s, p, {Q(4, 3), std::nullopt});
    for (const auto& row : u.M[1])
        for (const auto& e : row) {
            CHECK(!e.num.uses(0));
            CHECK(!e.den.uses(0));
        }
    // the x y - x - y denominator becomes y/3 - 4/3
    CHECK(equal_cross(u.M[1][3][1], parse_ratfun("-(2/15)*(4/3-1)/(y/3-4/3)", testing::kFB2Names)));
    // a frozen value on the singular locus of an entry denominator is rejected
    CHECK_THROWS_AS(substitute(s, p, {std::nullopt, Q(0)}), Error);
}

TEST_CASE("json round trip and cache") {
    auto s = derive_pfaffian(Family::FA, 2);
    auto back = system_from_json(system_to_json(s));
    CHECK(back.basis == s.basis);
    for (size_t k = 0; k < 2; ++k)
        for (size_t r = 0; r < 4; ++r)
            for (size_t c = 0; c < 4; ++c) {
                CHECK(back.M[k][r][c].num == s.M[k][r][c].num);
                CHECK(back.M[k][r][c].den == s.M[k][r][c].den);
            }
    CHECK(system_to_json(back) == system_to_json(s));
    auto dir = std::filesystem::temp_directory_path() / "lauricella_cache_test";
    std::filesystem::remove_all(dir);
    auto a = load_or_derive(Family::FA, 2, dir.string());
    auto b = load_or_derive(Family::FA, 2, dir.string());
    CHECK(system_to_json(a) == system_to_json(b));
    CHECK(std::filesystem::exists(dir / "pfaffian_FA_2_v1.json"));
    std::filesystem::remove_all(dir);
}
