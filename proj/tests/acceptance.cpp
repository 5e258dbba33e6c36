// Acceptance runner: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "corpus.hpp"
#include "lauricella/cli.hpp"
#include "lauricella/error.hpp"
#include "lauricella/pfaffian.hpp"

using namespace lauricella;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string sci(long double x) {
    char b[32];
    std::snprintf(b, sizeof b, "%.2Le", x);
    return b;
}

// |a - b| within 10^-d relative to max(1, |b|), the precision contract
bool agrees(const Complex& a, const Complex& b, int d) {
    return mag(a - b) <= std::pow(10.0L, -static_cast<long double>(d)) * std::max(1.0L, mag(b));
}

EvalRequest request(const FunctionSpec& s, int k, int d) {
    EvalRequest r;
    r.spec = s;
    r.order = k;
    r.digits = d;
    return r;
}

bool is_domain_error(const Error& e) { return e.code() == ErrorCode::math_domain; }

Outcome pfaffian_golden() {
    auto s = derive_pfaffian(Family::FB, 2);
    int bad = 0;
    for (size_t r = 0; r < 4; ++r)
        for (size_t c = 0; c < 4; ++c) {
            bad += !equal_cross(s.M[0][r][c], parse_ratfun(testing::kPaperMx[r][c], testing::kFB2Names));
            bad += !equal_cross(s.M[1][r][c], parse_ratfun(testing::kPaperMy[r][c], testing::kFB2Names));
        }
    return {bad == 0, std::to_string(32 - bad) + "/32 entries equal"};
}

Outcome flatness() {
    int flat = 0;
    std::string slow;
    for (Family f : {Family::FA, Family::FB, Family::FD})
        for (int n = 1; n <= 3; ++n) {
            auto t0 = Clock::now();
            flat += is_flat(derive_pfaffian(f, n));
            char b[48];
            std::snprintf(b, sizeof b, " %s%d %.2fs", family_name(f), n, since(t0));
            slow += b;
        }
    return {flat == 9, std::to_string(flat) + "/9 flat;" + slow};
}

Outcome in_domain_oracle() {
    std::mt19937_64 g(3003);
    int ok = 0, total = 0, skipped = 0;
    long double worst = 0;
    std::string first_bad;
    while (total < 100) {
        Family f = static_cast<Family>(total % 3);
        int n = 1 + (total / 3) % 3;
        FunctionSpec s = testing::in_domain_spec(g, f, n);
        LaurentResult r;
        try {
            r = evaluate(request(s, 3, 30));
        } catch (const Error& e) {
            // a point on a singular locus of the system is outside the contract
            if (!is_domain_error(e)) throw;
            ++skipped;
            continue;
        }
        auto want = eps_series_oracle(s, 3, 45);
        bool good = true;
        for (size_t m = 0; m < 3; ++m) {
            good = good && agrees(r.coefficients[m], want[m], 30);
            worst = std::max(worst, mag(r.coefficients[m] - want[m]) / std::max(1.0L, mag(want[m])));
        }
        ok += good;
        if (!good && first_bad.empty()) first_bad = s.to_string();
        ++total;
    }
    std::string d = std::to_string(ok) + "/100 agree, worst rel " + sci(worst);
    if (skipped) d += ", " + std::to_string(skipped) + " redrawn (singular locus)";
    if (!first_bad.empty()) d += ", first failure " + first_bad;
    return {ok == 100, d};
}

Outcome gauss_log() {
    int ok = 0, total = 0;
    for (int d : {30, 60}) {
        mpfr_prec_t bits = Prec{d + 20}.bits();
        for (QG z : {QG(Q(4, 3)), QG(3), QG(-2), QG(Q(2), Q(1))}) {
            auto r = evaluate(request(testing::gauss(Q(1), Q(1), Q(2), z), 1, d));
            Complex zc = z.to_complex(bits);
            // z - i0 puts 1 - z above its cut
            Complex want = -log(Complex(1L, bits) - zc, 1) / zc;
            ok += agrees(r.coefficients[0], want, d);
            ++total;
            if (sgn(z.im) == 0 && z.re > 1) {
                EvalRequest up = request(testing::gauss(Q(1), Q(1), Q(2), z), 1, d);
                up.options.delta_sign = 1;
                auto c = evaluate(up).coefficients[0];
                Complex conj(r.coefficients[0].re, -r.coefficients[0].im);
                ok += agrees(c, conj, d);
                ++total;
            }
        }
    }
    return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " values and conjugates"};
}

Outcome dilog_identity() {
    int ok = 0;
    long double worst = 0;
    mpfr_prec_t bits = Prec{60}.bits();
    for (Q z : {Q(1, 2), Q(-1), Q(4, 3)}) {
        FunctionSpec s = testing::gauss(Q(0), Q(0), Q(1), QG(z));
        s.alpha[0] = LinearForm(Q(0), Q(1));
        s.beta[0] = LinearForm(Q(0), Q(-1));
        auto r = evaluate(request(s, 3, 30));
        std::vector<Complex> want{Complex(1L, bits), Complex(bits), Complex(bits) - testing::li2(z, bits)};
        bool good = true;
        for (size_t m = 0; m < 3; ++m) {
            good = good && mag(r.coefficients[m] - want[m]) <= 1e-30L;
            worst = std::max(worst, mag(r.coefficients[m] - want[m]));
        }
        ok += good;
    }
    return {ok == 3, std::to_string(ok) + "/3 points, worst " + sci(worst)};
}

Outcome reductions() {
    int ok = 0, total = 0;
    auto compare = [&](const FunctionSpec& a, const FunctionSpec& b) {
        auto ra = evaluate(request(a, 3, 30)), rb = evaluate(request(b, 3, 30));
        bool good = true;
        for (size_t m = 0; m < 3; ++m) good = good && agrees(ra.coefficients[m], rb.coefficients[m], 30);
        ok += good;
        ++total;
    };
    // F_D with beta_2 = 0 is 2F1 in x_1, whatever x_2 is
    for (QG x2 : {QG(Q(7, 4)), QG(Q(-1, 2))}) {
        FunctionSpec fd = parse_expression("LauricellaFD[1/2-ep, {1, 0}, 1+2*ep, {4/3, 0}]");
        fd.args[1] = x2;
        compare(fd, parse_expression("Hypergeometric2F1[1/2-ep, 1, 1+2*ep, 4/3]"));
    }
    // x_n = 0 drops the last variable, for every family and n = 3 -> 2 -> 1
    const char* full[] = {
        "LauricellaFA[1/3+ep, {2/5-ep, 3/7, 1/2+2*ep}, {5/3+ep, 7/4, 9/5-ep}, {-2, 1/3, 0}]",
        "LauricellaFB[{1/3+ep, 2/5, 3/4-ep}, {2/5-ep, 3/7, 1/2+2*ep}, 5/3+ep, {-2, 1/3, 0}]",
        "LauricellaFD[1/3+ep, {2/5-ep, 3/7, 1/2+2*ep}, 5/3+ep, {-2, 1/3, 0}]",
    };
    for (const char* text : full) {
        FunctionSpec s3 = parse_expression(text);
        compare(s3, s3.reduced({0, 1}));
        FunctionSpec s2 = s3.reduced({0, 1});
        s2.args[1] = QG();
        compare(s2, s2.reduced({0}));
    }
    return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " reductions agree to 1e-30"};
}

Outcome path_independence() {
    std::mt19937_64 g(7007);
    int ok = 0, total = 0, skipped = 0;
    long double worst_ratio = 0;
    while (total < 20) {
        Family f = static_cast<Family>(total % 3);
        int n = 2 + total % 2;
        FunctionSpec s = testing::outside_real_spec(g, f, n, true);
        EvalRequest a = request(s, 3, 30), b = a;
        b.options.simple_continuation = true;
        LaurentResult ra, rb;
        try {
            ra = evaluate(a);
            rb = evaluate(b);
        } catch (const Error& e) {
            if (!is_domain_error(e)) throw;
            ++skipped;
            continue;
        }
        bool good = true;
        for (size_t m = 0; m < 3; ++m) {
            long double diff = mag(ra.coefficients[m] - rb.coefficients[m]), tol = ra.errors[m] + rb.errors[m];
            good = good && diff <= tol;
            worst_ratio = std::max(worst_ratio, diff / tol);
        }
        ok += good;
        ++total;
    }
    std::string d = std::to_string(ok) + "/20 within the combined error, worst diff/error " + sci(worst_ratio);
    if (skipped) d += ", " + std::to_string(skipped) + " redrawn (singular locus)";
    return {ok == 20, d};
}

// Reference run with two more node pairs and 20 more digits, the step chosen
// by the same rule as the production design. Working digits never drop below
// what the production run needed after its reruns.
LatticeDesign refined(const LaurentResult& r, int k, int d) {
    int n = r.lattice.half_count + 2, half = k / 2, target = d + 20 + 5;
    int e = (target + 2 * n - 2 * half - 1) / (2 * n - 2 * half);
    LatticeDesign out;
    out.lattice = make_lattice(e, n);
    out.d_work = std::max(d + 20 + std::max(20, 2 * k * e), r.d_work + 20);
    return out;
}

Outcome estimate_honesty() {
    std::mt19937_64 g(8008);
    int within = 0, drift_within = 0, accurate = 0, total = 0, skipped = 0;
    while (total < 200) {
        Family f = static_cast<Family>(g() % 3);
        int n = 1 + static_cast<int>(g() % 3);
        FunctionSpec s = g() % 2 ? testing::in_domain_spec(g, f, n) : testing::outside_real_spec(g, f, n, false);
        int k = 1 + static_cast<int>(g() % 4);
        EvalRequest req = request(s, k, 30);
        LaurentResult r, ref;
        try {
            r = evaluate(req);
            ref = evaluate_on(req, refined(r, k, 30));
        } catch (const Error& e) {
            if (!is_domain_error(e)) throw;
            ++skipped;
            continue;
        }
        long double move = 0;
        bool drift_ok = r.drift.size() == static_cast<size_t>(k), acc = true;
        for (size_t m = 0; m < static_cast<size_t>(k); ++m) {
            long double dm = mag(r.coefficients[m] - ref.coefficients[m]);
            move = std::max(move, dm);
            drift_ok = drift_ok && dm <= r.drift[m];
            acc = acc && agrees(r.coefficients[m], ref.coefficients[m], 30);
        }
        within += move < r.estimate;
        drift_within += drift_ok;
        accurate += acc;
        ++total;
    }
    std::string d = std::to_string(within) + "/200 moves below the reported estimate (need 190); for reference: " +
                    std::to_string(drift_within) + "/200 below the drift diagnostic, " + std::to_string(accurate) +
                    "/200 within 1e-30 relative";
    if (skipped) d += ", " + std::to_string(skipped) + " redrawn (singular locus)";
    return {within >= 190, d};
}

Outcome paper_benchmarks() {
    bool all = true;
    std::string d;
    for (const auto& b : bench_suite()) {
        FunctionSpec s = parse_expression(b.expression);
        auto t0 = Clock::now();
        auto r30 = evaluate(request(s, 3, 30));
        double secs = since(t0);
        auto r60 = evaluate(request(s, 3, 60));
        long double worst = 0;
        bool stable = true;
        for (size_t m = 0; m < 3; ++m) {
            long double dm = mag(r30.coefficients[m] - r60.coefficients[m]);
            stable = stable && dm <= r30.errors[m];
            worst = std::max(worst, dm / r30.errors[m]);
        }
        bool good = secs < 300 && stable;
        all = all && good;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s%s %.1fs, d=60 move/error %s%s", d.empty() ? "" : "; ", b.name.c_str(), secs,
                      sci(worst).c_str(), good ? "" : " (FAIL)");
        d += buf;
    }
    return {all, d};
}

Outcome timing_linearity() {
    FunctionSpec s = parse_expression(bench_suite()[0].expression);
    std::vector<double> ks, ts;
    std::string d;
    for (int k = 1; k <= 8; ++k) {
        EvalRequest req = request(s, k, 30);
        req.options.threads = 1;
        double best = 1e300;
        // best of three: the minimum is the least noisy statistic of wall time
        for (int rep = 0; rep < 3; ++rep) {
            auto t0 = Clock::now();
            evaluate(req);
            best = std::min(best, since(t0));
        }
        ks.push_back(k);
        ts.push_back(best);
        char b[32];
        std::snprintf(b, sizeof b, "%s%.2f", k == 1 ? "" : " ", best);
        d += b;
    }
    double slope = 0, r2 = linear_fit_r2(ks, ts, &slope);
    char b[96];
    std::snprintf(b, sizeof b, "R^2 = %.3f, slope %.3f s per order; times", r2, slope);
    return {r2 >= 0.9, std::string(b) + " " + d};
}

Outcome determinism() {
    FunctionSpec s = parse_expression(bench_suite()[2].expression);
    std::set<std::string> seen;
    for (int threads : {1, 4, 0}) {
        EvalRequest req = request(s, 3, 30);
        req.options.threads = threads;
        auto rec = output_record("", req, evaluate(req), false);
        seen.insert(rec["result"].dump());
    }
    return {seen.size() == 1, seen.size() == 1 ? "threads 1, 4, all: identical" : "outputs differ"};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::vector<int> only;
    std::vector<int> expected_fail;
    app.add_option("--only", only, "run only these criteria");
    app.add_option("--expect-fail", expected_fail, "criteria whose FAIL does not change the exit code");
    CLI11_PARSE(app, argc, argv);

    struct Criterion {
        int id;
        const char* name;
        double budget;  // seconds
        std::function<Outcome()> run;
    };
    std::vector<Criterion> all = {
        {1, "FB n=2 Pfaffian matches the published matrices", 1, pfaffian_golden},
        {2, "all nine derived systems are flat", 10, flatness},
        {3, "100 in-domain cases match the direct oracle to 1e-30", 600, in_domain_oracle},
        {4, "2F1(1,1;2;z) continuations match -ln(1-z)/z at d=30,60", 60, gauss_log},
        {5, "2F1(eps,-eps;1;z) = 1 - Li2(z) eps^2", 60, dilog_identity},
        {6, "reductions (beta_2 = 0, x_n = 0)", 120, reductions},
        {7, "simple continuation vs multi-leg on 20 real cases", 600, path_independence},
        {8, "reported estimate bounds the (d+20, n+2) rerun in >= 95% of 200 cases", 3600, estimate_honesty},
        {9, "paper benchmarks at k=3, d=30 in < 5 min, stable at d=60", 900, paper_benchmarks},
        {10, "F1 time vs k = 1..8 is linear (R^2 >= 0.9)", 600, timing_linearity},
        {11, "thread counts 1, 4, all give identical output", 60, determinism},
    };

    int failed = 0, unexpected = 0;
    for (const auto& c : all) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = since(t0);
        bool in_time = secs <= c.budget;
        bool pass = o.pass && in_time;
        if (!in_time) o.detail += "; over the " + std::to_string(static_cast<int>(c.budget)) + " s budget";
        std::printf("%s %2d  %s  [%.1f s]  %s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
        std::fflush(stdout);
        if (!pass) {
            ++failed;
            if (std::find(expected_fail.begin(), expected_fail.end(), c.id) == expected_fail.end()) ++unexpected;
        }
    }
    std::printf("%d criteria failed, %d unexpectedly\n", failed, unexpected);
    return unexpected ? 1 : 0;
}
