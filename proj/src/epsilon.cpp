#include "lauricella/epsilon.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

#include "lauricella/error.hpp"

namespace lauricella {

EpsilonLattice make_lattice(int e, int half_count) {
    EpsilonLattice L;
    L.e = e;
    L.half_count = half_count;
    mpz_class ten;
    mpz_ui_pow_ui(ten.get_mpz_t(), 10, static_cast<unsigned long>(e));
    L.h = Q(1) / Q(ten);
    for (int j = half_count; j >= 1; --j) L.nodes.push_back(-L.h * j);
    for (int j = 1; j <= half_count; ++j) L.nodes.push_back(L.h * j);
    return L;
}

LatticeDesign design_lattice(int k, int d, int /*p*/, const FunctionSpec& spec, int internal_precision) {
    if (k < 1 || d < 1) throw Error(ErrorCode::usage, "invalid order or precision", "need k >= 1 and d >= 1");
    for (const LinearForm& g : spec.gamma)
        if (!g.depends_on_eps() && g.a.get_den() == 1 && sgn(g.a) <= 0)
            throw Error(ErrorCode::math_domain, "undefined function",
                        "lower parameter " + q_to_string(g.a) + " is a non-positive integer for every eps");
    const int half = k / 2;
    const int target = d + 5;
    // Largest step exponent worth trying first: interpolation loses about e
    // digits per extracted order, so e shrinks as k grows.
    const int e_max = std::max(1, 10 / k);
    int n = half + 1;
    while ((2 * n - 2 * half) * e_max < target) ++n;
    n = std::min(n, k + 3);
    n = std::max(n, half + 1);
    int e = (target + (2 * n - 2 * half) - 1) / (2 * n - 2 * half);
    for (;; ++e) {
        EpsilonLattice L = make_lattice(e, n);
        bool clash = false;
        for (const Q& eps : L.nodes) clash = clash || NodeParams::at(spec, eps).degenerate();
        if (clash) continue;
        LatticeDesign out;
        out.lattice = std::move(L);
        out.d_work = internal_precision > 0 ? internal_precision : d + std::max(20, 2 * k * e);
        return out;
    }
}

std::vector<NodeOutput> evaluate_all_nodes(const PathPlan& plan, const std::vector<Q>& nodes, const Options& opt,
                                           int d_work, const std::string& cache_dir, std::vector<double>* seconds,
                                           bool want_geometry) {
    size_t count = nodes.size();
    std::vector<NodeOutput> out(count);
    std::vector<std::exception_ptr> failure(count);
    std::vector<double> secs(count, 0);
    unsigned workers = opt.threads > 0 ? static_cast<unsigned>(opt.threads) : std::thread::hardware_concurrency();
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (size_t i = next++; i < count; i = next++) {
            auto t0 = std::chrono::steady_clock::now();
            try {
                out[i] = transport_node(plan, nodes[i], opt, d_work, cache_dir, want_geometry && i == 0);
            } catch (...) {
                failure[i] = std::current_exception();
            }
            secs[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (auto& f : failure)
        if (f) std::rethrow_exception(f);
    if (seconds) *seconds = std::move(secs);
    return out;
}

std::vector<std::vector<Q>> lagrange_weights(const std::vector<Q>& nodes, int k) {
    size_t M = nodes.size();
    if (k > static_cast<int>(M)) throw Error(ErrorCode::internal, "lattice too small", std::to_string(M) + " nodes for k = " + std::to_string(k));
    std::vector<std::vector<Q>> w(static_cast<size_t>(k), std::vector<Q>(M));
    for (size_t j = 0; j < M; ++j) {
        // prod_{i != j} (eps - eps_i), low order first
        std::vector<Q> poly{Q(1)};
        Q denom(1);
        for (size_t i = 0; i < M; ++i) {
            if (i == j) continue;
            std::vector<Q> next(poly.size() + 1);
            for (size_t c = 0; c < poly.size(); ++c) {
                next[c + 1] += poly[c];
                next[c] -= poly[c] * nodes[i];
            }
            poly = std::move(next);
            denom *= nodes[j] - nodes[i];
        }
        for (int m = 0; m < k; ++m) w[static_cast<size_t>(m)][j] = poly[static_cast<size_t>(m)] / denom;
    }
    return w;
}

long double estimate_error(const EpsilonLattice& lattice, int k, const std::vector<long double>& node_errors) {
    long double lat = std::pow(10.0L, -static_cast<long double>(lattice.e) * lattice.error_exponent(k));
    long double frob = 0;
    for (auto e : node_errors) frob = std::max(frob, e);
    return std::max(lat, frob);
}

LaurentResult reconstruct_laurent(const std::vector<Complex>& f, const std::vector<long double>& f_err, int p, int k,
                                  const EpsilonLattice& lattice, int d_work) {
    const auto& nodes = lattice.nodes;
    if (f.size() != nodes.size() || f_err.size() != nodes.size())
        throw std::logic_error("reconstruct_laurent: one value per node expected");
    mpfr_prec_t bits = Prec{d_work}.bits();
    auto w = lagrange_weights(nodes, k);

    // g = f eps^p; its absolute error scales the same way
    std::vector<Complex> g;
    std::vector<long double> g_err;
    for (size_t j = 0; j < nodes.size(); ++j) {
        Q s(1);
        for (int i = 0; i < p; ++i) s *= nodes[j];
        g.push_back(f[j] * Complex(s, Q(0), bits));
        g_err.push_back(f_err[j] * static_cast<long double>(std::fabs(s.get_d())));
    }

    LaurentResult r;
    r.pole_order = p;
    r.lattice = lattice;
    r.d_work = d_work;
    long double lat = std::pow(10.0L, -static_cast<long double>(lattice.e) * lattice.error_exponent(k));
    Real t(bits);
    for (int m = 0; m < k; ++m) {
        Complex c(bits);
        long double prop = 0;
        for (size_t j = 0; j < nodes.size(); ++j) {
            const Q& wm = w[static_cast<size_t>(m)][j];
            mul_add(c, Complex(wm, Q(0), bits), g[j], t);
            prop += static_cast<long double>(std::fabs(wm.get_d())) * g_err[j];
        }
        r.coefficients.push_back(std::move(c));
        r.errors.push_back(std::max(lat, prop));
    }
    r.estimate = estimate_error(lattice, k, g_err);

    // Same reconstruction without the outermost pair: its distance to the
    // full result tracks the interpolation error of the smaller lattice.
    if (nodes.size() >= static_cast<size_t>(k) + 2) {
        std::vector<Q> inner(nodes.begin() + 1, nodes.end() - 1);
        auto wi = lagrange_weights(inner, k);
        for (int m = 0; m < k; ++m) {
            Complex c(bits);
            for (size_t j = 0; j < inner.size(); ++j)
                mul_add(c, Complex(wi[static_cast<size_t>(m)][j], Q(0), bits), g[j + 1], t);
            r.drift.push_back(mag(c - r.coefficients[static_cast<size_t>(m)]));
        }
    }
    return r;
}

double pole_slope(const std::vector<Complex>& f, int p, const EpsilonLattice& lattice) {
    // least squares of log|g| on log|eps|
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (size_t j = 0; j < f.size(); ++j) {
        double x = std::log(std::fabs(lattice.nodes[j].get_d()));
        long double a = mag(f[j]);
        if (!(a > 0)) continue;
        double y = static_cast<double>(std::log(a)) + p * x;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    double den = m * sxx - sx * sx;
    if (m < 2 || den <= 0) return 0;
    return (m * sxy - sx * sy) / den;
}

namespace {

constexpr int kMaxReruns = 4;

LaurentResult run_lattice(const EvalRequest& req, const PathPlan& plan, const EpsilonLattice& lattice, int d_work,
                          const std::string& cache_dir, bool want_geometry, std::vector<Complex>* values) {
    std::vector<double> secs;
    auto outputs = evaluate_all_nodes(plan, lattice.nodes, req.options, d_work, cache_dir, &secs, want_geometry);
    std::vector<Complex> f;
    std::vector<long double> err;
    for (auto& o : outputs) {
        f.push_back(o.state.J[0]);
        err.push_back(o.state.error);
    }
    LaurentResult r = reconstruct_laurent(f, err, req.pole_order, req.order, lattice, d_work);
    r.strategy = plan.strategy;
    for (size_t j = 0; j < outputs.size(); ++j) {
        NodeDiag nd;
        nd.eps = lattice.nodes[j];
        nd.legs = outputs[j].legs;
        nd.hops = outputs[j].hops;
        nd.max_terms = outputs[j].max_terms;
        nd.error = outputs[j].state.error;
        nd.seconds = secs[j];
        r.nodes.push_back(nd);
    }
    if (!outputs.empty()) r.geometry = std::move(outputs[0].geometry);
    if (values) *values = std::move(f);
    return r;
}

void validate_request(const EvalRequest& req) {
    req.spec.validate();
    if (req.order < 1) throw Error(ErrorCode::usage, "invalid order", "order must be at least 1");
    if (req.digits < 1) throw Error(ErrorCode::usage, "invalid precision", "precision must be at least 1");
    if (req.pole_order < 0) throw Error(ErrorCode::usage, "invalid pole order", "pole order must be non-negative");
}

}  // namespace

LaurentResult evaluate_on(const EvalRequest& req, const LatticeDesign& design, const std::string& cache_dir) {
    validate_request(req);
    PathPlan plan = plan_path(req.spec, req.options);
    return run_lattice(req, plan, design.lattice, design.d_work, cache_dir, false, nullptr);
}

LaurentResult evaluate(const EvalRequest& req, const std::string& cache_dir, bool want_geometry) {
    validate_request(req);
    PathPlan plan = plan_path(req.spec, req.options);
    LatticeDesign design = design_lattice(req.order, req.digits, req.pole_order, plan.spec, req.options.internal_precision);
    int d_work = design.d_work;
    const long double tol = std::pow(10.0L, -static_cast<long double>(req.digits));

    long double last_excess = 0;
    for (int attempt = 0;; ++attempt) {
        std::vector<Complex> f;
        LaurentResult r = run_lattice(req, plan, design.lattice, d_work, cache_dir, want_geometry, &f);
        r.reruns = attempt;

        // worst ratio of reported error to the tolerance
        long double excess = 0;
        for (size_t m = 0; m < r.coefficients.size(); ++m)
            excess = std::max(excess, r.errors[m] / (tol * std::max(1.0L, mag(r.coefficients[m]))));
        if (excess > 1) {
            // more digits only help while the loss is roundoff, which shrinks with each rerun
            bool improving = attempt == 0 || excess < last_excess / 10;
            last_excess = excess;
            if (attempt < kMaxReruns && improving) {
                d_work = d_work + (d_work + 1) / 2;
                continue;
            }
            throw Error(ErrorCode::precision_shortfall, "precision shortfall",
                        "accumulated error above 1e-" + std::to_string(req.digits) + " at " + std::to_string(d_work) +
                            " working digits");
        }

        double slope = pole_slope(f, req.pole_order, design.lattice);
        if (slope < -0.5)
            r.warnings.push_back("values times eps^" + std::to_string(req.pole_order) + " grow like |eps|^" +
                                 std::to_string(static_cast<int>(std::lround(slope))) +
                                 " near eps = 0; the pole order is probably at least " +
                                 std::to_string(req.pole_order + static_cast<int>(std::lround(-slope))));
        return r;
    }
}

}  // namespace lauricella
