#include "lauricella/transport.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "lauricella/error.hpp"

namespace lauricella {

const PfaffianSystem& shared_system(Family f, int n, const std::string& cache_dir) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<PfaffianSystem>> memo;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = memo[{static_cast<int>(f), n}];
    if (!slot) slot = std::make_unique<PfaffianSystem>(load_or_derive(f, n, cache_dir));
    return *slot;
}

namespace {

// The disk chain depends only on the singular points, the endpoint and the
// side, which rarely change between eps nodes.
RegionGraph cached_graph(const std::vector<ExactRoot>& singular, const CutLayout& cuts, const QG& t_end) {
    static std::mutex mu;
    static std::map<std::string, RegionGraph> memo;
    std::string key = t_end.to_string() + (cuts.delta_sign < 0 ? "|-" : "|+");
    for (const auto& r : singular)
        key += "|" + (r.exact ? r.exact->to_string() : r.approx.re.to_string(25) + "," + r.approx.im.to_string(25));
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
    }
    RegionGraph g = build_region_graph(singular, cuts, t_end);
    std::lock_guard<std::mutex> lock(mu);
    memo.emplace(key, g);
    return g;
}

std::uint32_t global_mask(std::uint32_t local, const std::vector<int>& active) {
    std::uint32_t g = 0;
    for (size_t i = 0; i < active.size(); ++i)
        if (local & (1u << i)) g |= 1u << active[i];
    return g;
}

HVec embed(const std::vector<QG>& v, mpfr_prec_t bits) {
    HVec out;
    for (const auto& q : v) out.push_back(q.to_complex(bits));
    return out;
}

// delta names the side of the arguments. A coordinate whose value lies on its
// cut (real, > 1) has x = kappa t, so a negative kappa flips the side in t.
int leg_side(const Leg& leg, int delta) {
    for (size_t i = 0; i < leg.active.size(); ++i) {
        QG x = leg.anchor[i] + leg.kappa[i] * leg.t_end;
        if (x.is_real() && x.re > 1 && leg.kappa[i].is_real() && sgn(leg.kappa[i].re) != 0)
            return delta * sgn(leg.kappa[i].re);
    }
    return delta;
}

}  // namespace

HVec leg_transition(const HVec& J, const Leg& from, const Leg& to, Family family) {
    auto bf = theta_basis(family, static_cast<int>(from.active.size()));
    auto bt = theta_basis(family, static_cast<int>(to.active.size()));
    mpfr_prec_t bits = J.empty() ? 64 : J[0].prec();
    HVec out;
    for (auto m : bt) {
        std::uint32_t g = global_mask(m, to.active);
        Complex v(bits);
        if (!(to.moving >= 0 && (g & (1u << to.moving)))) {
            bool found = false;
            for (size_t i = 0; i < bf.size(); ++i)
                if (global_mask(bf[i], from.active) == g) {
                    v.set(J[i]);
                    found = true;
                }
            if (!found) throw std::logic_error("leg_transition: basis element without predecessor");
        }
        out.push_back(std::move(v));
    }
    return out;
}

namespace {

Q pochhammer(const Q& a, int r) {
    Q out(1);
    for (int i = 0; i < r; ++i) out *= a + i;
    return out;
}

LinearForm plus(const LinearForm& f, int r) { return LinearForm(f.a + r, f.b); }

// The coefficient of x_j^r in F is pref * F' in the other coordinates, with
// F' the same family at shifted parameters.
FunctionSpec split_order(const FunctionSpec& s, int j, int r, const Q& eps, Q& pref) {
    NodeParams p = NodeParams::at(s, eps);
    FunctionSpec out = s;
    size_t k = static_cast<size_t>(j);
    Q fact(1);
    for (int i = 2; i <= r; ++i) fact *= i;
    switch (s.family) {
    case Family::FA:
        pref = pochhammer(p.alpha[0], r) * pochhammer(p.beta[k], r) / (pochhammer(p.gamma[k], r) * fact);
        out.alpha[0] = plus(s.alpha[0], r);
        break;
    case Family::FB:
        pref = pochhammer(p.alpha[k], r) * pochhammer(p.beta[k], r) / (pochhammer(p.gamma[0], r) * fact);
        out.gamma[0] = plus(s.gamma[0], r);
        break;
    case Family::FD:
        pref = pochhammer(p.alpha[0], r) * pochhammer(p.beta[k], r) / (pochhammer(p.gamma[0], r) * fact);
        out.alpha[0] = plus(s.alpha[0], r);
        out.gamma[0] = plus(s.gamma[0], r);
        break;
    }
    return out;
}

struct Run {
    HVec J;
    long double rel = 0;  // relative error of J
};

// Taylor data of the leg basis in the moving coordinate at the leg origin,
// orders 0..m, from the previous legs.
Run leg_origin_data(const PathPlan& plan, const FunctionSpec& spec, size_t li, const HVec& J, int m, const Q& eps,
                    const Options& opt, int d_work, const std::string& cache_dir, std::vector<HVec>& v);

Run run_legs(const PathPlan& plan, const FunctionSpec& spec, size_t count, const Q& eps, const Options& opt,
             int d_work, const std::string& cache_dir, NodeOutput* diag, bool geometry = false) {
    mpfr_prec_t bits = Prec{d_work}.bits();
    Run run;
    for (size_t li = 0; li < count; ++li) {
        const Leg& leg = plan.legs[li];
        FunctionSpec sj = spec.reduced(leg.active);
        NodeParams pj = NodeParams::at(sj, eps);
        if (pj.degenerate())
            throw Error(ErrorCode::math_domain, "degenerate node", "a gamma-type parameter is a non-positive integer at eps = " + q_to_string(eps));
        PfaffianSystem sys = substitute(shared_system(sj.family, sj.n, cache_dir), pj);
        LocalSystem ls = restrict_system(sys, leg, d_work);
        ShiftedSystem sh0 = shift_system(ls, QG());

        int m = 0;
        for (int r : resonant_orders(sh0)) m = std::max(m, r);
        std::vector<HVec> v;
        if (li == 0) {
            for (auto& row : line_taylor_exact(pj, leg.kappa, m)) v.push_back(embed(row, bits));
        } else {
            Run extra = leg_origin_data(plan, spec, li, run.J, m, eps, opt, d_work, cache_dir, v);
            run.rel = std::max(run.rel, extra.rel);
        }

        CutLayout cuts = layout_cuts(ls.singular, leg.t_end, leg_side(leg, opt.delta_sign), d_work);
        RegionGraph g = cached_graph(ls.singular, cuts, leg.t_end);
        if (diag && geometry) diag->geometry.push_back(geometry_json(ls.singular, cuts, g));

        std::vector<QG> pts;
        std::vector<long double> reach;
        for (int k : g.path) {
            pts.push_back(g.disks[static_cast<size_t>(k)].center);
            reach.push_back(g.disks[static_cast<size_t>(k)].reach);
        }
        pts.push_back(leg.t_end);

        for (size_t h = 0; h + 1 < pts.size(); ++h) {
            QG dq = pts[h + 1] - pts[h];
            Complex ds = dq.to_complex(bits);
            long double q = std::abs(to_cplx(dq)) / reach[h];
            int N = opt.frobenius_terms > 0 ? opt.frobenius_terms
                                            : choose_truncation(std::min(std::max(q, 1e-6L), 0.75L), d_work);
            StepResult r;
            HVec start;
            if (h == 0) {
                start = v[0];
                r = sh0.zero_order == 1 ? analytic_origin_step(sh0, v, ds, N, d_work) : taylor_step(sh0, v[0], ds, N, d_work);
            } else {
                start = run.J;
                r = taylor_step(shift_system(ls, pts[h]), run.J, ds, N, d_work);
            }
            long double nv = std::max(norm_inf(r.value), 1e-300L);
            long double amp = std::max(1.0L, std::max(r.peak, norm_inf(start)) / nv);
            run.rel = run.rel * amp + (r.tail + r.peak * std::pow(10.0L, -d_work + 1)) / nv;
            run.J = std::move(r.value);
            if (diag) {
                diag->max_terms = std::max(diag->max_terms, r.terms);
                ++diag->hops;
            }
        }
        if (diag) ++diag->legs;
    }
    return run;
}

Run leg_origin_data(const PathPlan& plan, const FunctionSpec& spec, size_t li, const HVec& J, int m, const Q& eps,
                    const Options& opt, int d_work, const std::string& cache_dir, std::vector<HVec>& v) {
    const Leg& prev = plan.legs[li - 1];
    const Leg& leg = plan.legs[li];
    mpfr_prec_t bits = Prec{d_work}.bits();
    Run worst;
    v.push_back(leg_transition(J, prev, leg, spec.family));
    if (m == 0) return worst;
    auto bp = theta_basis(spec.family, static_cast<int>(prev.active.size()));
    auto bl = theta_basis(spec.family, static_cast<int>(leg.active.size()));
    std::uint32_t mv = 1u << leg.moving;
    for (int r = 1; r <= m; ++r) {
        Q pref;
        FunctionSpec sr = split_order(spec, leg.moving, r, eps, pref);
        Run g = run_legs(plan, sr, li, eps, opt, d_work, cache_dir, nullptr);
        worst.rel = std::max(worst.rel, g.rel);
        HVec row;
        for (auto mask : bl) {
            std::uint32_t gm = global_mask(mask, leg.active);
            Q f = (gm & mv) ? pref * r : pref;
            gm &= ~mv;
            Complex val(bits);
            for (size_t i = 0; i < bp.size(); ++i)
                if (global_mask(bp[i], prev.active) == gm) val = g.J[i] * Complex(f, Q(0), bits);
            row.push_back(std::move(val));
        }
        v.push_back(std::move(row));
    }
    return worst;
}

}  // namespace

NodeOutput transport_node(const PathPlan& plan, const Q& eps, const Options& opt, int d_work,
                          const std::string& cache_dir, bool want_geometry) {
    NodeOutput out;
    NodeParams full = NodeParams::at(plan.spec, eps);
    if (full.degenerate())
        throw Error(ErrorCode::math_domain, "degenerate node", "a gamma-type parameter is a non-positive integer at eps = " + q_to_string(eps));
    if (plan.legs.empty()) {
        mpfr_prec_t bits = Prec{d_work}.bits();
        size_t B = theta_basis(plan.spec.family, plan.spec.n).size();
        out.state.J.assign(B, Complex(bits));
        out.state.J[0] = Complex(1L, bits);
        return out;
    }
    Run run = run_legs(plan, plan.spec, plan.legs.size(), eps, opt, d_work, cache_dir, &out, want_geometry);
    out.state.J = std::move(run.J);
    out.state.at = plan.legs.back().t_end;
    out.state.error = run.rel * norm_inf(out.state.J);
    return out;
}

HVec initial_constants(const FrobeniusSolution& sol, const NodeParams& p, const std::vector<QG>& kappa, QG t0,
                       int digits) {
    mpfr_prec_t bits = Prec{digits}.bits();
    for (int attempt = 0; attempt <= 3; ++attempt, t0 /= QG(2)) {
        std::vector<QG> x;
        for (const auto& k : kappa) x.push_back(k * t0);
        HVec target = sum_series(p, x, digits);
        Complex tc = t0.to_complex(bits);
        HMat U = evaluate(sol, tc).U;
        std::vector<Complex> scale;
        for (const auto& cs : sol.classes)
            for (int c = 0; c < cs.cols; ++c) scale.push_back(pow(tc, -cs.lambda));
        for (size_t i = 0; i < U.rows(); ++i)
            for (size_t j = 0; j < U.cols(); ++j) U(i, j) *= scale[j];
        long double cond;
        try {
            cond = condition(U, digits);
        } catch (const Error&) {
            continue;
        }
        if (cond > std::pow(10.0L, digits / 2.0L)) continue;
        HVec C = linsolve(U, target, digits);
        for (size_t j = 0; j < C.size(); ++j) C[j] *= scale[j];
        return C;
    }
    throw Error(ErrorCode::precision_shortfall, "ill-conditioned matching", "boundary matching failed after 3 retries");
}

}  // namespace lauricella
