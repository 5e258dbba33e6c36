#include "lauricella/pathplan.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_map>

#include <json.hpp>

#include "lauricella/error.hpp"

namespace lauricella {

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::single_aligned: return "single_aligned";
        case Strategy::coordinate_wise: return "coordinate_wise";
        case Strategy::direct_experimental: return "direct_experimental";
    }
    return "?";
}

cplx to_cplx(const QG& z) { return {static_cast<long double>(z.re.get_d()), static_cast<long double>(z.im.get_d())}; }
cplx to_cplx(const Complex& z) { return {z.re.to_ldouble(), z.im.to_ldouble()}; }

namespace {

// x_i = r_i * unit with real rational r_i, if such a unit exists.
std::optional<std::vector<Q>> real_ratios(const std::vector<QG>& x, const QG& unit) {
    std::vector<Q> r;
    for (const auto& xi : x) {
        QG q = xi / unit;
        if (!q.is_real()) return std::nullopt;
        r.push_back(q.re);
    }
    return r;
}

}  // namespace

PathPlan plan_path(const FunctionSpec& spec, const Options& opt) {
    spec.validate();
    PathPlan plan;
    for (int i = 0; i < spec.n; ++i)
        if (!spec.args[static_cast<size_t>(i)].is_zero()) plan.original.push_back(i);
    if (plan.original.empty()) {
        plan.spec = spec;
        return plan;
    }
    plan.spec = spec.reduced(plan.original);
    const auto& x = plan.spec.args;
    int n = plan.spec.n;
    std::vector<int> all(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) all[static_cast<size_t>(i)] = i;

    QG unit = x[0].is_real() ? QG(sgn(x[0].re)) : x[0];
    if (auto r = real_ratios(x, unit)) {
        bool same_sign = std::all_of(r->begin(), r->end(), [](const Q& v) { return sgn(v) > 0; });
        if (same_sign || opt.simple_continuation) {
            Leg leg;
            leg.active = all;
            leg.anchor.assign(static_cast<size_t>(n), QG());
            for (const auto& v : *r) leg.kappa.emplace_back(v);
            leg.t_end = unit;
            leg.tag = Strategy::single_aligned;
            plan.legs.push_back(std::move(leg));
            plan.strategy = Strategy::single_aligned;
            return plan;
        }
    }

    std::vector<int> order = all;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return norm2(x[static_cast<size_t>(a)]) < norm2(x[static_cast<size_t>(b)]);
    });
    for (int j = 0; j < n; ++j) {
        Leg leg;
        leg.active.assign(order.begin(), order.begin() + j + 1);
        std::sort(leg.active.begin(), leg.active.end());
        leg.moving = order[static_cast<size_t>(j)];
        for (int c : leg.active) {
            leg.anchor.push_back(c == leg.moving ? QG() : x[static_cast<size_t>(c)]);
            leg.kappa.push_back(c == leg.moving ? QG(1) : QG());
        }
        leg.t_end = x[static_cast<size_t>(leg.moving)];
        leg.tag = Strategy::coordinate_wise;
        plan.legs.push_back(std::move(leg));
    }
    plan.strategy = Strategy::coordinate_wise;
    return plan;
}

namespace {

UPoly lcm(const UPoly& a, const UPoly& b) {
    UPoly g = gcd(a, b);
    UPoly r = exact_div(a, g) * b;
    r.make_monic();
    return r;
}

}  // namespace

LocalSystem restrict_system(const PfaffianSystem& sys, const Leg& leg, int digits) {
    if (sys.symbolic) throw std::logic_error("restrict_system: parameters not substituted");
    size_t n = leg.active.size();
    if (static_cast<size_t>(sys.n) != n) throw std::logic_error("restrict_system: dimension mismatch");
    std::vector<int> vars(n);
    for (size_t i = 0; i < n; ++i) vars[i] = static_cast<int>(i);
    size_t B = sys.basis.size();

    std::vector<std::vector<URatFun>> Mt(B, std::vector<URatFun>(B));
    for (size_t k = 0; k < n; ++k) {
        if (leg.kappa[k].is_zero()) continue;
        for (size_t r = 0; r < B; ++r)
            for (size_t c = 0; c < B; ++c) {
                const RatFun& e = sys.M[k][r][c];
                if (e.is_zero()) continue;
                UPoly num = line_restrict(e.num, vars, leg.anchor, leg.kappa);
                UPoly den = line_restrict(e.den, vars, leg.anchor, leg.kappa);
                if (den.is_zero())
                    throw Error(ErrorCode::math_domain, "singular endpoint", "continuation leg lies on a singular locus");
                Mt[r][c] = Mt[r][c] + URatFun(num, den) * leg.kappa[k];
            }
    }

    LocalSystem ls;
    ls.D = UPoly(QG(1));
    for (auto& row : Mt)
        for (auto& e : row)
            if (!e.is_zero()) ls.D = lcm(ls.D, e.den);
    ls.P.assign(B, std::vector<UPoly>(B));
    for (size_t r = 0; r < B; ++r)
        for (size_t c = 0; c < B; ++c)
            if (!Mt[r][c].is_zero()) ls.P[r][c] = Mt[r][c].num * exact_div(ls.D, Mt[r][c].den);
    int z = ls.D.zero_order();
    if (z >= 2) throw Error(ErrorCode::internal, "non-regular origin", "pole of order " + std::to_string(z) + " at t = 0");
    ls.regular_singular_origin = z == 1;
    ls.singular = roots_exact(ls.D, digits);
    return ls;
}

CutLayout layout_cuts(const std::vector<ExactRoot>& singular, const QG& t_end, int delta_sign, int digits) {
    CutLayout out;
    out.delta_sign = delta_sign < 0 ? -1 : 1;
    mpfr_prec_t bits = Prec{digits}.bits();
    Complex te = t_end.to_complex(bits);
    Real tol = Real(1L, bits);
    mpfr_div_2si(tol.get(), tol.get(), static_cast<long>(digits * 3.3219280948873623 / 2), MPFR_RNDN);
    for (const auto& s : singular) {
        if (s.exact ? s.exact->is_zero() : s.approx.is_zero()) continue;
        Cut c;
        c.point = to_cplx(s.approx);
        c.exact = s.exact;
        c.direction = s.approx.re.sign() < 0 ? -1 : 1;
        bool on_line, beyond;
        if (s.exact) {
            on_line = s.exact->im == t_end.im;
            int d = cmp(t_end.re, s.exact->re);
            beyond = d * c.direction > 0;
        } else {
            on_line = abs(te.im - s.approx.im) < tol;
            beyond = (te.re - s.approx.re).sign() * c.direction > 0;
        }
        if (on_line && beyond && out.endpoint_cut < 0) out.endpoint_cut = static_cast<int>(out.cuts.size());
        out.on_endpoint.push_back(on_line && beyond);
        out.cuts.push_back(std::move(c));
    }
    return out;
}

bool crosses_cut(const CutLayout& cuts, cplx a, cplx b, bool b_is_endpoint) {
    for (size_t i = 0; i < cuts.cuts.size(); ++i) {
        const Cut& c = cuts.cuts[i];
        long double ya = a.imag() - c.point.imag(), yb = b.imag() - c.point.imag();
        if (b_is_endpoint && i < cuts.on_endpoint.size() && cuts.on_endpoint[i]) {
            if (ya * cuts.delta_sign <= 0) return true;
            continue;
        }
        if ((ya > 0 && yb > 0) || (ya < 0 && yb < 0)) continue;
        long double xa = (a.real() - c.point.real()) * c.direction;
        long double xb = (b.real() - c.point.real()) * c.direction;
        if (ya == yb) {
            if (std::max(xa, xb) >= 0) return true;
            continue;
        }
        long double xi = xa + (xb - xa) * ya / (ya - yb);
        if (xi >= 0) return true;
    }
    return false;
}

namespace {

long double reach_of(cplx z, const std::vector<cplx>& sing) {
    long double r = std::numeric_limits<long double>::infinity();
    for (auto s : sing) r = std::min(r, std::abs(z - s));
    return r;
}

// Power of two not larger than v (v > 0).
Q pow2_floor(long double v) {
    int e = static_cast<int>(std::floor(std::log2(v)));
    Q r(1);
    if (e >= 0) mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<unsigned long>(e));
    else mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<unsigned long>(-e));
    return r;
}

// Nearest multiple of `fine`.
Q q_round(long double v, const Q& fine) {
    long double k = std::round(v / static_cast<long double>(fine.get_d()));
    return Q(static_cast<long>(k)) * fine;
}

}  // namespace

RegionGraph build_region_graph(const std::vector<ExactRoot>& singular, const CutLayout& cuts, const QG& t_end) {
    RegionGraph g;
    g.t_end = t_end;
    std::vector<cplx> sing, nonzero;
    for (const auto& s : singular) {
        cplx z = to_cplx(s.approx);
        sing.push_back(z);
        bool zero = s.exact ? s.exact->is_zero() : s.approx.is_zero();
        if (!zero) nonzero.push_back(z);
    }
    cplx te = to_cplx(t_end);
    long double te_abs = std::abs(te);
    long double te_reach = reach_of(te, sing);
    if (te_reach <= 1e-15L * (1 + te_abs))
        throw Error(ErrorCode::math_domain, "singular endpoint", "endpoint " + t_end.to_string() + " is a singular point");

    long double reach0 = reach_of(0, nonzero);
    g.disks.push_back(Disk{QG(), 0.75L * reach0, reach0});
    if (te_abs <= 0.75L * reach0 && !crosses_cut(cuts, 0, te, true)) {
        g.path = {0};
        g.endpoint_ratio = te_abs / reach0;
        return g;
    }

    // Grid spacing from the singular point pattern (t = 0 included when singular).
    long double spacing = std::numeric_limits<long double>::infinity();
    for (size_t i = 0; i < sing.size(); ++i)
        for (size_t j = i + 1; j < sing.size(); ++j) spacing = std::min(spacing, std::abs(sing[i] - sing[j]) / 4);
    if (!std::isfinite(spacing)) spacing = te_abs / 8;
    spacing = std::min(spacing, std::max(te_abs, 1e-30L) / 8);
    long double margin = 0;
    for (auto s : nonzero) margin = std::max(margin, std::abs(s));
    margin = std::min(std::max(margin, te_abs / 4), 2 * te_abs);

    Q step = pow2_floor(spacing);
    for (int attempt = 0; attempt <= 6; ++attempt) {
        g.refinements = attempt;
        g.disks.resize(1);
        long double h = static_cast<long double>(step.get_d());
        long double x0 = std::min<long double>(0, te.real()) - margin, x1 = std::max<long double>(0, te.real()) + margin;
        long double y0 = std::min<long double>(0, te.imag()) - margin, y1 = std::max<long double>(0, te.imag()) + margin;
        // keep the grid bounded when singular points nearly coincide
        long double extent = std::max(x1 - x0, y1 - y0);
        while (extent / h > 400) {
            step *= 2;
            h *= 2;
        }
        long i0 = static_cast<long>(std::floor(x0 / h)), i1 = static_cast<long>(std::ceil(x1 / h));
        long j0 = static_cast<long>(std::floor(y0 / h)), j1 = static_cast<long>(std::ceil(y1 / h));
        long W = i1 - i0 + 1, H = j1 - j0 + 1;
        std::vector<int> at(static_cast<size_t>(W * H), -1);
        Q half = step / 2;
        for (long i = i0; i <= i1; ++i)
            for (long j = j0; j <= j1; ++j) {
                QG c(Q(i) * step, Q(j) * step + half);
                cplx z = to_cplx(c);
                long double r = reach_of(z, sing);
                if (r < 1e-12L * (1 + std::abs(z))) continue;
                at[static_cast<size_t>((i - i0) * H + (j - j0))] = static_cast<int>(g.disks.size());
                g.disks.push_back(Disk{c, 0.75L * r, r});
            }
        const size_t first_extra = g.disks.size();
        // Extra centers walking away from a nearby singular point toward the grid scale.
        {
            size_t near = 0;
            for (size_t k = 1; k < sing.size(); ++k)
                if (std::abs(te - sing[k]) < std::abs(te - sing[near])) near = k;
            if (!sing.empty() && te_reach < 4 * h) {
                cplx v = te - sing[near];
                if (cuts.endpoint_cut >= 0) v *= cplx(1, cuts.delta_sign) / std::sqrt(2.0L);
                long double a = 0.5L;
                while (a * std::abs(v) < 8 * h) {
                    cplx z = te + a * v;
                    Q fine = pow2_floor(std::abs(v) * (1 + a) / 256);
                    QG c(q_round(z.real(), fine), q_round(z.imag(), fine));
                    long double r = reach_of(to_cplx(c), sing);
                    g.disks.push_back(Disk{c, 0.75L * r, r});
                    a += 0.3L * (1 + a);
                }
            }
        }
        // Tight spots (close singular points, a point next to another cut, the
        // endpoint next to a cut) get nested patches refining down to their scale.
        auto add_disk = [&](const QG& c, long double floor_r) {
            long double r = reach_of(to_cplx(c), sing);
            if (r >= floor_r) g.disks.push_back(Disk{c, 0.75L * r, r});
        };
        auto add_patch = [&](cplx p, long double d) {
            for (Q hp = pow2_floor(d / 8); hp < step; hp *= 2) {
                long double hpl = static_cast<long double>(hp.get_d());
                long ci = static_cast<long>(std::floor(p.real() / hpl)), cj = static_cast<long>(std::floor(p.imag() / hpl));
                for (long i = ci - 12; i <= ci + 12; ++i)
                    for (long j = cj - 12; j <= cj + 12; ++j) {
                        // coarser levels skip the inner region already covered
                        if (hp != pow2_floor(d / 8) && std::abs(i - ci) < 6 && std::abs(j - cj) < 6) continue;
                        add_disk(QG(Q(i) * hp, Q(j) * hp + hp / 2), hpl / 8);
                    }
            }
        };
        auto ray_gap = [&](cplx z, const Cut& c) {
            if ((z.real() - c.point.real()) * c.direction < 0) return 0.0L;
            return std::abs(z.imag() - c.point.imag());
        };
        for (size_t a = 0; a < sing.size(); ++a)
            for (size_t b = a + 1; b < sing.size(); ++b) {
                long double dist = std::abs(sing[a] - sing[b]);
                if (dist > 0 && dist < 8 * h) add_patch((sing[a] + sing[b]) / 2.0L, dist);
            }
        for (size_t ci = 0; ci < cuts.cuts.size(); ++ci) {
            const Cut& c = cuts.cuts[ci];
            for (auto z : sing) {
                long double gap = ray_gap(z, c);
                if (gap > 0 && gap < 8 * h) add_patch(cplx(z.real(), (z.imag() + c.point.imag()) / 2), gap);
            }
            bool on = ci < cuts.on_endpoint.size() && cuts.on_endpoint[ci];
            long double gap = ray_gap(te, c);
            if (!on && gap > 0 && gap < 8 * h) add_patch(cplx(te.real(), (te.imag() + c.point.imag()) / 2), gap);
            // strips between parallel rays narrower than the grid get a centre line
            for (size_t cj = ci + 1; cj < cuts.cuts.size(); ++cj) {
                const Cut& o = cuts.cuts[cj];
                long double w = std::abs(c.point.imag() - o.point.imag());
                if (w == 0 || w >= 2 * h) continue;
                long double lo = c.direction > 0 ? std::max(c.point.real(), o.point.real()) : x0;
                long double hi = c.direction > 0 ? x1 : std::min(c.point.real(), o.point.real());
                if (o.direction != c.direction) {
                    lo = std::min(c.point.real(), o.point.real());
                    hi = std::max(c.point.real(), o.point.real());
                }
                Q hp = pow2_floor(w / 2);
                Q y = q_round((c.point.imag() + o.point.imag()) / 2, hp / 64);
                long double hs = std::min(h, static_cast<long double>(hp.get_d()) * 8);
                for (long double x = lo; x <= hi; x += hs) add_disk(QG(q_round(x, hp), y), w / 16);
            }
        }
        const size_t ngrid_end = g.disks.size();

        std::vector<cplx> zc(g.disks.size());
        for (size_t k = 0; k < g.disks.size(); ++k) zc[k] = to_cplx(g.disks[k].center);
        // extra centres bucketed on the grid cells
        auto cell_key = [](long i, long j) { return (static_cast<long long>(i) << 32) ^ static_cast<long long>(j & 0xffffffffL); };
        // (a hop needs |b - a| <= radius of b, so only wide extras are looked up far away)
        std::unordered_map<long long, std::vector<int>> bucket;
        std::vector<int> wide;
        const long double extra_rad = 4 * h;
        for (size_t k = first_extra; k < ngrid_end; ++k) {
            if (g.disks[k].radius > extra_rad) {
                wide.push_back(static_cast<int>(k));
                continue;
            }
            bucket[cell_key(static_cast<long>(std::floor(zc[k].real() / h)), static_cast<long>(std::floor(zc[k].imag() / h)))]
                .push_back(static_cast<int>(k));
        }
        auto neighbours = [&](size_t idx, long double rad, std::vector<int>& out) {
            out.clear();
            cplx z = zc[idx];
            long double rad2 = rad * rad;
            long di = static_cast<long>(std::ceil(rad / h)) + 1;
            // Large windows are sampled on a sublattice; fewest hops does not need every node.
            long stride = std::max(1L, di / 8);
            long ci = static_cast<long>(std::floor(z.real() / h)), cj = static_cast<long>(std::floor(z.imag() / h));
            for (long i = std::max(i0, ci - di); i <= std::min(i1, ci + di); i += stride)
                for (long j = std::max(j0, cj - di); j <= std::min(j1, cj + di); j += stride) {
                    int k = at[static_cast<size_t>((i - i0) * H + (j - j0))];
                    if (k >= 0 && static_cast<size_t>(k) != idx && std::norm(zc[static_cast<size_t>(k)] - z) <= rad2)
                        out.push_back(k);
                }
            for (int k : wide)
                if (static_cast<size_t>(k) != idx && std::norm(zc[static_cast<size_t>(k)] - z) <= rad2) out.push_back(k);
            if (bucket.empty()) return;
            long de = static_cast<long>(std::ceil(std::min(rad, extra_rad) / h)) + 1;
            for (long i = ci - de; i <= ci + de; ++i)
                for (long j = cj - de; j <= cj + de; ++j) {
                    auto it = bucket.find(cell_key(i, j));
                    if (it == bucket.end()) continue;
                    for (int k : it->second)
                        if (static_cast<size_t>(k) != idx && std::norm(zc[static_cast<size_t>(k)] - z) <= rad2) out.push_back(k);
                }
        };

        std::vector<int> parent(g.disks.size(), -2);
        parent[0] = -1;
        std::deque<int> queue{0};
        int found = -1;
        std::vector<int> nb;
        while (!queue.empty() && found < 0) {
            int a = queue.front();
            queue.pop_front();
            const Disk& A = g.disks[static_cast<size_t>(a)];
            cplx za = zc[static_cast<size_t>(a)];
            if (a != 0 && std::abs(te - za) <= A.radius && !crosses_cut(cuts, za, te, true)) {
                found = a;
                break;
            }
            neighbours(static_cast<size_t>(a), A.radius, nb);
            for (int b : nb) {
                if (parent[static_cast<size_t>(b)] != -2) continue;
                const Disk& Bd = g.disks[static_cast<size_t>(b)];
                cplx zb = zc[static_cast<size_t>(b)];
                if (a != 0) {
                    long double lim = 0.75L * std::min(A.radius, Bd.radius);
                    if (std::norm(zb - za) > lim * lim) continue;
                }
                if (crosses_cut(cuts, za, zb, false)) continue;
                parent[static_cast<size_t>(b)] = a;
                queue.push_back(b);
            }
        }
        if (found >= 0) {
            std::vector<int> rev;
            for (int v = found; v >= 0; v = parent[static_cast<size_t>(v)]) rev.push_back(v);
            // keep only the disks on the path
            std::vector<Disk> kept;
            for (auto it = rev.rbegin(); it != rev.rend(); ++it) kept.push_back(g.disks[static_cast<size_t>(*it)]);
            g.disks = std::move(kept);
            g.path.resize(g.disks.size());
            for (size_t k = 0; k < g.path.size(); ++k) g.path[k] = static_cast<int>(k);
            g.grid_step = QG(step);
            const Disk& last = g.disks.back();
            g.endpoint_ratio = std::abs(te - to_cplx(last.center)) / last.reach;
            return g;
        }
        step /= 2;
        margin *= 1.5L;
    }
    throw Error(ErrorCode::math_domain, "continuation path not found",
                "no disk chain from 0 to " + t_end.to_string() + " after 6 refinements");
}

std::string geometry_json(const std::vector<ExactRoot>& singular, const CutLayout& cuts, const RegionGraph& g) {
    using nlohmann::json;
    auto pt = [](cplx z) { return json::array({static_cast<double>(z.real()), static_cast<double>(z.imag())}); };
    json j;
    j["t_end"] = pt(to_cplx(g.t_end));
    j["t_end_exact"] = g.t_end.to_string();
    j["delta"] = cuts.delta_sign < 0 ? "-i" : "+i";
    for (const auto& s : singular) {
        json e{{"point", pt(to_cplx(s.approx))}, {"multiplicity", s.multiplicity}};
        if (s.exact) e["exact"] = s.exact->to_string();
        j["singularities"].push_back(e);
    }
    j["cuts"] = json::array();
    for (const auto& c : cuts.cuts) j["cuts"].push_back({{"from", pt(c.point)}, {"direction", c.direction}});
    j["endpoint_cut"] = cuts.endpoint_cut;
    j["grid_step"] = g.grid_step.to_string();
    j["refinements"] = g.refinements;
    j["disks"] = json::array();
    for (int k : g.path) {
        const Disk& d = g.disks[static_cast<size_t>(k)];
        j["disks"].push_back({{"center", pt(to_cplx(d.center))}, {"radius", static_cast<double>(d.radius)}});
    }
    j["endpoint_ratio"] = static_cast<double>(g.endpoint_ratio);
    return j.dump(2);
}

}  // namespace lauricella
