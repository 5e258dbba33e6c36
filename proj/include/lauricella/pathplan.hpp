#pragma once

#include <complex>
#include <string>
#include <vector>

#include "lauricella/model.hpp"
#include "lauricella/numkit/roots.hpp"
#include "lauricella/numkit/upoly.hpp"
#include "lauricella/pfaffian.hpp"

namespace lauricella {

enum class Strategy { single_aligned, coordinate_wise, direct_experimental };
const char* strategy_name(Strategy s);

// x(t) = anchor + kappa t on the coordinates listed in `active` (indices into
// the planned spec). Coordinates outside `active` are 0 on this leg.
struct Leg {
    std::vector<int> active;
    std::vector<QG> anchor, kappa;  // parallel to active
    QG t_end;
    int moving = -1;  // coordinate varied by a coordinate-wise leg
    Strategy tag = Strategy::single_aligned;
};

struct PathPlan {
    FunctionSpec spec;          // zero arguments removed
    std::vector<int> original;  // spec coordinate -> coordinate of the request
    std::vector<Leg> legs;      // empty when every argument is 0
    Strategy strategy = Strategy::single_aligned;
};

PathPlan plan_path(const FunctionSpec& spec, const Options& opt);

// M_t = P(t) / D(t), D monic, exact.
struct LocalSystem {
    UPoly D;
    std::vector<std::vector<UPoly>> P;
    std::vector<ExactRoot> singular;  // distinct roots of D
    bool regular_singular_origin = false;

    size_t dim() const { return P.size(); }
};

// `sys` is the node system on the leg's active coordinates (same order).
LocalSystem restrict_system(const PfaffianSystem& sys, const Leg& leg, int digits);

using cplx = std::complex<long double>;

struct Cut {
    cplx point;
    std::optional<QG> exact;
    int direction = 1;  // +1: ray to +inf, -1: ray to -inf
};

struct CutLayout {
    std::vector<Cut> cuts;
    int delta_sign = -1;
    int endpoint_cut = -1;  // first cut the endpoint lies on, or -1
    std::vector<bool> on_endpoint;  // per cut: the endpoint lies on it
};

// Rays are horizontal and point away from t = 0; a singular point at 0 gets no ray.
CutLayout layout_cuts(const std::vector<ExactRoot>& singular, const QG& t_end, int delta_sign, int digits);

struct Disk {
    QG center;
    long double radius = 0;  // 3/4 of the distance to the nearest singular point
    long double reach = 0;   // distance to the nearest singular point
};

struct RegionGraph {
    std::vector<Disk> disks;  // disks[0] is the origin node
    std::vector<int> path;    // indices into disks, origin first; the endpoint is implicit
    QG t_end;
    QG grid_step;
    int refinements = 0;
    long double endpoint_ratio = 0;  // |t_end - last center| / reach of last disk
};

RegionGraph build_region_graph(const std::vector<ExactRoot>& singular, const CutLayout& cuts, const QG& t_end);

// True if the segment a -> b crosses a cut (the endpoint side rule applies when b is the endpoint).
bool crosses_cut(const CutLayout& cuts, cplx a, cplx b, bool b_is_endpoint);

std::string geometry_json(const std::vector<ExactRoot>& singular, const CutLayout& cuts, const RegionGraph& g);

cplx to_cplx(const QG& z);
cplx to_cplx(const Complex& z);

}  // namespace lauricella
