#pragma once

#include <string>
#include <vector>

#include "lauricella/frobenius.hpp"
#include "lauricella/pathplan.hpp"

namespace lauricella {

// Process-wide symbolic systems (derived or loaded once, thread-safe).
const PfaffianSystem& shared_system(Family f, int n, const std::string& cache_dir);

struct StateVector {
    HVec J;
    QG at;
    long double error = 0;  // absolute, inf-norm
};

struct NodeOutput {
    StateVector state;  // basis of the planned spec at its target point
    int legs = 0;
    int hops = 0;
    int max_terms = 0;
    std::vector<std::string> geometry;  // one JSON document per leg, when requested
};

// Full pipeline for one eps node: substitute, restrict, continue, transport.
NodeOutput transport_node(const PathPlan& plan, const Q& eps, const Options& opt, int d_work,
                          const std::string& cache_dir, bool want_geometry = false);

// Point matching U(t0) C = J(t0) against the defining series at kappa t0.
// Columns are scaled by t0^{-lambda} before solving; t0 is halved when the
// scaled matrix is ill-conditioned (at most 3 retries).
HVec initial_constants(const FrobeniusSolution& sol, const NodeParams& p, const std::vector<QG>& kappa, QG t0,
                       int digits);

// Values of the leg j+1 basis from those of leg j: components with a theta
// of the newly moving coordinate vanish there. Higher Taylor orders in the
// moving coordinate, when the leg origin needs them, come from the earlier
// legs rerun at shifted parameters.
HVec leg_transition(const HVec& J, const Leg& from, const Leg& to, Family family);

}  // namespace lauricella
