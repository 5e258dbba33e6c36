#pragma once

#include <string>
#include <vector>

#include "lauricella/transport.hpp"

namespace lauricella {

// Nodes +-j*h, j = 1..half_count, ascending.
struct EpsilonLattice {
    Q h;
    int e = 0;  // h = 10^-e
    int half_count = 0;
    std::vector<Q> nodes;

    // Exponent of h in the lattice error term: 2 n - 2 floor(k/2).
    int error_exponent(int k) const { return 2 * half_count - 2 * (k / 2); }
};

struct LatticeDesign {
    EpsilonLattice lattice;
    int d_work = 0;
};

EpsilonLattice make_lattice(int e, int half_count);

// internal_precision = 0 selects d + max(20, 2 k e).
LatticeDesign design_lattice(int k, int d, int p, const FunctionSpec& spec, int internal_precision = 0);

struct NodeDiag {
    Q eps;
    int legs = 0;
    int hops = 0;
    int max_terms = 0;
    long double error = 0;  // absolute error of the node's J
    double seconds = 0;
};

// One transport per node on a worker pool; output order follows `nodes`.
// The first failing node (in node order) is rethrown.
std::vector<NodeOutput> evaluate_all_nodes(const PathPlan& plan, const std::vector<Q>& nodes, const Options& opt,
                                           int d_work, const std::string& cache_dir, std::vector<double>* seconds = nullptr,
                                           bool want_geometry = false);

// Coefficient of eps^m (m < k) of the interpolating polynomial, as exact
// weights on the node values: w[m][j].
std::vector<std::vector<Q>> lagrange_weights(const std::vector<Q>& nodes, int k);

struct LaurentResult {
    int pole_order = 0;
    std::vector<Complex> coefficients;  // eps^-p .. eps^(k-1-p)
    std::vector<long double> errors;    // per coefficient
    long double estimate = 0;           // max(h^(2n - 2 floor(k/2)), Delta_Frob)
    // |c_m - c_m without the outermost node pair|, per coefficient; empty when
    // the inner lattice is too small for k coefficients
    std::vector<long double> drift;
    EpsilonLattice lattice;
    int d_work = 0;
    int reruns = 0;
    Strategy strategy = Strategy::single_aligned;
    std::vector<NodeDiag> nodes;
    std::vector<std::string> warnings;
    std::vector<std::string> geometry;  // path geometry of the first node, one document per leg
};

// f: function values at the lattice nodes, f_err their absolute errors.
LaurentResult reconstruct_laurent(const std::vector<Complex>& f, const std::vector<long double>& f_err, int p, int k,
                                  const EpsilonLattice& lattice, int d_work);

long double estimate_error(const EpsilonLattice& lattice, int k, const std::vector<long double>& node_errors);

// Slope of log|f eps^p| against log|eps| over the lattice; about -1 or below
// when the pole order is too small.
double pole_slope(const std::vector<Complex>& f, int p, const EpsilonLattice& lattice);

// The whole computation for one request.
LaurentResult evaluate(const EvalRequest& req, const std::string& cache_dir = "", bool want_geometry = false);

// One pass on a given lattice and working precision: no reruns, no shortfall check.
LaurentResult evaluate_on(const EvalRequest& req, const LatticeDesign& design, const std::string& cache_dir = "");

}  // namespace lauricella
