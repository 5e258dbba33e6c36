#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lauricella/numkit/hp.hpp"
#include "lauricella/numkit/qgauss.hpp"

namespace lauricella {

// a + b*eps
struct LinearForm {
    Q a, b;

    LinearForm() = default;
    LinearForm(Q c) : a(std::move(c)) {}
    LinearForm(Q c, Q s) : a(std::move(c)), b(std::move(s)) {}

    Q at(const Q& eps) const { return a + b * eps; }
    bool depends_on_eps() const { return sgn(b) != 0; }
    std::string to_string(const std::string& eps = "ep") const;
    friend bool operator==(const LinearForm& x, const LinearForm& y) { return x.a == y.a && x.b == y.b; }
};

enum class Family { FA, FB, FD };

const char* family_name(Family f);

// Parameter layout follows the series definitions:
//   FA: alpha[1], beta[n], gamma[n]
//   FB: alpha[n], beta[n], gamma[1]
//   FD: alpha[1], beta[n], gamma[1]
struct FunctionSpec {
    Family family = Family::FD;
    int n = 1;
    std::vector<LinearForm> alpha, beta, gamma;
    std::vector<QG> args;

    void validate() const;  // throws Error(usage)
    // Drop the coordinates not in `keep` (the function restricted to x_j = 0 there).
    FunctionSpec reduced(const std::vector<int>& keep) const;
    std::string to_string(const std::string& eps = "ep") const;
};

// Parameters evaluated at an exact eps node.
struct NodeParams {
    Family family = Family::FD;
    int n = 1;
    std::vector<Q> alpha, beta, gamma;

    static NodeParams at(const FunctionSpec& s, const Q& eps);
    // True if some Pochhammer in a denominator can vanish (gamma-type
    // parameter a non-positive integer).
    bool degenerate() const;
};

// A_{i+e_k} / A_i from the series definition.
Q coefficient_ratio(const NodeParams& p, const std::vector<int>& i, int k);

// Theta basis as bit masks over coordinates; binary-counter order for
// FA/FB (all subsets), {0, e_1, ..., e_n} for FD.
std::vector<std::uint32_t> theta_basis(Family f, int n);

struct DomainCheck {
    bool inside = false;
    Q margin;  // 1 - max|x_i| (FB, FD) or 1 - sum|x_i| (FA); rational lower bound for complex args
};
DomainCheck convergence_check(Family f, const std::vector<QG>& args);

// Basis vector J = (theta_J F) at args by shell-wise summation of the
// defining series. Requires margin >= 1/4.
std::vector<Complex> sum_series(const NodeParams& p, const std::vector<QG>& args, int target_digits);

// Exact Taylor coefficients of J(kappa*t) at t = 0 up to t^mmax.
std::vector<std::vector<QG>> line_taylor_exact(const NodeParams& p, const std::vector<QG>& kappa, int mmax);

// Direct eps-expansion of F at args: each series coefficient is expanded as a
// truncated power series in eps (no lattice). Requires margin >= 1/4 and
// parameters whose Pochhammer denominators do not vanish at eps = 0.
std::vector<Complex> eps_series_oracle(const FunctionSpec& s, int order, int digits);

struct Options {
    bool simple_continuation = false;
    int threads = 0;              // 0 = all hardware threads
    int frobenius_terms = 0;      // 0 = automatic
    int internal_precision = 0;   // 0 = automatic
    int delta_sign = -1;          // -1 for -i, +1 for +i
};

struct EvalRequest {
    FunctionSpec spec;
    int order = 1;
    int digits = 30;
    int pole_order = 0;
    Options options;
};

}  // namespace lauricella
