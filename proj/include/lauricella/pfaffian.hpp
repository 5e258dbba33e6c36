#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lauricella/model.hpp"
#include "lauricella/numkit/mpoly.hpp"

namespace lauricella {

// Variable layout for symbolic systems: x_1..x_n are variables 0..n-1, the
// family parameters follow, then the theta (index) variables.
struct VarLayout {
    Family family;
    int n;

    int x(int k) const { return k; }
    int nparams() const;
    int alpha(int k = 0) const;
    int beta(int k) const;
    int gamma(int k = 0) const;
    int theta(int k) const { return n + nparams() + k; }
    int nvars() const { return n + nparams() + n; }
    // x1.., a/a1.., b1.., c/c1.., t1..
    std::vector<std::string> names() const;
};

// Ratio A_{i+e_k}/A_i = P_k(i)/Pp_k(i); polynomials in the theta variables
// (standing for i_1..i_n) and the symbolic parameters.
struct Annihilator {
    MPoly P, Pp;
};
std::vector<Annihilator> annihilators(Family f, int n);

// dJ = sum_k M_k J dx_k. M[k][r][c]; row r gives d/dx_k of basis element r.
struct PfaffianSystem {
    Family family = Family::FD;
    int n = 1;
    std::vector<std::uint32_t> basis;
    std::vector<std::vector<std::vector<RatFun>>> M;
    bool symbolic = true;  // parameters still free
};

PfaffianSystem derive_pfaffian(Family f, int n);
// Cached variant; empty dir disables the cache.
PfaffianSystem load_or_derive(Family f, int n, const std::string& cache_dir);

// Evaluate all parameters; optional frozen coordinates (rational values) are
// substituted as well.
PfaffianSystem substitute(const PfaffianSystem& s, const NodeParams& p,
                          const std::vector<std::optional<Q>>& frozen = {});

// Exact integrability identity for every pair of directions.
bool is_flat(const PfaffianSystem& s);

std::string system_to_json(const PfaffianSystem& s);
PfaffianSystem system_from_json(const std::string& text);

constexpr int kCacheVersion = 1;

}  // namespace lauricella
