#pragma once

#include <optional>
#include <vector>

#include "lauricella/numkit/hp.hpp"
#include "lauricella/numkit/qgauss.hpp"
#include "lauricella/numkit/upoly.hpp"

namespace lauricella {

struct Root {
    Complex z;
    long double radius = 0;  // error radius
    int multiplicity = 1;    // size of the cluster this root belongs to
};

// All deg(p) roots of sum coeffs[i] t^i at `digits` working precision.
// Throws Error("root-finding failure") if the iteration does not settle.
std::vector<Root> poly_roots(const std::vector<Complex>& coeffs, int digits);

// Gaussian rational with both denominators <= denom_bound within
// 10^{-digits/2} of x, if any.
std::optional<QG> rationalize(const Complex& x, long denom_bound, int digits);
std::optional<Q> rationalize(const Real& x, long denom_bound, int digits);

struct ExactRoot {
    Complex approx;
    std::optional<QG> exact;  // set when verified p(exact) == 0
    int multiplicity = 1;
};

// Distinct roots of an exact polynomial with multiplicities (squarefree
// factorization first, then numeric roots with exact rational recovery).
std::vector<ExactRoot> roots_exact(const UPoly& p, int digits, long denom_bound = 1000000);

}  // namespace lauricella
