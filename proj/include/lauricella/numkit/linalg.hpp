#pragma once

#include <optional>
#include <vector>

#include "lauricella/numkit/hp.hpp"
#include "lauricella/numkit/qgauss.hpp"
#include "lauricella/numkit/upoly.hpp"

namespace lauricella {

// Exact dense matrices, row-major nested vectors.
using QVec = std::vector<QG>;
using QMat = std::vector<QVec>;

QMat qmat_zero(size_t rows, size_t cols);
QMat qmat_identity(size_t n);
QMat operator*(const QMat& a, const QMat& b);
QVec operator*(const QMat& a, const QVec& v);

// Reduced row echelon form in place; returns pivot columns.
std::vector<size_t> rref(QMat& a);
size_t rank(QMat a);
// Basis of {v : A v = 0} as column vectors.
std::vector<QVec> nullspace(const QMat& a);
// Some solution of A x = b (free variables zero), or none if inconsistent.
std::optional<QVec> solve(const QMat& a, const QVec& b);
std::optional<QMat> inverse(const QMat& a);
// det(lambda I - A), monic.
UPoly charpoly(const QMat& a);

// Dense HP matrix, row-major.
class HMat {
public:
    HMat() = default;
    HMat(size_t rows, size_t cols, mpfr_prec_t bits);
    static HMat identity(size_t n, mpfr_prec_t bits);
    static HMat from_exact(const QMat& q, mpfr_prec_t bits);

    size_t rows() const { return r_; }
    size_t cols() const { return c_; }
    Complex& operator()(size_t i, size_t j) { return a_[i * c_ + j]; }
    const Complex& operator()(size_t i, size_t j) const { return a_[i * c_ + j]; }
    long double norm_inf() const;

private:
    size_t r_ = 0, c_ = 0;
    std::vector<Complex> a_;
};

using HVec = std::vector<Complex>;

HMat operator*(const HMat& a, const HMat& b);
HVec operator*(const HMat& a, const HVec& v);
long double norm_inf(const HVec& v);

// Partial-pivoting solve. Throws Error("ill-conditioned solve") if a pivot
// falls below 10^{-digits/2} * ||A||.
HVec linsolve(HMat a, HVec b, int digits);
HMat linsolve(HMat a, HMat b, int digits);
// Infinity-norm condition number estimate via the explicit inverse.
long double condition(const HMat& a, int digits);

}  // namespace lauricella
