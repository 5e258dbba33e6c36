#pragma once

#include <vector>

#include "lauricella/numkit/linalg.hpp"
#include "lauricella/pathplan.hpp"

namespace lauricella {

// M(point + s) = A0/s + sum_j B_j s^j.
struct LocalData {
    QG point;
    QMat A0;
    std::vector<QMat> Bexact;  // leading terms kept exact (resonance bookkeeping)
    std::vector<HMat> B;       // all N terms embedded
    bool singular = false;     // point is a pole of M
};

// Bexact holds min(exact_terms, N) terms.
LocalData local_data(const LocalSystem& ls, const QG& point, int N, int digits, int exact_terms = 0);

struct ExponentClass {
    Q base;                             // smallest member
    std::vector<std::pair<Q, int>> members;  // exponent, algebraic multiplicity (ascending)
    int size = 0;                       // total multiplicity
    int max_offset = 0;                 // largest member - base
};

struct ExponentStructure {
    std::vector<ExponentClass> classes;
    std::vector<Q> eigenvalues;  // with multiplicity, ascending
};

ExponentStructure exponents(const QMat& A0);

// U(point + s) columns of one class: s^base * sum_{n,k} X[n][k] s^n log^k s.
struct ClassSeries {
    Q lambda;
    int cols = 0;
    std::vector<std::vector<HMat>> X;  // X[n][k], B x cols
};

struct FrobeniusSolution {
    QG point;
    ExponentStructure ex;
    std::vector<ClassSeries> classes;
    int N = 0;
    int digits = 0;
};

FrobeniusSolution frobenius_series(const LocalData& ld, const ExponentStructure& ex, int N, int digits);
// Ordinary point: U(point) = I.
FrobeniusSolution taylor_fundamental(const LocalData& ld, int N, int digits);

struct Evaluated {
    HMat U;
    long double tail = 0;
};
// s = t - point; log s on the principal branch, side from `side` on the negative axis.
Evaluated evaluate(const FrobeniusSolution& sol, const Complex& s, int side = -1);

int choose_truncation(long double q, int digits);

// Production recurrences on the polynomial form D(s) J'(s) = P(s) J(s) of a
// system re-expanded at an exact point.
struct ShiftedSystem {
    QG point;
    std::vector<std::vector<UPoly>> P;
    UPoly D;
    int zero_order = 0;  // of D at the point (0 or 1)
};
ShiftedSystem shift_system(const LocalSystem& ls, const QG& point);

struct StepResult {
    HVec value;
    long double tail = 0;   // estimated truncation error (absolute, inf-norm)
    long double peak = 0;   // largest term norm (cancellation monitor)
    int terms = 0;
};

// Ordinary point: J(point) = J0, value at point + ds.
StepResult taylor_step(const ShiftedSystem& sh, const HVec& J0, const Complex& ds, int N, int digits);

// Regular singular point with an analytic solution whose first Taylor
// coefficients v[0..m] are given; higher ones follow from
// (n d_0 - P_0) v_n = sum_{i>=1} (P_i - (n-i) d_i) v_{n-i}. Throws if n d_0 - P_0
// is singular for some n beyond the supplied coefficients.
StepResult analytic_origin_step(const ShiftedSystem& sh, const std::vector<HVec>& v, const Complex& ds, int N,
                                int digits);

// Positive integer eigenvalues of the residue at a regular singular point.
std::vector<int> resonant_orders(const ShiftedSystem& sh);

}  // namespace lauricella
