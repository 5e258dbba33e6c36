#pragma once

#include <utility>
#include <vector>

#include "lauricella/numkit/hp.hpp"
#include "lauricella/numkit/mpoly.hpp"
#include "lauricella/numkit/qgauss.hpp"

namespace lauricella {

// Dense univariate polynomial over Gaussian rationals, c[i] multiplies t^i.
class UPoly {
public:
    std::vector<QG> c;

    UPoly() = default;
    UPoly(const QG& a) {
        if (!a.is_zero()) c.push_back(a);
    }
    explicit UPoly(std::vector<QG> coeffs) : c(std::move(coeffs)) { trim(); }
    static UPoly t_power(int k);  // t^k

    int deg() const { return static_cast<int>(c.size()) - 1; }
    bool is_zero() const { return c.empty(); }
    const QG& lead() const { return c.back(); }
    QG coef(int i) const { return i >= 0 && i < static_cast<int>(c.size()) ? c[static_cast<size_t>(i)] : QG(); }
    void trim();

    UPoly& operator+=(const UPoly& o);
    UPoly& operator-=(const UPoly& o);
    UPoly& operator*=(const QG& s);

    QG eval(const QG& t) const;
    Complex eval(const Complex& t) const;
    UPoly derivative() const;
    // p(t + a)
    UPoly shift(const QG& a) const;
    QG make_monic();
    // Multiplicity of the root t = 0.
    int zero_order() const;

    friend bool operator==(const UPoly& a, const UPoly& b) { return a.c == b.c; }
};

UPoly operator+(const UPoly& a, const UPoly& b);
UPoly operator-(const UPoly& a, const UPoly& b);
UPoly operator*(const UPoly& a, const UPoly& b);
UPoly operator*(const UPoly& a, const QG& s);
std::pair<UPoly, UPoly> divmod(const UPoly& a, const UPoly& b);
UPoly gcd(UPoly a, UPoly b);  // monic
UPoly exact_div(const UPoly& a, const UPoly& b);

// Yun decomposition: p = lc * prod f_i^{m_i}, each f_i monic squarefree.
std::vector<std::pair<UPoly, int>> squarefree(const UPoly& p);

struct URatFun {
    UPoly num, den;

    URatFun() : den(QG(1)) {}
    URatFun(UPoly n, UPoly d);

    bool is_zero() const { return num.is_zero(); }
};

URatFun operator+(const URatFun& a, const URatFun& b);
URatFun operator*(const URatFun& a, const QG& s);

// Restrict p(x_0..x_{n-1}) (variables at indices var_index) to the line
// x_i = anchor_i + kappa_i * t. All other variables must be absent.
UPoly line_restrict(const MPoly& p, const std::vector<int>& var_index, const std::vector<QG>& anchor,
                    const std::vector<QG>& kappa);

// Coefficients embedded at the given precision.
std::vector<Complex> to_hp(const UPoly& p, mpfr_prec_t bits);

}  // namespace lauricella
