#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "lauricella/numkit/qgauss.hpp"

namespace lauricella {

constexpr int kMaxVars = 16;
using Exp = std::array<std::uint8_t, kMaxVars>;

// Sparse multivariate polynomial over Q. Terms are kept in lex order with
// variable 0 most significant; begin() is the leading term.
class MPoly {
public:
    using Terms = std::map<Exp, Q, std::greater<Exp>>;

    MPoly() = default;
    explicit MPoly(const Q& c);
    static MPoly var(int i, int power = 1);
    static MPoly monomial(const Exp& e, const Q& c);

    const Terms& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    bool is_const() const;
    Q const_value() const;  // value of the constant term
    size_t size() const { return t_.size(); }

    const Exp& lead_exp() const { return t_.begin()->first; }
    const Q& lead_coef() const { return t_.begin()->second; }

    int degree(int v) const;
    int total_degree() const;
    bool uses(int v) const;
    std::uint32_t var_mask() const;

    MPoly& operator+=(const MPoly& o);
    MPoly& operator-=(const MPoly& o);
    MPoly& operator*=(const MPoly& o);
    MPoly& operator*=(const Q& c);

    void add_term(const Exp& e, const Q& c);

    MPoly derivative(int v) const;
    // Replace variable v by a constant.
    MPoly subst(int v, const Q& value) const;
    // Coefficients of powers of v; entries do not involve v.
    std::vector<MPoly> coeffs_in(int v) const;
    static MPoly from_coeffs(int v, const std::vector<MPoly>& c);

    // Make the leading coefficient 1 (no-op on zero); returns the factor divided out.
    Q make_monic();

    std::string to_string(const std::vector<std::string>& names) const;

    friend bool operator==(const MPoly& a, const MPoly& b) { return a.t_ == b.t_; }
    friend bool operator!=(const MPoly& a, const MPoly& b) { return !(a == b); }

private:
    Terms t_;
};

MPoly operator+(const MPoly& a, const MPoly& b);
MPoly operator-(const MPoly& a, const MPoly& b);
MPoly operator-(const MPoly& a);
MPoly operator*(const MPoly& a, const MPoly& b);
MPoly operator*(const MPoly& a, const Q& c);
MPoly pow(const MPoly& a, int e);

// Exact division; throws std::domain_error if b does not divide a.
MPoly exact_div(const MPoly& a, const MPoly& b);
bool divides(const MPoly& b, const MPoly& a, MPoly* quotient = nullptr);

// Monic gcd (primitive PRS, recursive on variables).
MPoly gcd(const MPoly& a, const MPoly& b);

// Rational function num/den with den monic and gcd(num, den) = 1.
struct RatFun {
    MPoly num, den;

    RatFun() : num(), den(Q(1)) {}
    RatFun(MPoly n) : num(std::move(n)), den(Q(1)) {}
    RatFun(MPoly n, MPoly d, bool reduce = true);

    bool is_zero() const { return num.is_zero(); }
    void normalize();
    RatFun derivative(int v) const;
};

RatFun operator+(const RatFun& a, const RatFun& b);
RatFun operator-(const RatFun& a, const RatFun& b);
RatFun operator*(const RatFun& a, const RatFun& b);
RatFun operator/(const RatFun& a, const RatFun& b);
RatFun operator-(const RatFun& a);
bool equal_cross(const RatFun& a, const RatFun& b);

// Small parser for polynomial / rational expressions in named variables:
// + - * / ^ with integer exponents, parentheses, rationals and decimals.
RatFun parse_ratfun(const std::string& text, const std::vector<std::string>& names);
MPoly parse_mpoly(const std::string& text, const std::vector<std::string>& names);

}  // namespace lauricella
