#pragma once

#include <mpfr.h>
#include <gmpxx.h>

#include <string>
#include <utility>

namespace lauricella {

// Decimal working precision. Every HP value carries its own binary precision;
// there is no global default.
struct Prec {
    int digits = 30;

    mpfr_prec_t bits() const { return static_cast<mpfr_prec_t>(digits * 3.3219280948873623) + 24; }
    static Prec from_bits(mpfr_prec_t b) { return Prec{static_cast<int>((b - 24) / 3.3219280948873623)}; }
};

class Real {
public:
    explicit Real(mpfr_prec_t bits = 64);
    Real(long v, mpfr_prec_t bits);
    Real(double v, mpfr_prec_t bits);
    Real(const mpq_class& q, mpfr_prec_t bits);
    Real(const Real& o);
    Real(Real&& o) noexcept;
    ~Real();

    Real& operator=(const Real& o);
    Real& operator=(Real&& o) noexcept;

    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }
    mpfr_prec_t prec() const { return mpfr_get_prec(v_); }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    long double to_ldouble() const { return mpfr_get_ld(v_, MPFR_RNDN); }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    bool is_finite() const { return mpfr_number_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    Real& operator+=(const Real& o);
    Real& operator-=(const Real& o);
    Real& operator*=(const Real& o);
    Real& operator/=(const Real& o);

    // Scientific notation with `digits` significant digits.
    std::string to_string(int digits) const;

    static Real pi(mpfr_prec_t bits);

private:
    mpfr_t v_;
};

Real operator+(const Real& a, const Real& b);
Real operator-(const Real& a, const Real& b);
Real operator*(const Real& a, const Real& b);
Real operator/(const Real& a, const Real& b);
Real operator-(const Real& a);
bool operator<(const Real& a, const Real& b);
bool operator>(const Real& a, const Real& b);

Real abs(const Real& a);
Real sqrt(const Real& a);
Real log(const Real& a);
Real exp(const Real& a);
Real atan2(const Real& y, const Real& x);

class Complex {
public:
    Real re, im;

    explicit Complex(mpfr_prec_t bits = 64) : re(bits), im(bits) {}
    Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
    Complex(const mpq_class& r, const mpq_class& i, mpfr_prec_t bits) : re(r, bits), im(i, bits) {}
    Complex(long r, mpfr_prec_t bits) : re(r, bits), im(0L, bits) {}

    mpfr_prec_t prec() const { return re.prec(); }
    bool is_zero() const { return re.is_zero() && im.is_zero(); }
    bool is_finite() const { return re.is_finite() && im.is_finite(); }

    Complex& operator+=(const Complex& o);
    Complex& operator-=(const Complex& o);
    Complex& operator*=(const Complex& o);
    Complex& operator/=(const Complex& o);
    Complex& operator*=(const Real& o);

    void set_zero();
    void set(const Complex& o);  // value copy, keeps this precision
};

Complex operator+(const Complex& a, const Complex& b);
Complex operator-(const Complex& a, const Complex& b);
Complex operator*(const Complex& a, const Complex& b);
Complex operator*(const Complex& a, const Real& b);
Complex operator/(const Complex& a, const Complex& b);
Complex operator-(const Complex& a);

Complex conj(const Complex& a);
Real abs(const Complex& a);
Real norm2(const Complex& a);
Real arg(const Complex& a);
Complex exp(const Complex& a);
Complex sqrt(const Complex& a);

// Principal log. On the negative real axis the side is taken from `side`:
// side < 0 means approached from below (log = ln|z| - i pi), side > 0 from above.
Complex log(const Complex& a, int side = 1);
// a^q = exp(q log a) on the branch selected by `side`.
Complex pow(const Complex& a, const mpq_class& q, int side = 1);

// acc += a*b without temporaries; t is scratch of at least acc's precision.
void mul_add(Complex& acc, const Complex& a, const Complex& b, Real& t);
void mul_sub(Complex& acc, const Complex& a, const Complex& b, Real& t);

// Cheap magnitude for error bookkeeping.
long double mag(const Complex& a);
long double mag(const Real& a);

}  // namespace lauricella
