#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

#include "lauricella/numkit/hp.hpp"

namespace lauricella {

using Q = mpq_class;

// Gaussian rational re + i*im. mpq_class keeps both parts canonical.
struct QG {
    Q re, im;

    QG() = default;
    QG(long r) : re(r) {}
    QG(const Q& r) : re(r) {}
    QG(Q r, Q i) : re(std::move(r)), im(std::move(i)) {}

    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
    bool is_real() const { return sgn(im) == 0; }
    bool is_one() const { return re == 1 && sgn(im) == 0; }

    QG& operator+=(const QG& o) { re += o.re; im += o.im; return *this; }
    QG& operator-=(const QG& o) { re -= o.re; im -= o.im; return *this; }
    QG& operator*=(const QG& o);
    QG& operator/=(const QG& o);

    Complex to_complex(mpfr_prec_t bits) const { return Complex(re, im, bits); }
    std::string to_string() const;
};

QG operator+(const QG& a, const QG& b);
QG operator-(const QG& a, const QG& b);
QG operator-(const QG& a);
QG operator*(const QG& a, const QG& b);
QG operator/(const QG& a, const QG& b);
bool operator==(const QG& a, const QG& b);
inline bool operator!=(const QG& a, const QG& b) { return !(a == b); }

QG conj(const QG& a);
Q norm2(const QG& a);
QG qpow(const QG& a, long e);

// Deterministic total order (by re, then im) for sorting exact values.
bool qg_less(const QG& a, const QG& b);

// Exact parse of "p/q", "-3", "1.25", "2.5e-3".
std::optional<Q> parse_rational(const std::string& s);
std::string q_to_string(const Q& q);

}  // namespace lauricella
