#include "lauricella/numkit/hp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <memory>

namespace lauricella {

namespace {

inline bool alive(const mpfr_t v) { return v->_mpfr_d != nullptr; }

mpfr_prec_t pmax(const Real& a, const Real& b) { return std::max(a.prec(), b.prec()); }

}  // namespace

Real::Real(mpfr_prec_t bits) { mpfr_init2(v_, bits); mpfr_set_zero(v_, 1); }

Real::Real(long v, mpfr_prec_t bits) { mpfr_init2(v_, bits); mpfr_set_si(v_, v, MPFR_RNDN); }

Real::Real(double v, mpfr_prec_t bits) { mpfr_init2(v_, bits); mpfr_set_d(v_, v, MPFR_RNDN); }

Real::Real(const mpq_class& q, mpfr_prec_t bits) {
    mpfr_init2(v_, bits);
    mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN);
}

Real::Real(const Real& o) {
    mpfr_init2(v_, o.prec());
    mpfr_set(v_, o.v_, MPFR_RNDN);
}

Real::Real(Real&& o) noexcept {
    v_[0] = o.v_[0];
    o.v_->_mpfr_d = nullptr;
}

Real::~Real() {
    if (alive(v_)) mpfr_clear(v_);
}

Real& Real::operator=(const Real& o) {
    if (this == &o) return *this;
    if (!alive(v_))
        mpfr_init2(v_, o.prec());
    else if (prec() != o.prec())
        mpfr_set_prec(v_, o.prec());
    mpfr_set(v_, o.v_, MPFR_RNDN);
    return *this;
}

Real& Real::operator=(Real&& o) noexcept {
    if (this == &o) return *this;
    if (alive(v_)) mpfr_clear(v_);
    v_[0] = o.v_[0];
    o.v_->_mpfr_d = nullptr;
    return *this;
}

Real& Real::operator+=(const Real& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
Real& Real::operator-=(const Real& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
Real& Real::operator*=(const Real& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
Real& Real::operator/=(const Real& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }

std::string Real::to_string(int digits) const {
    if (mpfr_nan_p(v_)) return "nan";
    if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
    digits = std::max(digits, 1);
    if (mpfr_zero_p(v_)) {
        std::string s = "0.";
        s.append(static_cast<size_t>(std::max(digits - 1, 1)), '0');
        return s + "e+0";
    }
    mpfr_exp_t e = 0;
    char* raw = mpfr_get_str(nullptr, &e, 10, static_cast<size_t>(digits), v_, MPFR_RNDN);
    std::string m(raw);
    mpfr_free_str(raw);
    std::string out;
    size_t i = 0;
    if (m[0] == '-') {
        out.push_back('-');
        i = 1;
    }
    out.push_back(m[i]);
    out.push_back('.');
    if (i + 1 < m.size())
        out.append(m, i + 1, std::string::npos);
    else
        out.push_back('0');
    long ex = static_cast<long>(e) - 1;
    out += (ex < 0 ? "e-" : "e+") + std::to_string(std::labs(ex));
    return out;
}

Real Real::pi(mpfr_prec_t bits) {
    Real r(bits);
    mpfr_const_pi(r.v_, MPFR_RNDN);
    return r;
}

Real operator+(const Real& a, const Real& b) { Real r(pmax(a, b)); mpfr_add(r.get(), a.get(), b.get(), MPFR_RNDN); return r; }
Real operator-(const Real& a, const Real& b) { Real r(pmax(a, b)); mpfr_sub(r.get(), a.get(), b.get(), MPFR_RNDN); return r; }
Real operator*(const Real& a, const Real& b) { Real r(pmax(a, b)); mpfr_mul(r.get(), a.get(), b.get(), MPFR_RNDN); return r; }
Real operator/(const Real& a, const Real& b) { Real r(pmax(a, b)); mpfr_div(r.get(), a.get(), b.get(), MPFR_RNDN); return r; }
Real operator-(const Real& a) { Real r(a.prec()); mpfr_neg(r.get(), a.get(), MPFR_RNDN); return r; }
bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.get(), b.get()) != 0; }
bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.get(), b.get()) != 0; }

Real abs(const Real& a) { Real r(a.prec()); mpfr_abs(r.get(), a.get(), MPFR_RNDN); return r; }
Real sqrt(const Real& a) { Real r(a.prec()); mpfr_sqrt(r.get(), a.get(), MPFR_RNDN); return r; }
Real log(const Real& a) { Real r(a.prec()); mpfr_log(r.get(), a.get(), MPFR_RNDN); return r; }
Real exp(const Real& a) { Real r(a.prec()); mpfr_exp(r.get(), a.get(), MPFR_RNDN); return r; }
Real atan2(const Real& y, const Real& x) { Real r(pmax(y, x)); mpfr_atan2(r.get(), y.get(), x.get(), MPFR_RNDN); return r; }

Complex& Complex::operator+=(const Complex& o) { re += o.re; im += o.im; return *this; }
Complex& Complex::operator-=(const Complex& o) { re -= o.re; im -= o.im; return *this; }

Complex& Complex::operator*=(const Complex& o) {
    Real r(prec());
    mpfr_fmms(r.get(), re.get(), o.re.get(), im.get(), o.im.get(), MPFR_RNDN);
    mpfr_fmma(im.get(), re.get(), o.im.get(), im.get(), o.re.get(), MPFR_RNDN);
    re = std::move(r);
    return *this;
}

Complex& Complex::operator/=(const Complex& o) {
    *this = *this / o;
    return *this;
}

Complex& Complex::operator*=(const Real& o) { re *= o; im *= o; return *this; }

void Complex::set_zero() {
    mpfr_set_zero(re.get(), 1);
    mpfr_set_zero(im.get(), 1);
}

void Complex::set(const Complex& o) {
    mpfr_set(re.get(), o.re.get(), MPFR_RNDN);
    mpfr_set(im.get(), o.im.get(), MPFR_RNDN);
}

Complex operator+(const Complex& a, const Complex& b) { return Complex(a.re + b.re, a.im + b.im); }
Complex operator-(const Complex& a, const Complex& b) { return Complex(a.re - b.re, a.im - b.im); }
Complex operator-(const Complex& a) { return Complex(-a.re, -a.im); }

Complex operator*(const Complex& a, const Complex& b) {
    mpfr_prec_t p = std::max(a.prec(), b.prec());
    Complex r(p);
    mpfr_fmms(r.re.get(), a.re.get(), b.re.get(), a.im.get(), b.im.get(), MPFR_RNDN);
    mpfr_fmma(r.im.get(), a.re.get(), b.im.get(), a.im.get(), b.re.get(), MPFR_RNDN);
    return r;
}

Complex operator*(const Complex& a, const Real& b) { return Complex(a.re * b, a.im * b); }

Complex operator/(const Complex& a, const Complex& b) {
    mpfr_prec_t p = std::max(a.prec(), b.prec());
    Real den(p + 16), t(p + 16);
    mpfr_fmma(den.get(), b.re.get(), b.re.get(), b.im.get(), b.im.get(), MPFR_RNDN);
    Complex r(p);
    mpfr_fmma(t.get(), a.re.get(), b.re.get(), a.im.get(), b.im.get(), MPFR_RNDN);
    mpfr_div(r.re.get(), t.get(), den.get(), MPFR_RNDN);
    mpfr_fmms(t.get(), a.im.get(), b.re.get(), a.re.get(), b.im.get(), MPFR_RNDN);
    mpfr_div(r.im.get(), t.get(), den.get(), MPFR_RNDN);
    return r;
}

Complex conj(const Complex& a) { return Complex(a.re, -a.im); }

Real abs(const Complex& a) {
    Real r(a.prec());
    mpfr_hypot(r.get(), a.re.get(), a.im.get(), MPFR_RNDN);
    return r;
}

Real norm2(const Complex& a) {
    Real r(a.prec());
    mpfr_fmma(r.get(), a.re.get(), a.re.get(), a.im.get(), a.im.get(), MPFR_RNDN);
    return r;
}

Real arg(const Complex& a) { return atan2(a.im, a.re); }

Complex exp(const Complex& a) {
    mpfr_prec_t p = a.prec();
    Real m = exp(a.re);
    Complex r(p);
    mpfr_sin_cos(r.im.get(), r.re.get(), a.im.get(), MPFR_RNDN);
    r.re *= m;
    r.im *= m;
    return r;
}

Complex log(const Complex& a, int side) {
    Complex r(Real(a.prec()), Real(a.prec()));
    r.re = log(abs(a));
    if (a.im.is_zero() && a.re.sign() < 0) {
        r.im = Real::pi(a.prec());
        if (side < 0) r.im = -r.im;
    } else {
        r.im = arg(a);
    }
    return r;
}

Complex pow(const Complex& a, const mpq_class& q, int side) {
    mpfr_prec_t p = a.prec();
    if (q == 0) return Complex(1L, p);
    if (q.get_den() == 1 && q > 0 && q < 64) {
        long e = q.get_num().get_si();
        Complex r(1L, p), b = a;
        while (e) {
            if (e & 1) r *= b;
            e >>= 1;
            if (e) b *= b;
        }
        return r;
    }
    Complex l = log(a, side);
    Real rq(q, p);
    return exp(l * rq);
}

Complex sqrt(const Complex& a) { return pow(a, mpq_class(1, 2)); }

void mul_add(Complex& acc, const Complex& a, const Complex& b, Real& t) {
    mpfr_fmms(t.get(), a.re.get(), b.re.get(), a.im.get(), b.im.get(), MPFR_RNDN);
    mpfr_add(acc.re.get(), acc.re.get(), t.get(), MPFR_RNDN);
    mpfr_fmma(t.get(), a.re.get(), b.im.get(), a.im.get(), b.re.get(), MPFR_RNDN);
    mpfr_add(acc.im.get(), acc.im.get(), t.get(), MPFR_RNDN);
}

void mul_sub(Complex& acc, const Complex& a, const Complex& b, Real& t) {
    mpfr_fmms(t.get(), a.re.get(), b.re.get(), a.im.get(), b.im.get(), MPFR_RNDN);
    mpfr_sub(acc.re.get(), acc.re.get(), t.get(), MPFR_RNDN);
    mpfr_fmma(t.get(), a.re.get(), b.im.get(), a.im.get(), b.re.get(), MPFR_RNDN);
    mpfr_sub(acc.im.get(), acc.im.get(), t.get(), MPFR_RNDN);
}

long double mag(const Real& a) { return std::fabs(a.to_ldouble()); }

long double mag(const Complex& a) {
    long double x = a.re.to_ldouble(), y = a.im.to_ldouble();
    return std::sqrt(x * x + y * y);
}

}  // namespace lauricella
