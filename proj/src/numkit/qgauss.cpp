#include "lauricella/numkit/qgauss.hpp"

#include <cctype>
#include <stdexcept>

namespace lauricella {

QG& QG::operator*=(const QG& o) {
    Q r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
}

QG& QG::operator/=(const QG& o) {
    *this = *this / o;
    return *this;
}

std::string QG::to_string() const {
    if (sgn(im) == 0) return q_to_string(re);
    std::string s;
    if (sgn(re) != 0) s = q_to_string(re) + (sgn(im) > 0 ? "+" : "");
    return s + q_to_string(im) + "*I";
}

QG operator+(const QG& a, const QG& b) { return QG(a.re + b.re, a.im + b.im); }
QG operator-(const QG& a, const QG& b) { return QG(a.re - b.re, a.im - b.im); }
QG operator-(const QG& a) { return QG(-a.re, -a.im); }

QG operator*(const QG& a, const QG& b) {
    if (sgn(a.im) == 0 && sgn(b.im) == 0) return QG(a.re * b.re);
    return QG(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
}

QG operator/(const QG& a, const QG& b) {
    if (b.is_zero()) throw std::domain_error("division by zero in exact arithmetic");
    if (sgn(b.im) == 0) return QG(a.re / b.re, a.im / b.re);
    Q d = b.re * b.re + b.im * b.im;
    return QG((a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d);
}

bool operator==(const QG& a, const QG& b) { return a.re == b.re && a.im == b.im; }

QG conj(const QG& a) { return QG(a.re, -a.im); }
Q norm2(const QG& a) { return a.re * a.re + a.im * a.im; }

QG qpow(const QG& a, long e) {
    if (e < 0) return qpow(QG(1) / a, -e);
    QG r(1), b = a;
    while (e) {
        if (e & 1) r *= b;
        e >>= 1;
        if (e) b *= b;
    }
    return r;
}

bool qg_less(const QG& a, const QG& b) {
    if (a.re != b.re) return a.re < b.re;
    return a.im < b.im;
}

std::optional<Q> parse_rational(const std::string& s) {
    if (s.empty()) return std::nullopt;
    size_t slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            mpz_class n, d;
            if (n.set_str(s.substr(0, slash), 10) != 0 || d.set_str(s.substr(slash + 1), 10) != 0 || d == 0)
                return std::nullopt;
            Q q(n, d);
            q.canonicalize();
            return q;
        }
        size_t i = 0;
        bool neg = false;
        if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
        std::string digits;
        long scale = 0;
        bool seen_dot = false, any = false;
        for (; i < s.size(); ++i) {
            char c = s[i];
            if (std::isdigit(static_cast<unsigned char>(c))) {
                digits.push_back(c);
                any = true;
                if (seen_dot) ++scale;
            } else if (c == '.' && !seen_dot) {
                seen_dot = true;
            } else {
                break;
            }
        }
        if (!any) return std::nullopt;
        long ex = 0;
        if (i < s.size()) {
            if (s[i] != 'e' && s[i] != 'E') return std::nullopt;
            std::string es = s.substr(i + 1);
            if (es.empty()) return std::nullopt;
            size_t pos = 0;
            ex = std::stol(es, &pos);
            if (pos != es.size()) return std::nullopt;
        }
        mpz_class n(digits, 10);
        if (neg) n = -n;
        long p10 = ex - scale;
        if (p10 > 100000 || p10 < -100000) return std::nullopt;
        mpz_class pw;
        mpz_ui_pow_ui(pw.get_mpz_t(), 10, static_cast<unsigned long>(p10 < 0 ? -p10 : p10));
        Q q = p10 < 0 ? Q(n, pw) : Q(n * pw);
        q.canonicalize();
        return q;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

std::string q_to_string(const Q& q) { return q.get_str(10); }

}  // namespace lauricella
