#include "lauricella/numkit/linalg.hpp"

#include <cmath>
#include <sstream>

#include "lauricella/error.hpp"

namespace lauricella {

QMat qmat_zero(size_t rows, size_t cols) { return QMat(rows, QVec(cols)); }

QMat qmat_identity(size_t n) {
    QMat m = qmat_zero(n, n);
    for (size_t i = 0; i < n; ++i) m[i][i] = QG(1);
    return m;
}

QMat operator*(const QMat& a, const QMat& b) {
    size_t n = a.size(), k = b.size(), m = k ? b[0].size() : 0;
    QMat r = qmat_zero(n, m);
    for (size_t i = 0; i < n; ++i)
        for (size_t l = 0; l < k; ++l) {
            if (a[i][l].is_zero()) continue;
            for (size_t j = 0; j < m; ++j)
                if (!b[l][j].is_zero()) r[i][j] += a[i][l] * b[l][j];
        }
    return r;
}

QVec operator*(const QMat& a, const QVec& v) {
    QVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < v.size(); ++j)
            if (!a[i][j].is_zero() && !v[j].is_zero()) r[i] += a[i][j] * v[j];
    return r;
}

std::vector<size_t> rref(QMat& a) {
    std::vector<size_t> piv;
    size_t rows = a.size(), cols = rows ? a[0].size() : 0, r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t p = r;
        while (p < rows && a[p][c].is_zero()) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[r]);
        QG inv = QG(1) / a[r][c];
        for (size_t j = c; j < cols; ++j) a[r][j] *= inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c].is_zero()) continue;
            QG f = a[i][c];
            for (size_t j = c; j < cols; ++j)
                if (!a[r][j].is_zero()) a[i][j] -= f * a[r][j];
        }
        piv.push_back(c);
        ++r;
    }
    return piv;
}

size_t rank(QMat a) { return rref(a).size(); }

std::vector<QVec> nullspace(const QMat& a) {
    QMat m = a;
    auto piv = rref(m);
    size_t cols = a.empty() ? 0 : a[0].size();
    std::vector<bool> is_piv(cols, false);
    for (auto p : piv) is_piv[p] = true;
    std::vector<QVec> basis;
    for (size_t f = 0; f < cols; ++f) {
        if (is_piv[f]) continue;
        QVec v(cols);
        v[f] = QG(1);
        for (size_t r = 0; r < piv.size(); ++r) v[piv[r]] = -m[r][f];
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<QVec> solve(const QMat& a, const QVec& b) {
    size_t rows = a.size(), cols = rows ? a[0].size() : 0;
    QMat m = a;
    for (size_t i = 0; i < rows; ++i) m[i].push_back(b[i]);
    auto piv = rref(m);
    if (!piv.empty() && piv.back() == cols) return std::nullopt;
    QVec x(cols);
    for (size_t r = 0; r < piv.size(); ++r) x[piv[r]] = m[r][cols];
    return x;
}

std::optional<QMat> inverse(const QMat& a) {
    size_t n = a.size();
    QMat m = a;
    for (size_t i = 0; i < n; ++i) {
        m[i].resize(2 * n);
        m[i][n + i] = QG(1);
    }
    auto piv = rref(m);
    if (piv.size() < n || piv[n - 1] != n - 1) return std::nullopt;
    QMat inv = qmat_zero(n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) inv[i][j] = m[i][n + j];
    return inv;
}

UPoly charpoly(const QMat& a) {
    // Faddeev-LeVerrier; exact over Q(i).
    size_t n = a.size();
    std::vector<QG> c(n + 1);
    c[n] = QG(1);
    QMat mk = qmat_zero(n, n);
    for (size_t k = 1; k <= n; ++k) {
        QMat am = a * mk;
        for (size_t i = 0; i < n; ++i) am[i][i] += c[n - k + 1];
        mk = std::move(am);
        QMat amk = a * mk;
        QG tr;
        for (size_t i = 0; i < n; ++i) tr += amk[i][i];
        c[n - k] = -tr / QG(Q(static_cast<long>(k)));
    }
    return UPoly(std::move(c));
}

HMat::HMat(size_t rows, size_t cols, mpfr_prec_t bits) : r_(rows), c_(cols) {
    a_.reserve(rows * cols);
    for (size_t i = 0; i < rows * cols; ++i) a_.emplace_back(bits);
}

HMat HMat::identity(size_t n, mpfr_prec_t bits) {
    HMat m(n, n, bits);
    for (size_t i = 0; i < n; ++i) m(i, i) = Complex(1L, bits);
    return m;
}

HMat HMat::from_exact(const QMat& q, mpfr_prec_t bits) {
    HMat m(q.size(), q.empty() ? 0 : q[0].size(), bits);
    for (size_t i = 0; i < m.rows(); ++i)
        for (size_t j = 0; j < m.cols(); ++j)
            if (!q[i][j].is_zero()) m(i, j) = q[i][j].to_complex(bits);
    return m;
}

long double HMat::norm_inf() const {
    long double best = 0;
    for (size_t i = 0; i < r_; ++i) {
        long double s = 0;
        for (size_t j = 0; j < c_; ++j) s += mag((*this)(i, j));
        best = std::max(best, s);
    }
    return best;
}

HMat operator*(const HMat& a, const HMat& b) {
    mpfr_prec_t p = a.rows() && a.cols() ? a(0, 0).prec() : 64;
    HMat r(a.rows(), b.cols(), p);
    Real t(p + 8);
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t k = 0; k < a.cols(); ++k) {
            if (a(i, k).is_zero()) continue;
            for (size_t j = 0; j < b.cols(); ++j) mul_add(r(i, j), a(i, k), b(k, j), t);
        }
    return r;
}

HVec operator*(const HMat& a, const HVec& v) {
    mpfr_prec_t p = v.empty() ? 64 : v[0].prec();
    HVec r;
    Real t(p + 8);
    for (size_t i = 0; i < a.rows(); ++i) {
        Complex acc(p);
        for (size_t j = 0; j < a.cols(); ++j)
            if (!a(i, j).is_zero()) mul_add(acc, a(i, j), v[j], t);
        r.push_back(std::move(acc));
    }
    return r;
}

long double norm_inf(const HVec& v) {
    long double m = 0;
    for (const auto& x : v) m = std::max(m, mag(x));
    return m;
}

namespace {

// LU with partial pivoting applied to a block of right-hand sides.
void lu_solve(HMat& a, HMat& b, int digits) {
    size_t n = a.rows();
    long double anorm = a.norm_inf();
    long double tol = anorm * std::pow(10.0L, -digits / 2.0L);
    mpfr_prec_t p = n ? a(0, 0).prec() : 64;
    Real t(p + 8);
    for (size_t k = 0; k < n; ++k) {
        size_t piv = k;
        long double best = mag(a(k, k));
        for (size_t i = k + 1; i < n; ++i) {
            long double m = mag(a(i, k));
            if (m > best) {
                best = m;
                piv = i;
            }
        }
        if (!(best > tol) || anorm == 0) {
            std::ostringstream os;
            os << "pivot " << static_cast<double>(best) << " vs norm " << static_cast<double>(anorm) << " at column " << k;
            throw Error(ErrorCode::precision_shortfall, "ill-conditioned solve", os.str());
        }
        if (piv != k) {
            for (size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            for (size_t j = 0; j < b.cols(); ++j) std::swap(b(k, j), b(piv, j));
        }
        for (size_t i = k + 1; i < n; ++i) {
            if (a(i, k).is_zero()) continue;
            Complex f = a(i, k) / a(k, k);
            for (size_t j = k + 1; j < n; ++j) mul_sub(a(i, j), f, a(k, j), t);
            for (size_t j = 0; j < b.cols(); ++j) mul_sub(b(i, j), f, b(k, j), t);
        }
    }
    for (size_t j = 0; j < b.cols(); ++j)
        for (size_t i = n; i-- > 0;) {
            Complex s = b(i, j);
            for (size_t l = i + 1; l < n; ++l) mul_sub(s, a(i, l), b(l, j), t);
            b(i, j) = s / a(i, i);
        }
}

}  // namespace

HVec linsolve(HMat a, HVec b, int digits) {
    HMat bm(b.size(), 1, b.empty() ? 64 : b[0].prec());
    for (size_t i = 0; i < b.size(); ++i) bm(i, 0) = b[i];
    lu_solve(a, bm, digits);
    HVec x;
    for (size_t i = 0; i < b.size(); ++i) x.push_back(bm(i, 0));
    return x;
}

HMat linsolve(HMat a, HMat b, int digits) {
    lu_solve(a, b, digits);
    return b;
}

long double condition(const HMat& a, int digits) {
    mpfr_prec_t p = a.rows() ? a(0, 0).prec() : 64;
    HMat inv = linsolve(a, HMat::identity(a.rows(), p), digits);
    return a.norm_inf() * inv.norm_inf();
}

}  // namespace lauricella
