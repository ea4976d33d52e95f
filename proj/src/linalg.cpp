#include "adisc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adisc {

CMat::CMat(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), a_(rows * cols, cplx(0.0, 0.0)) {}

CMat CMat::identity(std::size_t n) {
    CMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMat CMat::operator*(const CMat& rhs) const {
    if (cols_ != rhs.rows_) throw std::invalid_argument("CMat multiply: shape mismatch");
    CMat out(rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const cplx aik = (*this)(i, k);
            if (aik == cplx(0.0, 0.0)) continue;
            for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += aik * rhs(k, j);
        }
    return out;
}

CMat CMat::conjugated() const {
    CMat out(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out(i, j) = std::conj((*this)(i, j));
    return out;
}

CMat CMat::scaled(cplx s) const {
    CMat out(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out(i, j) = s * (*this)(i, j);
    return out;
}

std::vector<cplx> CMat::col(std::size_t j) const {
    std::vector<cplx> v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

void CMat::set_col(std::size_t j, const std::vector<cplx>& v) {
    if (v.size() != rows_) throw std::invalid_argument("CMat::set_col: size mismatch");
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

std::vector<cplx> CMat::apply(const std::vector<cplx>& x) const {
    if (x.size() != cols_) throw std::invalid_argument("CMat::apply: size mismatch");
    std::vector<cplx> y(rows_, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
}

CLu::CLu(const CMat& a, double pivot_tol) {
    if (a.rows() != a.cols()) throw std::invalid_argument("CLu: matrix must be square");
    n_ = a.rows();
    lu_.resize(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) lu_[i * n_ + j] = a(i, j);
    perm_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) perm_[i] = i;

    double max_abs = 0.0;
    for (const cplx& v : lu_) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs == 0.0) throw std::runtime_error("CLu: zero matrix");

    min_pivot_ = max_abs;
    for (std::size_t k = 0; k < n_; ++k) {
        std::size_t p = k;
        double best = std::abs(lu_[perm_[k] * n_ + k]);
        for (std::size_t i = k + 1; i < n_; ++i) {
            double v = std::abs(lu_[perm_[i] * n_ + k]);
            if (v > best) { best = v; p = i; }
        }
        if (best < pivot_tol * max_abs)
            throw std::runtime_error("CLu: numerically singular matrix (pivot " +
                                     std::to_string(best / max_abs) + " relative)");
        if (p != k) { std::swap(perm_[p], perm_[k]); sign_ = -sign_; }
        min_pivot_ = std::min(min_pivot_, best);
        const cplx piv = lu_[perm_[k] * n_ + k];
        for (std::size_t i = k + 1; i < n_; ++i) {
            cplx& lik = lu_[perm_[i] * n_ + k];
            lik /= piv;
            for (std::size_t j = k + 1; j < n_; ++j)
                lu_[perm_[i] * n_ + j] -= lik * lu_[perm_[k] * n_ + j];
        }
    }
}

std::vector<cplx> CLu::solve(const std::vector<cplx>& b) const {
    if (b.size() != n_) throw std::invalid_argument("CLu::solve: size mismatch");
    std::vector<cplx> y(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        cplx s = b[perm_[i]];
        for (std::size_t j = 0; j < i; ++j) s -= lu_[perm_[i] * n_ + j] * y[j];
        y[i] = s;
    }
    for (std::size_t ii = n_; ii-- > 0;) {
        cplx s = y[ii];
        for (std::size_t j = ii + 1; j < n_; ++j) s -= lu_[perm_[ii] * n_ + j] * y[j];
        y[ii] = s / lu_[perm_[ii] * n_ + ii];
    }
    return y;
}

CMat CLu::inverse() const {
    CMat inv(n_, n_);
    std::vector<cplx> e(n_, cplx(0.0, 0.0));
    for (std::size_t j = 0; j < n_; ++j) {
        e[j] = 1.0;
        inv.set_col(j, solve(e));
        e[j] = 0.0;
    }
    return inv;
}

cplx CLu::det() const {
    cplx d(static_cast<double>(sign_), 0.0);
    for (std::size_t i = 0; i < n_; ++i) d *= lu_[perm_[i] * n_ + i];
    return d;
}

cplx det(const CMat& a) { return CLu(a).det(); }

RMat::RMat(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

RMat realify(const CMat& a) {
    const std::size_t n = a.rows(), m = a.cols();
    RMat r(2 * n, 2 * m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const cplx v = a(i, j);
            r(i, j) = v.real();
            r(i, j + m) = -v.imag();
            r(i + n, j) = v.imag();
            r(i + n, j + m) = v.real();
        }
    return r;
}

// One-sided Jacobi: rotate column pairs until all are mutually orthogonal,
// then the singular values are the column norms.
std::vector<double> singular_values(const RMat& a) {
    const std::size_t m = a.rows(), n = a.cols();
    if (n == 0) return {};
    // Work on the taller orientation so columns stay the short dimension.
    std::vector<std::vector<double>> c;
    if (m >= n) {
        c.assign(n, std::vector<double>(m));
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < m; ++i) c[j][i] = a(i, j);
    } else {
        c.assign(m, std::vector<double>(n));
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t i = 0; i < n; ++i) c[j][i] = a(j, i);
    }
    const std::size_t nc = c.size();
    const std::size_t len = c[0].size();

    auto dot = [len](const std::vector<double>& x, const std::vector<double>& y) {
        double s = 0.0;
        for (std::size_t i = 0; i < len; ++i) s += x[i] * y[i];
        return s;
    };

    const double tol = 1e-15;
    for (int sweep = 0; sweep < 40; ++sweep) {
        bool converged = true;
        for (std::size_t p = 0; p + 1 < nc; ++p) {
            for (std::size_t q = p + 1; q < nc; ++q) {
                const double app = dot(c[p], c[p]);
                const double aqq = dot(c[q], c[q]);
                const double apq = dot(c[p], c[q]);
                if (std::abs(apq) <= tol * std::sqrt(app * aqq) || apq == 0.0) continue;
                converged = false;
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;
                for (std::size_t i = 0; i < len; ++i) {
                    const double xp = c[p][i], xq = c[q][i];
                    c[p][i] = cs * xp - sn * xq;
                    c[q][i] = sn * xp + cs * xq;
                }
            }
        }
        if (converged) break;
    }

    std::vector<double> sv(nc);
    for (std::size_t j = 0; j < nc; ++j) sv[j] = std::sqrt(dot(c[j], c[j]));
    std::sort(sv.begin(), sv.end(), std::greater<double>());
    return sv;
}

std::size_t numerical_rank(const RMat& a, double rel_tol) {
    const std::vector<double> sv = singular_values(a);
    if (sv.empty() || sv.front() == 0.0) return 0;
    const double cutoff = rel_tol * sv.front();
    std::size_t r = 0;
    for (double s : sv)
        if (s > cutoff) ++r;
    return r;
}

double smallest_singular_value(const RMat& a) {
    const std::vector<double> sv = singular_values(a);
    return sv.empty() ? 0.0 : sv.back();
}

double smallest_singular_value(const CMat& a) {
    return smallest_singular_value(realify(a));
}

double largest_singular_value(const CMat& a) {
    const std::vector<double> sv = singular_values(realify(a));
    return sv.empty() ? 0.0 : sv.front();
}

}  // namespace adisc
