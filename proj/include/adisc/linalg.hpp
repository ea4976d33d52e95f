#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace adisc {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major. Sizes here are small (N x N frames),
/// so everything is plain O(n^3) with partial pivoting.
class CMat {
public:
    CMat() = default;
    CMat(std::size_t rows, std::size_t cols);
    static CMat identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cplx& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    CMat operator*(const CMat& rhs) const;
    CMat conjugated() const;
    CMat scaled(cplx s) const;

    /// Column j as a vector.
    std::vector<cplx> col(std::size_t j) const;
    void set_col(std::size_t j, const std::vector<cplx>& v);

    std::vector<cplx> apply(const std::vector<cplx>& x) const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cplx> a_;
};

/// LU factorization with partial pivoting of a square complex matrix.
/// Throws std::runtime_error when the matrix is numerically singular
/// (relative pivot below `pivot_tol`).
class CLu {
public:
    explicit CLu(const CMat& a, double pivot_tol = 1e-13);
    std::vector<cplx> solve(const std::vector<cplx>& b) const;
    CMat inverse() const;
    cplx det() const;
    double min_abs_pivot() const { return min_pivot_; }

private:
    std::size_t n_ = 0;
    std::vector<cplx> lu_;
    std::vector<std::size_t> perm_;
    int sign_ = 1;
    double min_pivot_ = 0.0;
};

cplx det(const CMat& a);

/// Real dense matrix, row-major.
class RMat {
public:
    RMat() = default;
    RMat(std::size_t rows, std::size_t cols);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const double& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

/// Realification of an N x N complex matrix: the 2N x 2N real matrix of the
/// underlying R-linear map in the basis (Re, Im).
RMat realify(const CMat& a);

/// Singular values (descending) by one-sided Jacobi orthogonalization.
/// Accurate for small singular values; no squaring of the condition number.
std::vector<double> singular_values(const RMat& a);

/// Numerical rank with a relative cutoff: #{sigma > rel_tol * sigma_max}.
std::size_t numerical_rank(const RMat& a, double rel_tol);

double smallest_singular_value(const RMat& a);
double smallest_singular_value(const CMat& a);
double largest_singular_value(const CMat& a);

}  // namespace adisc
