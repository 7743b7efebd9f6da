#pragma once

// Self-contained numerical substrate: small dense symmetric solves,
// standard normal and chi-squared distribution functions, finite
// differences, and a one-sample Kolmogorov-Smirnov test. Everything here
// is pure and deterministic; the matrices involved are tiny (m <= ~20).

#include <cstddef>
#include <functional>
#include <vector>

namespace phtest {

using Vector = std::vector<double>;

/// Dense row-major matrix, sized for small regression problems.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, value) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    void fill(double value) { data_.assign(data_.size(), value); }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
        return t;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix multiply(const Matrix& a, const Matrix& b);
Vector multiply(const Matrix& a, const Vector& x);

double dot(const Vector& a, const Vector& b);
double norm_inf(const Vector& v);
double max_abs(const Matrix& m);

/// x' A x for square A.
double quadratic_form(const Matrix& a, const Vector& x);

/// Result of a symmetric positive-definite solve A X = B.
struct SpdSolveResult {
    Matrix solution;     // m x nrhs, valid only when success
    double rcond = 0.0;  // 1-norm reciprocal condition estimate
    bool success = false;

    /// First solution column, for solves against a single right-hand side.
    Vector solution_vector() const {
        Vector x(solution.rows());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = solution(i, 0);
        return x;
    }
};

/// Cholesky solve with iterative refinement and an exact 1-norm condition
/// estimate (the inverse is formed explicitly; m is small). Fails, rather
/// than returning garbage, when A is not positive definite.
SpdSolveResult spd_solve(const Matrix& a, const Matrix& b);
SpdSolveResult spd_solve(const Matrix& a, const Vector& b);

// --- distribution functions ---

/// Standard normal c.d.f., absolute error below 1e-12 on [-8, 8].
double std_normal_cdf(double x);

/// Inverse of std_normal_cdf; p must lie strictly inside (0, 1).
double std_normal_quantile(double p);

/// Survival function of the chi-squared law with k degrees of freedom,
/// via the regularized incomplete gamma function.
double chi2_sf(double x, int k);

/// Regularized lower incomplete gamma P(a, x); exposed for tests.
double gamma_p(double a, double x);

// --- finite differences (test harness for gradients and Hessians) ---

/// Central-difference gradient; per-coordinate step is step*(1+|x_i|).
Vector finite_diff_gradient(const std::function<double(const Vector&)>& f,
                            const Vector& x, double step);

/// Central-difference Hessian with the same per-coordinate step rule.
Matrix finite_diff_hessian(const std::function<double(const Vector&)>& f,
                           const Vector& x, double step);

// --- Kolmogorov-Smirnov one-sample test ---

/// KS distance between a sample and a reference c.d.f. (sample is copied
/// and sorted internally).
double ks_statistic(const std::vector<double>& sample,
                    const std::function<double(double)>& cdf);

/// Asymptotic KS p-value with the Stephens small-sample correction.
double ks_pvalue(std::size_t n, double d);

}  // namespace phtest
