#include "phtest/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "phtest/errors.hpp"

namespace phtest {

Matrix multiply(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("multiply: shape mismatch");
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

Vector multiply(const Matrix& a, const Vector& x) {
    if (a.cols() != x.size()) throw std::invalid_argument("multiply: shape mismatch");
    Vector out(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        out[i] = s;
    }
    return out;
}

double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm_inf(const Vector& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

double max_abs(const Matrix& m) {
    double r = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r = std::max(r, std::fabs(m(i, j)));
    return r;
}

double quadratic_form(const Matrix& a, const Vector& x) {
    if (a.rows() != a.cols() || a.rows() != x.size())
        throw std::invalid_argument("quadratic_form: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) row += a(i, j) * x[j];
        s += x[i] * row;
    }
    return s;
}

namespace {

// Lower Cholesky factor in place; returns false on a non-positive pivot.
bool cholesky(Matrix& a) {
    const std::size_t n = a.rows();
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::fabs(a(i, i)));
    const double tiny = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * max_diag;

    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
        if (!(d > tiny)) return false;
        a(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
            a(i, j) = s / a(j, j);
        }
    }
    return true;
}

// Solve L L' x = b given the factor from cholesky().
void cholesky_solve(const Matrix& l, Vector& x) {
    const std::size_t n = l.rows();
    for (std::size_t i = 0; i < n; ++i) {
        double s = x[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x[k];
        x[i] = s / l(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = x[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
        x[ii] = s / l(ii, ii);
    }
}

double norm1(const Matrix& a) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < a.rows(); ++i) col += std::fabs(a(i, j));
        m = std::max(m, col);
    }
    return m;
}

}  // namespace

SpdSolveResult spd_solve(const Matrix& a, const Matrix& b) {
    SpdSolveResult res;
    const std::size_t n = a.rows();
    if (n == 0 || a.cols() != n || b.rows() != n) return res;

    Matrix l = a;
    if (!cholesky(l)) return res;

    // Exact 1-norm reciprocal condition: invert column by column.
    Matrix inv(n, n);
    Vector col(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::fill(col.begin(), col.end(), 0.0);
        col[j] = 1.0;
        cholesky_solve(l, col);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    const double denom = norm1(a) * norm1(inv);
    res.rcond = denom > 0.0 ? 1.0 / denom : 0.0;

    res.solution = Matrix(n, b.cols());
    Vector x(n), r(n);
    for (std::size_t j = 0; j < b.cols(); ++j) {
        for (std::size_t i = 0; i < n; ++i) x[i] = b(i, j);
        cholesky_solve(l, x);
        // Refine with long-double residuals until the residual is at
        // rounding level (three passes suffice for rcond above ~1e-12).
        double bnorm = 0.0;
        for (std::size_t i = 0; i < n; ++i) bnorm = std::max(bnorm, std::fabs(b(i, j)));
        for (int pass = 0; pass < 3; ++pass) {
            double rmax = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                long double acc = b(i, j);
                for (std::size_t k = 0; k < n; ++k)
                    acc -= static_cast<long double>(a(i, k)) * x[k];
                r[i] = static_cast<double>(acc);
                rmax = std::max(rmax, std::fabs(r[i]));
            }
            if (rmax <= 1e-13 * (1.0 + bnorm)) break;
            cholesky_solve(l, r);
            for (std::size_t i = 0; i < n; ++i) x[i] += r[i];
        }
        for (std::size_t i = 0; i < n; ++i) res.solution(i, j) = x[i];
    }
    res.success = true;
    return res;
}

SpdSolveResult spd_solve(const Matrix& a, const Vector& b) {
    Matrix rhs(b.size(), 1);
    for (std::size_t i = 0; i < b.size(); ++i) rhs(i, 0) = b[i];
    return spd_solve(a, rhs);
}

double std_normal_cdf(double x) {
    return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0);
}

namespace {

// Acklam's rational approximation, then Halley refinement against the cdf.
double quantile_initial(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;

    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("std_normal_quantile: p must be in (0, 1)");
    double x = quantile_initial(p);
    const double sqrt_2pi = std::sqrt(2.0 * std::numbers::pi);
    for (int i = 0; i < 2; ++i) {
        const double e = std_normal_cdf(x) - p;
        const double u = e * sqrt_2pi * std::exp(0.5 * x * x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

namespace {

constexpr int kIgammaMaxIter = 500;
constexpr double kIgammaEps = 1e-16;

// Series for P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double term = sum;
    for (int i = 0; i < kIgammaMaxIter; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kIgammaEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for Q(a, x), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kIgammaMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kIgammaEps) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_p: domain");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double chi2_sf(double x, int k) {
    if (k < 1) throw std::invalid_argument("chi2_sf: k must be >= 1");
    if (!(x >= 0.0)) throw std::invalid_argument("chi2_sf: x must be >= 0");
    const double a = 0.5 * k;
    const double xh = 0.5 * x;
    if (xh == 0.0) return 1.0;
    if (xh < a + 1.0) return 1.0 - gamma_p_series(a, xh);
    return gamma_q_cf(a, xh);
}

Vector finite_diff_gradient(const std::function<double(const Vector&)>& f,
                            const Vector& x, double step) {
    Vector g(x.size());
    Vector p = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = step * (1.0 + std::fabs(x[i]));
        p[i] = x[i] + h;
        const double fp = f(p);
        p[i] = x[i] - h;
        const double fm = f(p);
        p[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

Matrix finite_diff_hessian(const std::function<double(const Vector&)>& f,
                           const Vector& x, double step) {
    const std::size_t n = x.size();
    Matrix h(n, n);
    Vector p = x;
    const double f0 = f(x);
    for (std::size_t i = 0; i < n; ++i) {
        const double hi = step * (1.0 + std::fabs(x[i]));
        for (std::size_t j = i; j < n; ++j) {
            const double hj = step * (1.0 + std::fabs(x[j]));
            double v;
            if (i == j) {
                p[i] = x[i] + hi;
                const double fp = f(p);
                p[i] = x[i] - hi;
                const double fm = f(p);
                p[i] = x[i];
                v = (fp - 2.0 * f0 + fm) / (hi * hi);
            } else {
                p[i] = x[i] + hi; p[j] = x[j] + hj;
                const double fpp = f(p);
                p[j] = x[j] - hj;
                const double fpm = f(p);
                p[i] = x[i] - hi; p[j] = x[j] + hj;
                const double fmp = f(p);
                p[j] = x[j] - hj;
                const double fmm = f(p);
                p[i] = x[i]; p[j] = x[j];
                v = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
            }
            h(i, j) = v;
            h(j, i) = v;
        }
    }
    return h;
}

double ks_statistic(const std::vector<double>& sample,
                    const std::function<double(double)>& cdf) {
    if (sample.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::vector<double> s = sample;
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double f = cdf(s[i]);
        d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
        d = std::max(d, f - static_cast<double>(i) / n);
    }
    return d;
}

double ks_pvalue(std::size_t n, double d) {
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    if (lambda < 1e-8) return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * lambda * lambda * j * j);
        sum += (j % 2 == 1 ? term : -term);
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace phtest
