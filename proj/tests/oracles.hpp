#pragma once

// Independent oracles used by the test suites. Nothing here may call into
// the library paths it is checking: the normal cdf oracle is a long-double
// series / continued fraction, quadrature is adaptive Simpson, the exact
// linear solver works on int64 fractions, and eigenvalues come from a
// plain Jacobi sweep.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "phtest/numeric.hpp"

namespace oracles {

// erf by Taylor series, long double (converges fast for |x| < ~2.5).
inline long double erf_series(long double x) {
    const long double two_over_sqrt_pi = 1.1283791670955125738961589031195L;
    long double term = x;
    long double sum = x;
    const long double x2 = x * x;
    for (int n = 1; n < 200; ++n) {
        term *= -x2 / n;
        const long double add = term / (2 * n + 1);
        sum += add;
        if (std::fabs(add) < std::fabs(sum) * 1e-21L) break;
    }
    return two_over_sqrt_pi * sum;
}

// erfc by the classic Stieltjes continued fraction, long double, via
// modified Lentz:  erfc(x) sqrt(pi) exp(x^2) = 1/(x+ (1/2)/(x+ 1/(x+ (3/2)/(x+...))))
inline long double erfc_cf(long double x) {
    const long double sqrt_pi = 1.77245385090551602729816748334115L;
    const long double tiny = 1e-300L;
    long double f = tiny;
    long double c = f;
    long double d = 0.0L;
    for (int n = 1; n <= 400; ++n) {
        const long double an = (n == 1) ? 1.0L : 0.5L * (n - 1);
        d = x + an * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = x + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0L / d;
        const long double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0L) < 1e-21L) break;
    }
    return std::exp(-x * x) / sqrt_pi * f;
}

/// High-precision standard normal cdf, independent of phtest::std_normal_cdf.
inline double normal_cdf(double x) {
    const long double t = std::fabs(static_cast<long double>(x)) /
                          1.41421356237309504880168872420970L;
    long double upper_tail;  // P(|Z| > |x|)/2
    if (t < 2.0L)
        upper_tail = 0.5L * (1.0L - erf_series(t));
    else
        upper_tail = 0.5L * erfc_cf(t);
    return static_cast<double>(x >= 0 ? 1.0L - upper_tail : upper_tail);
}

/// Adaptive Simpson quadrature in long double.
inline long double simpson_step(const std::function<long double(long double)>& f,
                                long double a, long double b, long double fa,
                                long double fm, long double fb, long double whole,
                                long double tol, int depth) {
    const long double m = 0.5L * (a + b);
    const long double lm = 0.5L * (a + m);
    const long double rm = 0.5L * (m + b);
    const long double flm = f(lm);
    const long double frm = f(rm);
    const long double left = (m - a) / 6.0L * (fa + 4.0L * flm + fm);
    const long double right = (b - m) / 6.0L * (fm + 4.0L * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0L * tol)
        return left + right + (left + right - whole) / 15.0L;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5L * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5L * tol, depth - 1);
}

inline double integrate(const std::function<long double(long double)>& f,
                        double a, double b, double tol = 1e-13) {
    if (a == b) return 0.0;
    const long double fa = f(a);
    const long double fb = f(b);
    const long double m = 0.5L * (static_cast<long double>(a) + b);
    const long double fm = f(m);
    const long double whole = (static_cast<long double>(b) - a) / 6.0L * (fa + 4.0L * fm + fb);
    return static_cast<double>(
        simpson_step(f, a, b, fa, fm, fb, whole, static_cast<long double>(tol), 40));
}

/// Exact rational arithmetic on int64 (plenty for the Hilbert-4 oracle).
struct Fraction {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Fraction() = default;
    Fraction(std::int64_t n, std::int64_t d = 1) : num(n), den(d) { reduce(); }

    void reduce() {
        if (den < 0) { num = -num; den = -den; }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }
    Fraction operator+(const Fraction& o) const { return {num * o.den + o.num * den, den * o.den}; }
    Fraction operator-(const Fraction& o) const { return {num * o.den - o.num * den, den * o.den}; }
    Fraction operator*(const Fraction& o) const { return {num * o.num, den * o.den}; }
    Fraction operator/(const Fraction& o) const { return {num * o.den, den * o.num}; }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Gaussian elimination over fractions: solves A x = b exactly.
inline std::vector<Fraction> exact_solve(std::vector<std::vector<Fraction>> a,
                                         std::vector<Fraction> b) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a[pivot][col].num == 0) ++pivot;
        if (pivot == n) throw std::runtime_error("exact_solve: singular");
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || a[r][col].num == 0) continue;
            const Fraction factor = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] = a[r][c] - factor * a[col][c];
            b[r] = b[r] - factor * b[col];
        }
    }
    std::vector<Fraction> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return x;
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
inline std::vector<double> symmetric_eigenvalues(phtest::Matrix a) {
    const std::size_t n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::fabs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
    return ev;
}

}  // namespace oracles
