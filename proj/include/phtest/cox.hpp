#pragma once

// Proportional-hazards regression: Breslow-tie partial likelihood, Newton
// fit with step halving, and the Breslow baseline cumulative hazard.

#include <cstddef>
#include <vector>

#include "phtest/numeric.hpp"
#include "phtest/sample.hpp"

namespace phtest {

/// Right-continuous step function: value is `initial` before the first
/// knot and values[k] on [knots[k], knots[k+1]).
struct StepFunction {
    std::vector<double> knots;   // strictly increasing
    std::vector<double> values;  // same length as knots
    double initial = 0.0;

    double operator()(double t) const;   // right-continuous value at t
    double left_value(double t) const;   // limit from below at t
};

struct FitOptions {
    double tolerance = 1e-9;       // on the max-norm of the score
    std::size_t max_iterations = 50;
    std::size_t max_halvings = 30;
    double divergence_bound = 50;  // |beta_j| beyond this means separation
    Vector init;                   // empty = start at zero
};

struct CoxFit {
    Vector beta_hat;
    Vector score_at_hat;
    Matrix information;     // observed information at beta_hat
    Matrix covariance;      // inverse information
    double loglik = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    StepFunction breslow;        // baseline cumulative hazard
    StepFunction baseline_cdf;   // 1 - exp(-breslow)
};

/// Breslow-tie log partial likelihood. Returns -infinity when the linear
/// predictor overflows, so line searches can treat wild trial points as
/// arbitrarily bad instead of aborting.
double log_partial_likelihood(const SurvivalSample& sample, const Vector& beta);

Vector score(const SurvivalSample& sample, const Vector& beta);

Matrix information(const SurvivalSample& sample, const Vector& beta);

/// Newton-Raphson maximisation with step halving. Throws NumericError on
/// non-convergence, singular information, or diverging coefficients.
CoxFit fit(const SurvivalSample& sample, const FitOptions& options = {});

StepFunction breslow_cumhaz(const SurvivalSample& sample, const Vector& beta);

/// F(t) = 1 - exp(-Lambda(t)) for a nonnegative cumulative hazard.
StepFunction cdf_from_cumhaz(const StepFunction& cumhaz);

}  // namespace phtest
