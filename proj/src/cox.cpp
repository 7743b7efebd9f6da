#include "phtest/cox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "phtest/errors.hpp"

namespace phtest {

double StepFunction::operator()(double t) const {
    auto it = std::upper_bound(knots.begin(), knots.end(), t);
    if (it == knots.begin()) return initial;
    return values[static_cast<std::size_t>(it - knots.begin()) - 1];
}

double StepFunction::left_value(double t) const {
    auto it = std::lower_bound(knots.begin(), knots.end(), t);
    if (it == knots.begin()) return initial;
    return values[static_cast<std::size_t>(it - knots.begin()) - 1];
}

double log_partial_likelihood(const SurvivalSample& sample, const Vector& beta) {
    const std::size_t m = sample.m();
    if (beta.size() != m) throw NumericError("beta dimension mismatch");

    std::vector<double> eta(sample.n());
    for (std::size_t i = 0; i < sample.n(); ++i) {
        double lp = 0.0;
        for (std::size_t j = 0; j < m; ++j) lp += beta[j] * sample.covariate(i, j);
        eta[i] = lp;
    }

    const auto& order = sample.time_order();
    double s0 = 0.0;
    double ell = 0.0;
    std::size_t p = order.size();
    while (p > 0) {
        const double t = sample.time(order[p - 1]);
        std::size_t q = p;
        while (q > 0 && sample.time(order[q - 1]) == t) --q;
        std::size_t d = 0;
        for (std::size_t pos = q; pos < p; ++pos) {
            const std::size_t i = order[pos];
            s0 += std::exp(eta[i]);
            if (sample.status(i) == 1) {
                ++d;
                ell += eta[i];
            }
        }
        if (d > 0) ell -= static_cast<double>(d) * std::log(s0);
        p = q;
    }
    if (std::isnan(ell)) return -std::numeric_limits<double>::infinity();
    return ell;
}

Vector score(const SurvivalSample& sample, const Vector& beta) {
    const std::size_t m = sample.m();
    Vector u(m, 0.0);
    sweep_events(sample, beta, [&](const EventContext& ctx) {
        const double d = static_cast<double>(ctx.multiplicity);
        for (std::size_t j = 0; j < m; ++j)
            u[j] += ctx.z_fail_sum[j] - d * ctx.e[j];
    });
    return u;
}

Matrix information(const SurvivalSample& sample, const Vector& beta) {
    const std::size_t m = sample.m();
    Matrix info(m, m);
    sweep_events(sample, beta, [&](const EventContext& ctx) {
        const double d = static_cast<double>(ctx.multiplicity);
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t l = 0; l < m; ++l)
                info(j, l) += d * ctx.v(j, l);
    });
    return info;
}

namespace {

// One sweep for everything Newton needs at the current point.
void newton_terms(const SurvivalSample& sample, const Vector& beta, double& ell,
                  Vector& u, Matrix& info) {
    const std::size_t m = sample.m();
    ell = 0.0;
    u.assign(m, 0.0);
    info = Matrix(m, m);
    sweep_events(sample, beta, [&](const EventContext& ctx) {
        const double d = static_cast<double>(ctx.multiplicity);
        ell += ctx.eta_fail_sum - d * std::log(ctx.s0);
        for (std::size_t j = 0; j < m; ++j) {
            u[j] += ctx.z_fail_sum[j] - d * ctx.e[j];
            for (std::size_t l = 0; l < m; ++l) info(j, l) += d * ctx.v(j, l);
        }
    });
}

}  // namespace

CoxFit fit(const SurvivalSample& sample, const FitOptions& options) {
    const std::size_t m = sample.m();
    Vector beta = options.init.empty() ? Vector(m, 0.0) : options.init;
    if (beta.size() != m) throw NumericError("initial value dimension mismatch");

    double ell = log_partial_likelihood(sample, beta);
    if (!std::isfinite(ell)) throw NumericError("initial value gives non-finite likelihood");

    CoxFit result;
    Vector u;
    Matrix info(m, m);
    bool converged = false;

    std::size_t iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        newton_terms(sample, beta, ell, u, info);
        if (norm_inf(u) < options.tolerance) {
            converged = true;
            break;
        }

        auto solved = spd_solve(info, u);
        if (!solved.success || solved.rcond < 1e-12)
            throw NumericError("information matrix is singular or nearly so");
        const Vector step = solved.solution_vector();

        // Near the optimum the Newton gain sinks below the rounding noise of
        // two large summations, so demand improvement only beyond that noise.
        const double slack = 1e-11 * (1.0 + std::abs(ell));
        double scale = 1.0;
        bool accepted = false;
        Vector trial(m);
        for (std::size_t h = 0; h <= options.max_halvings; ++h) {
            for (std::size_t j = 0; j < m; ++j) trial[j] = beta[j] + scale * step[j];
            const double trial_ell = log_partial_likelihood(sample, trial);
            if (std::isfinite(trial_ell) && trial_ell >= ell - slack) {
                beta = trial;
                ell = trial_ell;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if (!accepted) throw NumericError("step halving failed to improve the likelihood");
        if (norm_inf(beta) > options.divergence_bound)
            throw NumericError(
                "coefficients diverged; the data may be separable in a covariate");
    }
    if (!converged) {
        newton_terms(sample, beta, ell, u, info);
        if (norm_inf(u) < options.tolerance) {
            converged = true;
        } else {
            throw NumericError("Newton iteration did not converge");
        }
    }

    result.beta_hat = beta;
    result.score_at_hat = u;
    result.information = info;
    result.loglik = ell;
    result.iterations = iter;
    result.converged = converged;

    auto inv = spd_solve(info, Matrix::identity(m));
    if (!inv.success) throw NumericError("information matrix is singular at the optimum");
    result.covariance = inv.solution;

    result.breslow = breslow_cumhaz(sample, beta);
    result.baseline_cdf = cdf_from_cumhaz(result.breslow);
    return result;
}

StepFunction breslow_cumhaz(const SurvivalSample& sample, const Vector& beta) {
    std::vector<double> times;
    std::vector<double> increments;
    sweep_events(sample, beta, [&](const EventContext& ctx) {
        times.push_back(ctx.time);
        increments.push_back(static_cast<double>(ctx.multiplicity) / ctx.s0);
    });
    std::reverse(times.begin(), times.end());
    std::reverse(increments.begin(), increments.end());

    StepFunction lambda;
    lambda.knots = std::move(times);
    lambda.values.resize(increments.size());
    double cum = 0.0;
    for (std::size_t k = 0; k < increments.size(); ++k) {
        cum += increments[k];
        lambda.values[k] = cum;
    }
    return lambda;
}

StepFunction cdf_from_cumhaz(const StepFunction& cumhaz) {
    StepFunction f;
    f.knots = cumhaz.knots;
    f.initial = -std::expm1(-cumhaz.initial);
    f.values.resize(cumhaz.values.size());
    for (std::size_t k = 0; k < cumhaz.values.size(); ++k)
        f.values[k] = -std::expm1(-cumhaz.values[k]);
    return f;
}

}  // namespace phtest
