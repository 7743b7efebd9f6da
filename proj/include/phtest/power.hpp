#pragma once

// Approximate power of the single-covariate test against the drifting
// alternative gamma_j = c / sqrt(n): a plug-in noncentrality from a large
// null simulation, the analytic power curve, and an optional Monte Carlo
// check that runs the full test pipeline.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "phtest/ph_test.hpp"
#include "phtest/simulate.hpp"

namespace phtest {

/// Scaling convention of the noncentrality parameter. `ratio` divides the
/// drift term by the variance itself; `normalized` divides by its square
/// root, which is the mean of the limiting unit-variance normal.
enum class MuScale { ratio, normalized };

struct NoncentralityResult {
    double d = 0.0;    // drift of the unnormalized statistic
    double d_j = 0.0;  // plug-in variance of the tested score
};

/// Plug-in evaluation on one large sample from the proportional-hazards
/// null (spec.gamma is ignored and treated as zero): the variance pieces
/// are computed at the known coefficients, and the drift is c * d_j.
NoncentralityResult noncentrality(const AltModelSpec& null_spec, std::size_t tested,
                                  double c, std::size_t plugin_n, std::uint64_t seed,
                                  FhatSide side);

/// Two-sided rejection probability of a unit-variance normal with mean mu.
double analytic_power(double mu, double alpha);

struct PowerOptions {
    double alpha = 0.05;
    MuScale scale = MuScale::ratio;  // the ratio convention is the default
    FhatSide side = FhatSide::right;
    std::size_t plugin_n = 100000;
    std::size_t replicates = 0;  // 0 = analytic only, otherwise at least 100
    std::uint64_t seed = 1;
    std::size_t threads = 0;  // 0 = hardware concurrency
};

struct PowerResult {
    double c = 0.0;
    std::size_t n = 0;
    double gamma_j = 0.0;  // c / sqrt(n)
    double d = 0.0;
    double d_j = 0.0;
    double mu = 0.0;
    MuScale scale = MuScale::ratio;
    double alpha = 0.0;
    double analytic = 0.0;

    std::size_t replicates = 0;
    std::size_t failures = 0;
    double mc = 0.0;       // rejection fraction, when replicates > 0
    double mc_half = 0.0;  // half-width of a 95% Wald interval
};

/// Monte Carlo rejection rate of the full pipeline under gamma_j = c/sqrt(n).
/// Throws NumericError when more than 5% of replicate fits fail.
PowerResult mc_power(const AltModelSpec& null_spec, std::size_t tested, double c,
                     std::size_t n, const PowerOptions& options);

/// Analytic power with the plug-in noncentrality; runs the Monte Carlo
/// check too when options.replicates > 0.
PowerResult power(const AltModelSpec& null_spec, std::size_t tested, double c,
                  std::size_t n, const PowerOptions& options = {});

}  // namespace phtest
