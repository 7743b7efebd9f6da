#pragma once

// Data generator for a hazard model in which a covariate's effect ratio
// drifts monotonically between two limits as the baseline cumulative
// hazard grows. gamma = 0 recovers proportional hazards exactly, so the
// same generator produces null and alternative data.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "phtest/numeric.hpp"
#include "phtest/sample.hpp"

namespace phtest {

/// Weibull-family baseline: Lambda0(t) = (t/scale)^shape.
struct BaselineHazard {
    double shape = 1.0;
    double scale = 1.0;

    static BaselineHazard exponential(double rate);
    static BaselineHazard weibull(double shape, double scale);

    double cum(double t) const;
    double inverse_cum(double v) const;
};

struct CensoringLaw {
    enum class Kind { none, uniform, exponential };
    Kind kind = Kind::none;
    double param = 0.0;  // upper bound or rate

    static CensoringLaw none() { return {}; }
    static CensoringLaw uniform(double upper);
    static CensoringLaw exponential(double rate);
};

struct CovariateDesign {
    enum class Kind { bernoulli, normal, fixed };
    Kind kind = Kind::fixed;
    double a = 0.0;  // success probability, mean, or the fixed value
    double b = 0.0;  // standard deviation for normal

    static CovariateDesign bernoulli(double p);
    static CovariateDesign normal(double mean, double sd);
    static CovariateDesign fixed(double value);
};

struct AltModelSpec {
    Vector beta;
    Vector gamma;
    BaselineHazard baseline;
    std::vector<CovariateDesign> covariates;
    CensoringLaw censoring;
};

/// Throws UsageError when dimensions or parameters are inconsistent.
void validate(const AltModelSpec& spec);

/// Hazard ratio to the baseline at time t for covariate vector z:
/// exp(beta'z) at t = 0 sliding to exp((beta-gamma)'z) as t -> infinity.
double g_factor(const AltModelSpec& spec, const Vector& z, double t);

/// Cumulative hazard H(t | z) of the alternative model (closed form).
double cum_hazard_alt(const AltModelSpec& spec, const Vector& z, double t);

/// Event time with survival function exp(-H(. | z)) from one uniform draw.
double draw_event_time(const AltModelSpec& spec, const Vector& z, double u);

/// Counter-based uniform stream: records are reproducible independently
/// of each other and of the sample size.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t index);
    double uniform();         // strictly inside (0, 1)
    double normal();
    double bernoulli(double p);  // 0.0 or 1.0

private:
    std::uint64_t state_;
};

/// n records drawn from the model; record i depends only on (seed, i).
std::vector<RawRecord> simulate(const AltModelSpec& spec, std::size_t n,
                                std::uint64_t seed);

/// g_factor(z1, t) / g_factor(z0, t) evaluated on a time grid.
Vector hazard_ratio_curve(const AltModelSpec& spec, const Vector& z1, const Vector& z0,
                          const Vector& times);

}  // namespace phtest
