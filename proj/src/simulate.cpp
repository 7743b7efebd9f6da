#include "phtest/simulate.hpp"

#include <cmath>
#include <limits>

#include "phtest/errors.hpp"

namespace phtest {

BaselineHazard BaselineHazard::exponential(double rate) {
    if (!(rate > 0.0)) throw UsageError("baseline rate must be positive");
    return {1.0, 1.0 / rate};
}

BaselineHazard BaselineHazard::weibull(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0))
        throw UsageError("baseline shape and scale must be positive");
    return {shape, scale};
}

double BaselineHazard::cum(double t) const {
    if (t <= 0.0) return 0.0;
    return std::pow(t / scale, shape);
}

double BaselineHazard::inverse_cum(double v) const {
    if (v <= 0.0) return 0.0;
    return scale * std::pow(v, 1.0 / shape);
}

CensoringLaw CensoringLaw::uniform(double upper) {
    if (!(upper > 0.0)) throw UsageError("censoring upper bound must be positive");
    return {Kind::uniform, upper};
}

CensoringLaw CensoringLaw::exponential(double rate) {
    if (!(rate > 0.0)) throw UsageError("censoring rate must be positive");
    return {Kind::exponential, rate};
}

CovariateDesign CovariateDesign::bernoulli(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw UsageError("bernoulli probability outside [0, 1]");
    return {Kind::bernoulli, p, 0.0};
}

CovariateDesign CovariateDesign::normal(double mean, double sd) {
    if (!(sd >= 0.0)) throw UsageError("normal standard deviation must be nonnegative");
    return {Kind::normal, mean, sd};
}

CovariateDesign CovariateDesign::fixed(double value) {
    return {Kind::fixed, value, 0.0};
}

void validate(const AltModelSpec& spec) {
    const std::size_t m = spec.beta.size();
    if (m == 0) throw UsageError("model needs at least one covariate");
    if (spec.gamma.size() != m || spec.covariates.size() != m)
        throw UsageError("beta, gamma and covariate designs must have equal length");
    if (!(spec.baseline.shape > 0.0) || !(spec.baseline.scale > 0.0))
        throw UsageError("baseline shape and scale must be positive");
    for (double b : spec.beta)
        if (!std::isfinite(b)) throw UsageError("beta contains a non-finite value");
    for (double g : spec.gamma)
        if (!std::isfinite(g)) throw UsageError("gamma contains a non-finite value");
}

namespace {

struct LinearParts {
    double bz;  // beta'z
    double la;  // gamma'z, the log of the drift factor
};

LinearParts linear_parts(const AltModelSpec& spec, const Vector& z) {
    if (z.size() != spec.beta.size()) throw UsageError("covariate vector length mismatch");
    double bz = 0.0, la = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
        bz += spec.beta[j] * z[j];
        la += spec.gamma[j] * z[j];
    }
    if (std::abs(bz) > 200.0 || std::abs(la) > 200.0)
        throw NumericError("linear predictor too large for stable simulation");
    return {bz, la};
}

// log(1 + a * (exp(u) - 1)) with a = exp(la), stable for large u
double log_drift(double u, double la) {
    if (u <= 500.0) return std::log1p(std::exp(la) * std::expm1(u));
    return la + u + std::log1p((std::exp(-la) - 1.0) * std::exp(-u));
}

}  // namespace

double g_factor(const AltModelSpec& spec, const Vector& z, double t) {
    const auto [bz, la] = linear_parts(spec, z);
    const double u = std::exp(la) * spec.baseline.cum(t);
    if (!std::isfinite(u)) return std::exp(bz - la);  // the t -> infinity limit
    return std::exp(bz + u - log_drift(u, la));
}

double cum_hazard_alt(const AltModelSpec& spec, const Vector& z, double t) {
    const auto [bz, la] = linear_parts(spec, z);
    const double u = std::exp(la) * spec.baseline.cum(t);
    const double drift = log_drift(u, la);
    if (drift <= 0.0) return 0.0;
    return std::exp(bz - 2.0 * la + std::log(drift));
}

double draw_event_time(const AltModelSpec& spec, const Vector& z, double u) {
    if (!(u > 0.0 && u < 1.0)) throw NumericError("uniform draw outside (0, 1)");
    const auto [bz, la] = linear_parts(spec, z);
    const double e = -std::log(u);

    // solve H(T | z) = e in the cumulative-hazard scale
    const double log_q = 2.0 * la + std::log(e) - bz;
    double w;  // a * Lambda0(T)
    if (log_q <= std::log(500.0)) {
        const double q = std::exp(log_q);
        w = std::log1p(std::expm1(q) * std::exp(-la));
    } else {
        const double q = std::exp(log_q);
        w = q - la + std::log1p((std::exp(la) - 1.0) * std::exp(-q));
    }
    const double lambda = w * std::exp(-la);
    const double t = spec.baseline.inverse_cum(lambda);
    if (!std::isfinite(t))
        throw NumericError("simulated event time overflowed; parameters too extreme");
    return t;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t index) {
    auto mix = [](std::uint64_t x) {
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    };
    state_ = mix(seed + 0x9E3779B97F4A7C15ull) ^
             mix(index * 0xBF58476D1CE4E5B9ull + 0x94D049BB133111EBull);
}

double RngStream::uniform() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return std_normal_quantile(uniform()); }

double RngStream::bernoulli(double p) { return uniform() < p ? 1.0 : 0.0; }

std::vector<RawRecord> simulate(const AltModelSpec& spec, std::size_t n,
                                std::uint64_t seed) {
    validate(spec);
    if (n == 0) throw UsageError("sample size must be positive");

    const std::size_t m = spec.beta.size();
    std::vector<RawRecord> rows;
    rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        RngStream stream(seed, i);
        RawRecord r;
        r.covariates.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            const auto& dz = spec.covariates[j];
            switch (dz.kind) {
                case CovariateDesign::Kind::bernoulli:
                    r.covariates[j] = stream.bernoulli(dz.a);
                    break;
                case CovariateDesign::Kind::normal:
                    r.covariates[j] = dz.a + dz.b * stream.normal();
                    break;
                case CovariateDesign::Kind::fixed:
                    r.covariates[j] = dz.a;
                    break;
            }
        }
        const double t = draw_event_time(spec, r.covariates, stream.uniform());

        // the censoring draw is consumed even when unused, so switching
        // the censoring law never perturbs the other draws
        const double uc = stream.uniform();
        double c = std::numeric_limits<double>::infinity();
        switch (spec.censoring.kind) {
            case CensoringLaw::Kind::none:
                break;
            case CensoringLaw::Kind::uniform:
                c = spec.censoring.param * uc;
                break;
            case CensoringLaw::Kind::exponential:
                c = -std::log(uc) / spec.censoring.param;
                break;
        }
        r.status = t <= c ? 1.0 : 0.0;
        r.time = std::min(t, c);
        rows.push_back(std::move(r));
    }
    return rows;
}

Vector hazard_ratio_curve(const AltModelSpec& spec, const Vector& z1, const Vector& z0,
                          const Vector& times) {
    Vector out(times.size());
    for (std::size_t i = 0; i < times.size(); ++i)
        out[i] = g_factor(spec, z1, times[i]) / g_factor(spec, z0, times[i]);
    return out;
}

}  // namespace phtest
