#pragma once

// Right-censored regression data and counting-process risk-set aggregates.
//
// A SurvivalSample holds n records (X_i, delta_i, z^(i)) and is immutable
// after construction, so concurrent reads are safe. Risk sets use the
// closed condition X_i >= t: a subject failing at t counts as at risk at t.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "phtest/numeric.hpp"

namespace phtest {

enum class MissingPolicy { drop_incomplete, fail_on_incomplete };

/// One raw input row; missing values are encoded as NaN (infinities are
/// treated as missing too, since no finite value survives construction).
struct RawRecord {
    double time = 0.0;
    double status = 0.0;
    Vector covariates;
};

class SurvivalSample {
public:
    std::size_t n() const { return times_.size(); }
    std::size_t m() const { return n_covariates_; }

    double time(std::size_t i) const { return times_[i]; }
    int status(std::size_t i) const { return status_[i]; }
    double covariate(std::size_t i, std::size_t j) const {
        return covariates_[i * n_covariates_ + j];
    }
    std::span<const double> covariate_row(std::size_t i) const {
        return {covariates_.data() + i * n_covariates_, n_covariates_};
    }

    double tau() const { return tau_; }
    std::size_t dropped_count() const { return dropped_count_; }
    std::size_t event_count() const { return event_count_; }
    const std::vector<std::string>& covariate_names() const { return names_; }

    /// Record indices ordered by increasing time (ties by record index).
    const std::vector<std::size_t>& time_order() const { return order_; }

private:
    friend SurvivalSample build_sample(const std::vector<RawRecord>&, MissingPolicy,
                                       std::vector<std::string>);
    SurvivalSample() = default;

    std::vector<double> times_;
    std::vector<int> status_;
    std::vector<double> covariates_;  // n x m, row-major
    std::vector<std::string> names_;
    std::vector<std::size_t> order_;
    std::size_t n_covariates_ = 0;
    double tau_ = 0.0;
    std::size_t dropped_count_ = 0;
    std::size_t event_count_ = 0;
};

/// Validates raw rows into an immutable sample. Rows with missing fields
/// are dropped (and counted) or rejected according to the policy; hard
/// data errors (non-positive time, status outside {0,1}, zero events,
/// fewer than two usable rows) always throw DataError.
SurvivalSample build_sample(const std::vector<RawRecord>& records, MissingPolicy policy,
                            std::vector<std::string> covariate_names = {});

/// S^(0), S^(1), S^(2) and the derived E, V at one (t, beta).
struct RiskAggregates {
    double s0 = 0.0;
    Vector s1;
    Matrix s2;
    Vector e;  // S^(1)/S^(0), present only when at_risk > 0
    Matrix v;  // S^(2)/S^(0) - E E^T, present only when at_risk > 0
    std::size_t at_risk = 0;

    bool empty() const { return at_risk == 0; }
};

RiskAggregates risk_aggregates(const SurvivalSample& sample, const Vector& beta, double t);

/// Jump points of the aggregated counting process N(t).
struct EventTable {
    std::vector<double> times;                        // distinct, increasing
    std::vector<std::size_t> multiplicity;            // d_k
    std::vector<std::vector<std::size_t>> failing;    // record indices per time

    std::size_t size() const { return times.size(); }
    std::size_t total_events() const;
};

EventTable event_table(const SurvivalSample& sample);

/// Risk-set state handed to sweep_events' visitor at one event time.
/// The e/v references point into sweep workspace and are only valid
/// during the visit.
struct EventContext {
    double time = 0.0;
    std::size_t multiplicity = 0;  // d_k
    std::size_t at_risk = 0;       // Y(t)
    double s0 = 0.0;
    const Vector& e;
    const Matrix& v;
    const Vector& z_fail_sum;      // sum of z over failures at this time
    double eta_fail_sum = 0.0;     // sum of beta'z over those failures
};

/// Visits every distinct event time in DESCENDING time order, maintaining
/// risk-set sums incrementally (records are only ever added, never
/// removed, so there is no cancellation). Tied events share the one risk
/// set evaluated at their common time.
void sweep_events(const SurvivalSample& sample, const Vector& beta,
                  const std::function<void(const EventContext&)>& visit);

}  // namespace phtest
