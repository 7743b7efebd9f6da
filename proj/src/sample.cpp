#include "phtest/sample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "phtest/errors.hpp"

namespace phtest {

namespace {

bool is_missing(double x) { return !std::isfinite(x); }

bool record_incomplete(const RawRecord& r) {
    if (is_missing(r.time) || is_missing(r.status)) return true;
    return std::any_of(r.covariates.begin(), r.covariates.end(), is_missing);
}

}  // namespace

SurvivalSample build_sample(const std::vector<RawRecord>& records, MissingPolicy policy,
                            std::vector<std::string> covariate_names) {
    if (records.empty()) throw DataError("no input records");

    const std::size_t m = records.front().covariates.size();
    if (m == 0) throw DataError("records carry no covariates");

    SurvivalSample s;
    s.n_covariates_ = m;
    s.times_.reserve(records.size());
    s.status_.reserve(records.size());
    s.covariates_.reserve(records.size() * m);

    for (std::size_t i = 0; i < records.size(); ++i) {
        const RawRecord& r = records[i];
        if (r.covariates.size() != m)
            throw DataError("inconsistent covariate count", i + 1);
        if (record_incomplete(r)) {
            if (policy == MissingPolicy::fail_on_incomplete)
                throw DataError("record has missing values", i + 1);
            ++s.dropped_count_;
            continue;
        }
        if (r.time <= 0.0) throw DataError("non-positive time", i + 1);
        if (r.status != 0.0 && r.status != 1.0)
            throw DataError("status must be 0 or 1", i + 1);
        s.times_.push_back(r.time);
        s.status_.push_back(static_cast<int>(r.status));
        s.covariates_.insert(s.covariates_.end(), r.covariates.begin(), r.covariates.end());
    }

    if (s.times_.size() < 2)
        throw DataError("fewer than two usable records after applying the missing-value policy");

    s.event_count_ = static_cast<std::size_t>(
        std::count(s.status_.begin(), s.status_.end(), 1));
    if (s.event_count_ == 0) throw DataError("sample contains no events");

    s.tau_ = *std::max_element(s.times_.begin(), s.times_.end());

    s.order_.resize(s.times_.size());
    std::iota(s.order_.begin(), s.order_.end(), std::size_t{0});
    std::stable_sort(s.order_.begin(), s.order_.end(),
                     [&](std::size_t a, std::size_t b) { return s.times_[a] < s.times_[b]; });

    if (covariate_names.empty()) {
        for (std::size_t j = 0; j < m; ++j)
            covariate_names.push_back("z" + std::to_string(j + 1));
    } else if (covariate_names.size() != m) {
        throw DataError("covariate name count does not match covariate count");
    }
    s.names_ = std::move(covariate_names);
    return s;
}

RiskAggregates risk_aggregates(const SurvivalSample& sample, const Vector& beta, double t) {
    const std::size_t m = sample.m();
    if (beta.size() != m) throw NumericError("beta dimension mismatch");

    RiskAggregates agg;
    agg.s1.assign(m, 0.0);
    agg.s2 = Matrix(m, m);

    for (std::size_t i = 0; i < sample.n(); ++i) {
        if (sample.time(i) < t) continue;
        ++agg.at_risk;
        double eta = 0.0;
        for (std::size_t j = 0; j < m; ++j) eta += beta[j] * sample.covariate(i, j);
        const double w = std::exp(eta);
        agg.s0 += w;
        for (std::size_t j = 0; j < m; ++j) {
            const double zj = sample.covariate(i, j);
            agg.s1[j] += w * zj;
            for (std::size_t l = j; l < m; ++l)
                agg.s2(j, l) += w * zj * sample.covariate(i, l);
        }
    }
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t l = 0; l < j; ++l) agg.s2(j, l) = agg.s2(l, j);

    if (agg.at_risk == 0) return agg;
    if (!(agg.s0 > 0.0) || !std::isfinite(agg.s0))
        throw NumericError("risk-set weight sum is not finite and positive");

    agg.e.assign(m, 0.0);
    agg.v = Matrix(m, m);
    for (std::size_t j = 0; j < m; ++j) agg.e[j] = agg.s1[j] / agg.s0;
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t l = 0; l < m; ++l)
            agg.v(j, l) = agg.s2(j, l) / agg.s0 - agg.e[j] * agg.e[l];
    return agg;
}

std::size_t EventTable::total_events() const {
    std::size_t total = 0;
    for (std::size_t d : multiplicity) total += d;
    return total;
}

EventTable event_table(const SurvivalSample& sample) {
    EventTable table;
    const auto& order = sample.time_order();
    std::size_t p = 0;
    while (p < order.size()) {
        const double t = sample.time(order[p]);
        std::vector<std::size_t> fails;
        std::size_t q = p;
        while (q < order.size() && sample.time(order[q]) == t) {
            if (sample.status(order[q]) == 1) fails.push_back(order[q]);
            ++q;
        }
        if (!fails.empty()) {
            table.times.push_back(t);
            table.multiplicity.push_back(fails.size());
            table.failing.push_back(std::move(fails));
        }
        p = q;
    }
    return table;
}

void sweep_events(const SurvivalSample& sample, const Vector& beta,
                  const std::function<void(const EventContext&)>& visit) {
    const std::size_t m = sample.m();
    if (beta.size() != m) throw NumericError("beta dimension mismatch");

    // Linear predictors up front; overflow surfaces as a NumericError
    // rather than inf/NaN leaking into the sums.
    std::vector<double> eta(sample.n());
    std::vector<double> weight(sample.n());
    for (std::size_t i = 0; i < sample.n(); ++i) {
        double lp = 0.0;
        for (std::size_t j = 0; j < m; ++j) lp += beta[j] * sample.covariate(i, j);
        eta[i] = lp;
        weight[i] = std::exp(lp);
        if (!std::isfinite(weight[i]))
            throw NumericError("linear predictor overflow in risk weights");
    }

    const auto& order = sample.time_order();
    double s0 = 0.0;
    Vector s1(m, 0.0);
    Matrix s2(m, m);
    Vector e(m, 0.0);
    Matrix v(m, m);
    Vector z_fail(m, 0.0);
    std::size_t at_risk = 0;

    // Walk times descending; each block of tied times enters the risk
    // set together, then failures in the block trigger one visit.
    std::size_t p = order.size();
    while (p > 0) {
        const double t = sample.time(order[p - 1]);
        std::size_t q = p;
        while (q > 0 && sample.time(order[q - 1]) == t) --q;

        std::size_t d = 0;
        double eta_fail = 0.0;
        std::fill(z_fail.begin(), z_fail.end(), 0.0);
        for (std::size_t pos = q; pos < p; ++pos) {
            const std::size_t i = order[pos];
            const double w = weight[i];
            ++at_risk;
            s0 += w;
            for (std::size_t j = 0; j < m; ++j) {
                const double zj = sample.covariate(i, j);
                s1[j] += w * zj;
                for (std::size_t l = j; l < m; ++l)
                    s2(j, l) += w * zj * sample.covariate(i, l);
            }
            if (sample.status(i) == 1) {
                ++d;
                for (std::size_t j = 0; j < m; ++j) z_fail[j] += sample.covariate(i, j);
                eta_fail += eta[i];
            }
        }
        if (d > 0) {
            if (!(s0 > 0.0) || !std::isfinite(s0))
                throw NumericError("risk-set weight sum is not finite and positive");
            for (std::size_t j = 0; j < m; ++j) e[j] = s1[j] / s0;
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t l = j; l < m; ++l) {
                    const double vjl = s2(j, l) / s0 - e[j] * e[l];
                    v(j, l) = vjl;
                    v(l, j) = vjl;
                }
            EventContext ctx{t, d, at_risk, s0, e, v, z_fail, eta_fail};
            visit(ctx);
        }
        p = q;
    }
}

}  // namespace phtest
