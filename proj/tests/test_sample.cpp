#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "phtest/errors.hpp"
#include "phtest/sample.hpp"

using namespace phtest;

namespace {

std::vector<RawRecord> toy_records() {
    // times 2,1,3 with covariates 0,1,2; middle record censored
    return {
        {2.0, 1.0, {0.0}},
        {1.0, 0.0, {1.0}},
        {3.0, 1.0, {2.0}},
    };
}

}  // namespace

TEST_CASE("build_sample validates and preserves rows") {
    auto s = build_sample(toy_records(), MissingPolicy::fail_on_incomplete);
    CHECK(s.n() == 3);
    CHECK(s.m() == 1);
    CHECK(s.event_count() == 2);
    CHECK(s.tau() == doctest::Approx(3.0));
    CHECK(s.dropped_count() == 0);
    CHECK(s.covariate_names()[0] == "z1");

    // ascending time order: record 1 (t=1), record 0 (t=2), record 2 (t=3)
    CHECK(s.time_order() == std::vector<std::size_t>{1, 0, 2});
}

TEST_CASE("missing policy drops or fails") {
    auto rows = toy_records();
    rows.push_back({4.0, 1.0, {std::nan("")}});
    rows.push_back({std::numeric_limits<double>::infinity(), 0.0, {1.0}});

    auto dropped = build_sample(rows, MissingPolicy::drop_incomplete);
    CHECK(dropped.n() == 3);
    CHECK(dropped.dropped_count() == 2);

    CHECK_THROWS_AS(build_sample(rows, MissingPolicy::fail_on_incomplete), DataError);
}

TEST_CASE("hard data errors") {
    SUBCASE("non-positive time") {
        auto rows = toy_records();
        rows[0].time = 0.0;
        CHECK_THROWS_AS(build_sample(rows, MissingPolicy::drop_incomplete), DataError);
    }
    SUBCASE("bad status") {
        auto rows = toy_records();
        rows[2].status = 2.0;
        CHECK_THROWS_AS(build_sample(rows, MissingPolicy::drop_incomplete), DataError);
    }
    SUBCASE("no events") {
        auto rows = toy_records();
        for (auto& r : rows) r.status = 0.0;
        CHECK_THROWS_AS(build_sample(rows, MissingPolicy::drop_incomplete), DataError);
    }
    SUBCASE("jagged covariates") {
        auto rows = toy_records();
        rows[1].covariates = {1.0, 2.0};
        CHECK_THROWS_AS(build_sample(rows, MissingPolicy::drop_incomplete), DataError);
    }
    SUBCASE("too few rows after drops") {
        std::vector<RawRecord> rows = {{1.0, 1.0, {0.0}}, {2.0, 1.0, {std::nan("")}}};
        CHECK_THROWS_AS(build_sample(rows, MissingPolicy::drop_incomplete), DataError);
    }
    SUBCASE("name count mismatch") {
        CHECK_THROWS_AS(build_sample(toy_records(), MissingPolicy::drop_incomplete, {"a", "b"}),
                        DataError);
    }
}

TEST_CASE("risk aggregates match hand sums") {
    // all three records at risk at t=1 (closed condition includes X_i == t)
    auto s = build_sample(toy_records(), MissingPolicy::fail_on_incomplete);
    const double b = std::log(2.0);
    auto agg = risk_aggregates(s, {b}, 1.0);

    // weights exp(b*z) = 1, 2, 4 for z = 0, 1, 2
    CHECK(agg.at_risk == 3);
    CHECK(agg.s0 == doctest::Approx(7.0).epsilon(1e-14));
    CHECK(agg.s1[0] == doctest::Approx(10.0).epsilon(1e-14));           // 0*1 + 1*2 + 2*4
    CHECK(agg.s2(0, 0) == doctest::Approx(18.0).epsilon(1e-14));        // 0 + 2 + 16
    CHECK(agg.e[0] == doctest::Approx(10.0 / 7.0).epsilon(1e-14));
    CHECK(agg.v(0, 0) == doctest::Approx(26.0 / 49.0).epsilon(1e-13));  // 18/7 - (10/7)^2

    // at t just past tau nothing is at risk
    auto late = risk_aggregates(s, {b}, 3.5);
    CHECK(late.empty());
    CHECK(late.s0 == 0.0);

    // risk set shrinks monotonically in t
    std::size_t prev = 4;
    for (double t : {0.5, 1.0, 2.0, 2.5, 3.0}) {
        auto a = risk_aggregates(s, {b}, t);
        CHECK(a.at_risk <= prev);
        prev = a.at_risk;
    }
}

TEST_CASE("risk aggregate v equals weighted covariance") {
    std::mt19937_64 rng(20240517);
    std::uniform_real_distribution<double> unif(0.1, 5.0);
    std::normal_distribution<double> norm(0.0, 1.0);
    std::bernoulli_distribution coin(0.7);

    for (int rep = 0; rep < 25; ++rep) {
        const std::size_t n = 5 + static_cast<std::size_t>(rng() % 16);
        const std::size_t m = 1 + static_cast<std::size_t>(rng() % 3);
        std::vector<RawRecord> rows;
        bool any_event = false;
        for (std::size_t i = 0; i < n; ++i) {
            RawRecord r;
            r.time = unif(rng);
            r.status = coin(rng) ? 1.0 : 0.0;
            any_event = any_event || r.status == 1.0;
            for (std::size_t j = 0; j < m; ++j) r.covariates.push_back(norm(rng));
            rows.push_back(std::move(r));
        }
        if (!any_event) rows[0].status = 1.0;
        auto s = build_sample(rows, MissingPolicy::fail_on_incomplete);

        Vector beta(m);
        for (auto& b : beta) b = 0.5 * norm(rng);
        const double t = unif(rng);
        auto agg = risk_aggregates(s, beta, t);
        if (agg.empty()) continue;

        // brute-force: v = sum w_i (z_i - e)(z_i - e)^T / s0
        Matrix ref(m, m);
        for (std::size_t i = 0; i < n; ++i) {
            if (s.time(i) < t) continue;
            double lp = 0.0;
            for (std::size_t j = 0; j < m; ++j) lp += beta[j] * s.covariate(i, j);
            const double w = std::exp(lp);
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t l = 0; l < m; ++l)
                    ref(j, l) += w * (s.covariate(i, j) - agg.e[j]) *
                                 (s.covariate(i, l) - agg.e[l]);
        }
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t l = 0; l < m; ++l)
                CHECK(agg.v(j, l) == doctest::Approx(ref(j, l) / agg.s0).epsilon(1e-10));
    }
}

TEST_CASE("event table groups ties and skips censor-only times") {
    std::vector<RawRecord> rows = {
        {1.0, 1.0, {0.0}}, {2.0, 0.0, {1.0}}, {3.0, 1.0, {0.5}},
        {3.0, 1.0, {1.5}}, {3.0, 0.0, {2.0}}, {4.0, 0.0, {0.0}},
    };
    auto s = build_sample(rows, MissingPolicy::fail_on_incomplete);
    auto tab = event_table(s);

    REQUIRE(tab.size() == 2);
    CHECK(tab.times == std::vector<double>{1.0, 3.0});
    CHECK(tab.multiplicity == std::vector<std::size_t>{1, 2});
    CHECK(tab.failing[1] == std::vector<std::size_t>{2, 3});
    CHECK(tab.total_events() == 3);
}

TEST_CASE("sweep agrees with direct aggregates at every event time") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(0.1, 5.0);
    std::normal_distribution<double> norm(0.0, 1.0);

    std::vector<RawRecord> rows;
    for (int i = 0; i < 40; ++i) {
        RawRecord r;
        r.time = (i % 5 == 0) ? 2.0 : unif(rng);  // force some ties
        r.status = (i % 3 == 0) ? 0.0 : 1.0;
        r.covariates = {norm(rng), norm(rng)};
        rows.push_back(std::move(r));
    }
    auto s = build_sample(rows, MissingPolicy::fail_on_incomplete);
    const Vector beta = {0.3, -0.8};
    auto tab = event_table(s);

    std::size_t visits = 0;
    double prev_time = std::numeric_limits<double>::infinity();
    sweep_events(s, beta, [&](const EventContext& ctx) {
        CHECK(ctx.time < prev_time);
        prev_time = ctx.time;
        ++visits;

        auto agg = risk_aggregates(s, beta, ctx.time);
        CHECK(ctx.at_risk == agg.at_risk);
        CHECK(ctx.s0 == doctest::Approx(agg.s0).epsilon(1e-12));
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(ctx.e[j] == doctest::Approx(agg.e[j]).epsilon(1e-11));
            for (std::size_t l = 0; l < 2; ++l)
                CHECK(ctx.v(j, l) == doctest::Approx(agg.v(j, l)).epsilon(2e-10));
        }

        auto it = std::find(tab.times.begin(), tab.times.end(), ctx.time);
        REQUIRE(it != tab.times.end());
        const std::size_t k = static_cast<std::size_t>(it - tab.times.begin());
        CHECK(ctx.multiplicity == tab.multiplicity[k]);

        Vector zsum(2, 0.0);
        double esum = 0.0;
        for (std::size_t i : tab.failing[k]) {
            for (std::size_t j = 0; j < 2; ++j) zsum[j] += s.covariate(i, j);
            esum += beta[0] * s.covariate(i, 0) + beta[1] * s.covariate(i, 1);
        }
        CHECK(ctx.z_fail_sum[0] == doctest::Approx(zsum[0]).epsilon(1e-12));
        CHECK(ctx.z_fail_sum[1] == doctest::Approx(zsum[1]).epsilon(1e-12));
        CHECK(ctx.eta_fail_sum == doctest::Approx(esum).epsilon(1e-12));
    });
    CHECK(visits == tab.size());
}

TEST_CASE("sweep output is invariant to input permutation") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> norm(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.1, 4.0);

    std::vector<RawRecord> rows;
    for (int i = 0; i < 30; ++i) {
        RawRecord r;
        r.time = (i % 4 == 0) ? 1.5 : unif(rng);
        r.status = (i % 2 == 0) ? 1.0 : 0.0;
        r.covariates = {norm(rng)};
        rows.push_back(std::move(r));
    }
    const Vector beta = {0.4};

    auto capture = [&](const std::vector<RawRecord>& rr) {
        auto s = build_sample(rr, MissingPolicy::fail_on_incomplete);
        std::vector<double> out;
        sweep_events(s, beta, [&](const EventContext& ctx) {
            out.push_back(ctx.time);
            out.push_back(static_cast<double>(ctx.multiplicity));
            out.push_back(ctx.s0);
            out.push_back(ctx.e[0]);
            out.push_back(ctx.v(0, 0));
            out.push_back(ctx.z_fail_sum[0]);
        });
        return out;
    };

    auto base = capture(rows);
    auto shuffled = rows;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto perm = capture(shuffled);

    REQUIRE(base.size() == perm.size());
    for (std::size_t i = 0; i < base.size(); ++i)
        CHECK(base[i] == doctest::Approx(perm[i]).epsilon(1e-12));
}

TEST_CASE("sweep rejects overflowing linear predictors") {
    std::vector<RawRecord> rows = {{1.0, 1.0, {400.0}}, {2.0, 1.0, {500.0}}};
    auto s = build_sample(rows, MissingPolicy::fail_on_incomplete);
    CHECK_THROWS_AS(sweep_events(s, {2.0}, [](const EventContext&) {}), NumericError);
}
