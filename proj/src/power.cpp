#include "phtest/power.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "phtest/cox.hpp"
#include "phtest/errors.hpp"

namespace phtest {

namespace {

std::uint64_t replicate_seed(std::uint64_t seed, std::size_t r) {
    std::uint64_t x = seed ^ (0xD1B54A32D192ED03ull * (static_cast<std::uint64_t>(r) + 1));
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

void check_tested(const AltModelSpec& spec, std::size_t tested) {
    validate(spec);
    if (tested >= spec.beta.size()) throw UsageError("tested covariate index out of range");
}

}  // namespace

NoncentralityResult noncentrality(const AltModelSpec& null_spec, std::size_t tested,
                                  double c, std::size_t plugin_n, std::uint64_t seed,
                                  FhatSide side) {
    check_tested(null_spec, tested);
    if (!std::isfinite(c)) throw UsageError("drift constant must be finite");
    if (plugin_n < 100) throw UsageError("plug-in sample size is too small");

    AltModelSpec null_model = null_spec;
    null_model.gamma.assign(null_model.gamma.size(), 0.0);

    auto rows = simulate(null_model, plugin_n, seed);
    auto sample = build_sample(rows, MissingPolicy::drop_incomplete);

    // evaluate at the known coefficients: no fitting enters the plug-in
    const auto cumhaz = breslow_cumhaz(sample, null_model.beta);
    const auto acc =
        ph_accumulation(sample, null_model.beta, cdf_from_cumhaz(cumhaz), side);

    NoncentralityResult res;
    res.d_j = variance(sigma_set(acc, {tested}))(0, 0);
    res.d = c * res.d_j;
    return res;
}

double analytic_power(double mu, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
    const double z = std_normal_quantile(1.0 - alpha / 2.0);
    return std_normal_cdf(mu - z) + std_normal_cdf(-mu - z);
}

namespace {

// Replicates are independent (counter-derived seeds), so they run on a
// small thread pool; the aggregates are integer counts, which makes the
// reduction order-independent by construction.
void run_replicates(const AltModelSpec& null_spec, std::size_t tested, double c,
                    std::size_t n, const PowerOptions& options, PowerResult& out) {
    if (options.replicates < 100) throw UsageError("at least 100 replicates are required");

    AltModelSpec alt = null_spec;
    alt.gamma.assign(alt.gamma.size(), 0.0);
    alt.gamma[tested] = c / std::sqrt(static_cast<double>(n));

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> rejections{0};
    std::atomic<std::size_t> failures{0};

    auto worker = [&] {
        for (;;) {
            const std::size_t r = next.fetch_add(1);
            if (r >= options.replicates) return;
            try {
                auto rows = simulate(alt, n, replicate_seed(options.seed, r));
                auto sample = build_sample(rows, MissingPolicy::drop_incomplete);
                auto f = fit(sample);
                auto rep = ph_test(ph_accumulation(sample, f, options.side), {tested},
                                   options.alpha);
                if (rep.reject) rejections.fetch_add(1);
            } catch (const Error&) {
                failures.fetch_add(1);
            }
        }
    };

    std::size_t want = options.threads > 0 ? options.threads
                                           : std::thread::hardware_concurrency();
    want = std::min(std::max<std::size_t>(want, 1), options.replicates);
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < want; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    if (20 * failures.load() > options.replicates)
        throw NumericError("more than 5% of power replicates failed to fit");

    const double used = static_cast<double>(options.replicates - failures.load());
    out.replicates = options.replicates;
    out.failures = failures.load();
    out.mc = static_cast<double>(rejections.load()) / used;
    out.mc_half = 1.959963984540054 * std::sqrt(out.mc * (1.0 - out.mc) / used);
}

}  // namespace

PowerResult mc_power(const AltModelSpec& null_spec, std::size_t tested, double c,
                     std::size_t n, const PowerOptions& options) {
    check_tested(null_spec, tested);
    if (n < 2) throw UsageError("sample size must be at least 2");
    if (options.replicates == 0) throw UsageError("replicate count must be positive");

    PowerResult out;
    out.c = c;
    out.n = n;
    out.gamma_j = c / std::sqrt(static_cast<double>(n));
    out.alpha = options.alpha;
    out.scale = options.scale;
    run_replicates(null_spec, tested, c, n, options, out);
    return out;
}

PowerResult power(const AltModelSpec& null_spec, std::size_t tested, double c,
                  std::size_t n, const PowerOptions& options) {
    check_tested(null_spec, tested);
    if (n < 2) throw UsageError("sample size must be at least 2");

    PowerResult out;
    out.c = c;
    out.n = n;
    out.gamma_j = c / std::sqrt(static_cast<double>(n));
    out.alpha = options.alpha;
    out.scale = options.scale;

    const auto nc = noncentrality(null_spec, tested, c, options.plugin_n, options.seed,
                                  options.side);
    out.d = nc.d;
    out.d_j = nc.d_j;
    out.mu = options.scale == MuScale::ratio ? nc.d / nc.d_j : nc.d / std::sqrt(nc.d_j);
    out.analytic = analytic_power(out.mu, options.alpha);

    if (options.replicates > 0) run_replicates(null_spec, tested, c, n, options, out);
    return out;
}

}  // namespace phtest
