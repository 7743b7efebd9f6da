// Command-line front end: `test` runs the proportional-hazards score test
// on a CSV file, `simulate` draws samples from the drifting-effect model,
// `power` evaluates analytic and Monte Carlo power against it.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phtest/cox.hpp"
#include "phtest/csv.hpp"
#include "phtest/errors.hpp"
#include "phtest/ph_test.hpp"
#include "phtest/power.hpp"
#include "phtest/report.hpp"
#include "phtest/simulate.hpp"

using namespace phtest;

namespace {

struct CommonConfig {
    std::string format = "text";
    std::string output;
};

struct TestConfig : CommonConfig {
    std::string input;
    std::string time_col;
    std::string status_col;
    std::vector<std::string> covariates;
    std::vector<std::string> test_set;
    double alpha = 0.05;
    std::string missing = "drop";
    std::string fhat_side = "right";
};

struct ModelConfig {
    std::vector<double> beta;
    std::vector<double> gamma;
    std::string baseline = "exponential:1";
    std::vector<std::string> design;
    std::string censoring = "none";
};

struct SimulateConfig : CommonConfig, ModelConfig {
    std::size_t n = 0;
    std::uint64_t seed = 1;
};

struct PowerConfig : CommonConfig, ModelConfig {
    std::size_t n = 0;
    double c = 0.0;
    std::size_t tested = 1;  // 1-based position in --beta
    double alpha = 0.05;
    std::size_t replicates = 0;
    std::uint64_t seed = 1;
    std::string mu_scale = "ratio";
    std::string fhat_side = "right";
    std::size_t plugin_n = 100000;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

double parse_number(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError("cannot parse " + what + " from '" + s + "'");
    }
}

FhatSide parse_side(const std::string& s) {
    if (s == "left") return FhatSide::left;
    if (s == "right") return FhatSide::right;
    throw UsageError("fhat-side must be 'left' or 'right'");
}

MissingPolicy parse_missing(const std::string& s) {
    if (s == "drop") return MissingPolicy::drop_incomplete;
    if (s == "fail") return MissingPolicy::fail_on_incomplete;
    throw UsageError("missing policy must be 'drop' or 'fail'");
}

MuScale parse_mu_scale(const std::string& s) {
    if (s == "ratio") return MuScale::ratio;
    if (s == "normalized") return MuScale::normalized;
    throw UsageError("mu-scale must be 'ratio' or 'normalized'");
}

BaselineHazard parse_baseline(const std::string& s) {
    const auto parts = split(s, ':');
    if (parts[0] == "exponential" && parts.size() == 2)
        return BaselineHazard::exponential(parse_number(parts[1], "baseline rate"));
    if (parts[0] == "weibull" && parts.size() == 3)
        return BaselineHazard::weibull(parse_number(parts[1], "baseline shape"),
                                       parse_number(parts[2], "baseline scale"));
    throw UsageError("baseline must be exponential:RATE or weibull:SHAPE:SCALE");
}

CensoringLaw parse_censoring(const std::string& s) {
    const auto parts = split(s, ':');
    if (parts[0] == "none" && parts.size() == 1) return CensoringLaw::none();
    if (parts[0] == "uniform" && parts.size() == 2)
        return CensoringLaw::uniform(parse_number(parts[1], "censoring bound"));
    if (parts[0] == "exponential" && parts.size() == 2)
        return CensoringLaw::exponential(parse_number(parts[1], "censoring rate"));
    throw UsageError("censoring must be none, uniform:BOUND or exponential:RATE");
}

CovariateDesign parse_design(const std::string& s) {
    const auto parts = split(s, ':');
    if (parts[0] == "bernoulli" && parts.size() == 2)
        return CovariateDesign::bernoulli(parse_number(parts[1], "bernoulli probability"));
    if (parts[0] == "normal" && parts.size() == 3)
        return CovariateDesign::normal(parse_number(parts[1], "normal mean"),
                                       parse_number(parts[2], "normal sd"));
    if (parts[0] == "fixed" && parts.size() == 2)
        return CovariateDesign::fixed(parse_number(parts[1], "fixed value"));
    throw UsageError("design must be bernoulli:P, normal:MEAN:SD or fixed:VALUE");
}

AltModelSpec build_spec(const ModelConfig& cfg) {
    if (cfg.beta.empty()) throw UsageError("--beta needs at least one coefficient");
    AltModelSpec spec;
    spec.beta = cfg.beta;
    spec.gamma = cfg.gamma.empty() ? Vector(cfg.beta.size(), 0.0) : cfg.gamma;
    spec.baseline = parse_baseline(cfg.baseline);
    spec.censoring = parse_censoring(cfg.censoring);
    if (cfg.design.empty()) {
        spec.covariates.assign(cfg.beta.size(), CovariateDesign::bernoulli(0.5));
    } else {
        for (const auto& d : cfg.design) spec.covariates.push_back(parse_design(d));
    }
    validate(spec);
    return spec;
}

void emit(const CommonConfig& cfg, const std::string& body) {
    if (cfg.output.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream out(cfg.output, std::ios::binary);
    if (!out) throw DataError("cannot open output file '" + cfg.output + "'");
    out << body;
    if (!out.good()) throw DataError("failed writing output file '" + cfg.output + "'");
}

int run_test(const TestConfig& cfg) {
    const OutputFormat format = parse_format(cfg.format);
    const FhatSide side = parse_side(cfg.fhat_side);
    const MissingPolicy policy = parse_missing(cfg.missing);
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
        throw UsageError("--alpha must lie strictly between 0 and 1");

    auto table = read_csv_file(cfg.input);
    auto records = records_from_table(table, cfg.time_col, cfg.status_col, cfg.covariates);
    auto sample = build_sample(records, policy, cfg.covariates);

    std::vector<std::size_t> tested;
    if (cfg.test_set.empty()) {
        for (std::size_t j = 0; j < sample.m(); ++j) tested.push_back(j);
    } else {
        for (const auto& name : cfg.test_set) {
            auto it = std::find(cfg.covariates.begin(), cfg.covariates.end(), name);
            if (it == cfg.covariates.end())
                throw UsageError("test-set column '" + name + "' is not in --covariates");
            tested.push_back(static_cast<std::size_t>(it - cfg.covariates.begin()));
        }
    }

    const CoxFit fitted = fit(sample);
    const auto acc = ph_accumulation(sample, fitted, side);

    TestRunView view;
    view.n = sample.n();
    view.dropped = sample.dropped_count();
    view.events = sample.event_count();
    view.alpha = cfg.alpha;
    view.side = side;
    view.names = sample.covariate_names();
    view.fit = &fitted;
    view.rows = per_covariate_report(sample, acc, tested, cfg.alpha);

    PhTestReport global;
    if (tested.size() >= 2) {
        try {
            global = ph_test(acc, tested, cfg.alpha);
            view.global = &global;
        } catch (const NumericError& e) {
            view.global_error = e.what();
        }
    }

    emit(cfg, render_test(view, format));
    return 0;
}

int run_simulate(const SimulateConfig& cfg) {
    if (cfg.n == 0) throw UsageError("--n must be positive");
    const auto spec = build_spec(cfg);
    emit(cfg, render_sample(simulate(spec, cfg.n, cfg.seed)));
    return 0;
}

int run_power(const PowerConfig& cfg) {
    const OutputFormat format = parse_format(cfg.format);
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
        throw UsageError("--alpha must lie strictly between 0 and 1");
    const auto spec = build_spec(cfg);
    if (cfg.tested == 0 || cfg.tested > spec.beta.size())
        throw UsageError("--tested is a 1-based position in --beta");

    PowerOptions opts;
    opts.alpha = cfg.alpha;
    opts.scale = parse_mu_scale(cfg.mu_scale);
    opts.side = parse_side(cfg.fhat_side);
    opts.plugin_n = cfg.plugin_n;
    opts.replicates = cfg.replicates;
    opts.seed = cfg.seed;

    const auto result = power(spec, cfg.tested - 1, cfg.c, cfg.n, opts);
    emit(cfg, render_power(result, format));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"score test of the proportional-hazards assumption for chosen covariates"};
    app.require_subcommand(1);

    TestConfig tc;
    auto* test_cmd = app.add_subcommand("test", "run the test on a CSV dataset");
    test_cmd->add_option("--input", tc.input, "input CSV path")->required();
    test_cmd->add_option("--time-col", tc.time_col, "time column name")->required();
    test_cmd->add_option("--status-col", tc.status_col, "status column name (0/1)")
        ->required();
    test_cmd->add_option("--covariates", tc.covariates, "model covariate columns")
        ->delimiter(',')
        ->required();
    test_cmd->add_option("--test-set", tc.test_set,
                         "covariates to test (default: all model covariates)")
        ->delimiter(',');
    test_cmd->add_option("--alpha", tc.alpha, "significance level");
    test_cmd->add_option("--missing", tc.missing, "missing-value policy: drop|fail");
    test_cmd->add_option("--fhat-side", tc.fhat_side,
                         "baseline c.d.f. side at event times: left|right");
    test_cmd->add_option("--format", tc.format, "output format: text|csv|jsonl");
    test_cmd->add_option("--output", tc.output, "write the report here instead of stdout");

    SimulateConfig sc;
    auto* sim_cmd = app.add_subcommand("simulate", "draw a sample from the model");
    sim_cmd->add_option("--n", sc.n, "sample size")->required();
    sim_cmd->add_option("--seed", sc.seed, "random seed");
    sim_cmd->add_option("--beta", sc.beta, "regression coefficients")
        ->delimiter(',')
        ->required();
    sim_cmd->add_option("--gamma", sc.gamma, "drift coefficients (default: zeros)")
        ->delimiter(',');
    sim_cmd->add_option("--baseline", sc.baseline,
                        "baseline hazard: exponential:RATE | weibull:SHAPE:SCALE");
    sim_cmd->add_option("--design", sc.design,
                        "covariate designs: bernoulli:P | normal:MEAN:SD | fixed:V")
        ->delimiter(',');
    sim_cmd->add_option("--censoring", sc.censoring,
                        "censoring law: none | uniform:BOUND | exponential:RATE");
    sim_cmd->add_option("--format", sc.format, "accepted for symmetry; output is CSV");
    sim_cmd->add_option("--output", sc.output, "write the sample here instead of stdout");

    PowerConfig pc;
    auto* pow_cmd = app.add_subcommand("power", "power against drifting alternatives");
    pow_cmd->add_option("--n", pc.n, "sample size per replicate")->required();
    pow_cmd->add_option("--c", pc.c, "local drift constant (gamma_j = c/sqrt(n))")
        ->required();
    pow_cmd->add_option("--tested", pc.tested, "1-based tested covariate position");
    pow_cmd->add_option("--alpha", pc.alpha, "significance level");
    pow_cmd->add_option("--replicates", pc.replicates,
                        "Monte Carlo replicates (0 = analytic only)");
    pow_cmd->add_option("--seed", pc.seed, "random seed");
    pow_cmd->add_option("--mu-scale", pc.mu_scale, "drift scaling: ratio|normalized");
    pow_cmd->add_option("--plugin-n", pc.plugin_n, "plug-in null sample size");
    pow_cmd->add_option("--fhat-side", pc.fhat_side,
                        "baseline c.d.f. side at event times: left|right");
    pow_cmd->add_option("--beta", pc.beta, "regression coefficients")
        ->delimiter(',')
        ->required();
    pow_cmd->add_option("--gamma", pc.gamma, "ignored; the null model is used")
        ->delimiter(',');
    pow_cmd->add_option("--baseline", pc.baseline,
                        "baseline hazard: exponential:RATE | weibull:SHAPE:SCALE");
    pow_cmd->add_option("--design", pc.design,
                        "covariate designs: bernoulli:P | normal:MEAN:SD | fixed:V")
        ->delimiter(',');
    pow_cmd->add_option("--censoring", pc.censoring,
                        "censoring law: none | uniform:BOUND | exponential:RATE");
    pow_cmd->add_option("--format", pc.format, "output format: text|csv|jsonl");
    pow_cmd->add_option("--output", pc.output, "write the report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 4;
    }

    try {
        if (test_cmd->parsed()) return run_test(tc);
        if (sim_cmd->parsed()) return run_simulate(sc);
        if (pow_cmd->parsed()) return run_power(pc);
        std::cerr << "error: no subcommand given\n";
        return 4;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 4;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what();
        if (e.record_index) std::cerr << " (row " << *e.record_index << ")";
        std::cerr << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
