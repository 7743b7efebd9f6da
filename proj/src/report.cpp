#include "phtest/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "phtest/errors.hpp"

namespace phtest {

OutputFormat parse_format(const std::string& name) {
    if (name == "text") return OutputFormat::text;
    if (name == "csv") return OutputFormat::csv;
    if (name == "jsonl") return OutputFormat::jsonl;
    throw UsageError("unknown format '" + name + "' (expected text, csv or jsonl)");
}

std::string full_precision(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::string fixed3(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3f", x);
    return buf;
}

const char* side_name(FhatSide side) {
    return side == FhatSide::right ? "right" : "left";
}

const char* scale_name(MuScale scale) {
    return scale == MuScale::ratio ? "ratio" : "normalized";
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

double coef_se(const CoxFit& fit, std::size_t j) {
    return std::sqrt(fit.covariance(j, j));
}

// ---- test rendering ----

std::string test_text(const TestRunView& v) {
    std::ostringstream out;
    out << "sample: " << v.n << " records used, " << v.dropped << " dropped, " << v.events
        << " events, " << v.names.size() << " covariates\n";
    out << "fit: converged in " << v.fit->iterations
        << " iterations, loglik = " << fixed3(v.fit->loglik) << "\n\n";

    std::size_t width = 9;
    for (const auto& n : v.names) width = std::max(width, n.size());

    out << "  " << std::string(width, ' ') << "      coef        se\n";
    for (std::size_t j = 0; j < v.names.size(); ++j) {
        out << "  " << v.names[j] << std::string(width - v.names[j].size(), ' ');
        char buf[64];
        std::snprintf(buf, sizeof buf, "  %8s  %8s", fixed3(v.fit->beta_hat[j]).c_str(),
                      fixed3(coef_se(*v.fit, j)).c_str());
        out << buf << "\n";
    }

    out << "\nscore test of proportional hazards (alpha = " << fixed3(v.alpha)
        << ", fhat-side = " << side_name(v.side) << ")\n\n";
    out << "  " << std::string(width, ' ') << "         T         p  decision\n";
    auto line = [&](const std::string& name, const std::string& t, const std::string& p,
                    const std::string& decision, const std::string& tail) {
        out << "  " << name << std::string(width - std::min(width, name.size()), ' ');
        char buf[80];
        std::snprintf(buf, sizeof buf, "  %8s  %8s  %s", t.c_str(), p.c_str(),
                      decision.c_str());
        out << buf << tail << "\n";
    };
    for (const auto& row : v.rows) {
        if (row.ok) {
            line(row.name, fixed3(row.report.statistic), fixed3(row.report.p_value),
                 row.report.reject ? "reject" : "keep", "");
        } else {
            line(row.name, "-", "-", "-", "  [" + row.error + "]");
        }
    }
    if (v.global != nullptr) {
        line("global", fixed3(v.global->statistic), fixed3(v.global->p_value),
             v.global->reject ? "reject" : "keep",
             "  [chi-squared, df = " + std::to_string(v.global->df) + "]");
    } else if (!v.global_error.empty()) {
        line("global", "-", "-", "-", "  [" + v.global_error + "]");
    }
    return out.str();
}

// shared field layout keeps csv and jsonl numerically identical
struct FieldRow {
    std::string kind;
    std::string name;
    std::vector<std::pair<std::string, double>> numbers;
    std::vector<std::pair<std::string, std::string>> strings;
    std::vector<std::pair<std::string, bool>> flags;
};

std::vector<FieldRow> test_fields(const TestRunView& v) {
    std::vector<FieldRow> rows;

    FieldRow run{"run", "", {}, {}, {}};
    run.numbers = {{"n", static_cast<double>(v.n)},
                   {"dropped", static_cast<double>(v.dropped)},
                   {"events", static_cast<double>(v.events)},
                   {"alpha", v.alpha},
                   {"iterations", static_cast<double>(v.fit->iterations)},
                   {"loglik", v.fit->loglik}};
    run.strings = {{"fhat_side", side_name(v.side)}};
    rows.push_back(std::move(run));

    for (std::size_t j = 0; j < v.names.size(); ++j) {
        FieldRow r{"fit", v.names[j], {}, {}, {}};
        r.numbers = {{"coef", v.fit->beta_hat[j]}, {"se", coef_se(*v.fit, j)}};
        rows.push_back(std::move(r));
    }
    for (const auto& row : v.rows) {
        FieldRow r{"test", row.name, {}, {}, {}};
        if (row.ok) {
            r.numbers = {{"statistic", row.report.statistic},
                         {"df", static_cast<double>(row.report.df)},
                         {"p_value", row.report.p_value}};
            r.flags = {{"reject", row.report.reject}};
        } else {
            r.strings = {{"error", row.error}};
        }
        rows.push_back(std::move(r));
    }
    if (v.global != nullptr) {
        FieldRow r{"global", "global", {}, {}, {}};
        r.numbers = {{"statistic", v.global->statistic},
                     {"df", static_cast<double>(v.global->df)},
                     {"p_value", v.global->p_value}};
        r.flags = {{"reject", v.global->reject}};
        rows.push_back(std::move(r));
    } else if (!v.global_error.empty()) {
        FieldRow r{"global", "global", {}, {}, {}};
        r.strings = {{"error", v.global_error}};
        rows.push_back(std::move(r));
    }
    return rows;
}

const std::vector<std::string>& test_columns() {
    static const std::vector<std::string> cols = {
        "kind",   "name",       "n",    "dropped", "events",    "alpha",
        "iterations", "loglik", "fhat_side", "coef", "se",      "statistic",
        "df",     "p_value",    "reject", "error"};
    return cols;
}

std::string fields_csv(const std::vector<FieldRow>& rows,
                       const std::vector<std::string>& columns) {
    std::ostringstream out;
    for (std::size_t c = 0; c < columns.size(); ++c)
        out << (c ? "," : "") << columns[c];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) out << ",";
            const std::string& col = columns[c];
            if (col == "kind") {
                out << row.kind;
                continue;
            }
            if (col == "name") {
                out << csv_quote(row.name);
                continue;
            }
            bool done = false;
            for (const auto& [k, x] : row.numbers)
                if (k == col) {
                    out << full_precision(x);
                    done = true;
                    break;
                }
            if (done) continue;
            for (const auto& [k, s] : row.strings)
                if (k == col) {
                    out << csv_quote(s);
                    done = true;
                    break;
                }
            if (done) continue;
            for (const auto& [k, b] : row.flags)
                if (k == col) {
                    out << (b ? "true" : "false");
                    break;
                }
        }
        out << "\n";
    }
    return out.str();
}

std::string fields_jsonl(const std::vector<FieldRow>& rows) {
    std::ostringstream out;
    for (const auto& row : rows) {
        nlohmann::json obj;
        obj["kind"] = row.kind;
        if (!row.name.empty()) obj["name"] = row.name;
        for (const auto& [k, x] : row.numbers) obj[k] = x;
        for (const auto& [k, s] : row.strings) obj[k] = s;
        for (const auto& [k, b] : row.flags) obj[k] = b;
        out << obj.dump() << "\n";
    }
    return out.str();
}

// ---- power rendering ----

std::vector<FieldRow> power_fields(const PowerResult& r) {
    FieldRow row{"power", "", {}, {}, {}};
    row.numbers = {{"c", r.c},
                   {"n", static_cast<double>(r.n)},
                   {"gamma_j", r.gamma_j},
                   {"d", r.d},
                   {"d_j", r.d_j},
                   {"mu", r.mu},
                   {"alpha", r.alpha},
                   {"analytic_power", r.analytic}};
    row.strings = {{"mu_scale", scale_name(r.scale)}};
    if (r.replicates > 0) {
        row.numbers.push_back({"replicates", static_cast<double>(r.replicates)});
        row.numbers.push_back({"failures", static_cast<double>(r.failures)});
        row.numbers.push_back({"mc_power", r.mc});
        row.numbers.push_back({"mc_ci_half_width", r.mc_half});
    }
    return {std::move(row)};
}

const std::vector<std::string>& power_columns() {
    static const std::vector<std::string> cols = {
        "kind", "name", "c", "n", "gamma_j", "d", "d_j", "mu", "mu_scale", "alpha",
        "analytic_power", "replicates", "failures", "mc_power", "mc_ci_half_width"};
    return cols;
}

std::string power_text(const PowerResult& r) {
    std::ostringstream out;
    out << "power analysis (alpha = " << fixed3(r.alpha) << ", mu-scale = "
        << scale_name(r.scale) << ")\n";
    out << "  c = " << fixed3(r.c) << "  n = " << r.n
        << "  gamma_j = " << fixed3(r.gamma_j) << "\n";
    out << "  plug-in: d_j = " << fixed3(r.d_j) << "  d = " << fixed3(r.d) << "\n";
    out << "  mu = " << fixed3(r.mu) << "  analytic power = " << fixed3(r.analytic)
        << "\n";
    if (r.replicates > 0) {
        out << "  monte carlo: " << r.replicates << " replicates, " << r.failures
            << " failures, power = " << fixed3(r.mc) << " (95% CI +/- "
            << fixed3(r.mc_half) << ")\n";
    }
    return out.str();
}

}  // namespace

std::string render_test(const TestRunView& view, OutputFormat format) {
    if (view.fit == nullptr) throw NumericError("test view missing the fitted model");
    switch (format) {
        case OutputFormat::text:
            return test_text(view);
        case OutputFormat::csv:
            return fields_csv(test_fields(view), test_columns());
        case OutputFormat::jsonl:
            return fields_jsonl(test_fields(view));
    }
    throw UsageError("unhandled output format");
}

std::string render_power(const PowerResult& result, OutputFormat format) {
    switch (format) {
        case OutputFormat::text:
            return power_text(result);
        case OutputFormat::csv:
            return fields_csv(power_fields(result), power_columns());
        case OutputFormat::jsonl:
            return fields_jsonl(power_fields(result));
    }
    throw UsageError("unhandled output format");
}

std::string render_sample(const std::vector<RawRecord>& records) {
    std::ostringstream out;
    const std::size_t m = records.empty() ? 0 : records.front().covariates.size();
    out << "time,status";
    for (std::size_t j = 1; j <= m; ++j) out << ",z" << j;
    out << "\n";
    for (const auto& r : records) {
        out << full_precision(r.time) << "," << static_cast<int>(r.status);
        for (double z : r.covariates) out << "," << full_precision(z);
        out << "\n";
    }
    return out.str();
}

}  // namespace phtest
