#pragma once

// Rendering of test and power runs. Text mode rounds to three decimals;
// csv and jsonl carry the same values at full precision, field for field,
// so the three views of one run never disagree on a number.

#include <cstddef>
#include <string>
#include <vector>

#include "phtest/cox.hpp"
#include "phtest/ph_test.hpp"
#include "phtest/power.hpp"
#include "phtest/sample.hpp"

namespace phtest {

enum class OutputFormat { text, csv, jsonl };

/// Throws UsageError for anything but "text", "csv", "jsonl".
OutputFormat parse_format(const std::string& name);

/// Everything one `test` run produced.
struct TestRunView {
    std::size_t n = 0;
    std::size_t dropped = 0;
    std::size_t events = 0;
    double alpha = 0.05;
    FhatSide side = FhatSide::right;
    std::vector<std::string> names;          // covariate names, size m
    const CoxFit* fit = nullptr;
    std::vector<CovariateRow> rows;          // singleton tests
    const PhTestReport* global = nullptr;    // null unless the set has >= 2
    std::string global_error;                // set when the global test failed
};

std::string render_test(const TestRunView& view, OutputFormat format);

std::string render_power(const PowerResult& result, OutputFormat format);

/// Simulated sample as CSV with columns time,status,z1..zm (always CSV;
/// the sample is itself the data product).
std::string render_sample(const std::vector<RawRecord>& records);

/// Full-precision decimal rendering that round-trips through strtod.
std::string full_precision(double x);

}  // namespace phtest
