#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace phtest {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid or unusable input data (bad CSV cell, non-positive time,
/// zero events, ...). Maps to CLI exit code 2.
struct DataError : Error {
    explicit DataError(const std::string& what) : Error(what) {}
    DataError(const std::string& what, std::size_t record) : Error(what), record_index(record) {}
    DataError(const std::string& what, std::size_t record, std::size_t field)
        : Error(what), record_index(record), field_index(field) {}

    // When set, the offending data row (1-based, header excluded) and field.
    std::optional<std::size_t> record_index;
    std::optional<std::size_t> field_index;
};

/// Numerical failure: separation, singular information, singular Sigma,
/// degenerate variance. Maps to CLI exit code 3.
struct NumericError : Error {
    using Error::Error;
};

/// Caller misuse: bad flag values, empty index sets, out-of-range alpha.
/// Maps to CLI exit code 4.
struct UsageError : Error {
    using Error::Error;
};

}  // namespace phtest
