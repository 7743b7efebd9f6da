#pragma once

// CSV ingestion: comma separator, mandatory header, optional RFC-style
// quoting. Cells are kept as strings so error messages can point at the
// offending row and column; numeric conversion happens per named column.

#include <iosfwd>
#include <string>
#include <vector>

#include "phtest/sample.hpp"

namespace phtest {

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    /// Throws DataError for unknown or duplicated names.
    std::size_t column_index(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// Numeric value of one cell; empty, "NA", "NaN" (any case) and "." count
/// as missing and map to NaN. Anything else non-numeric throws DataError
/// naming the row and column.
double parse_cell(const std::string& cell, std::size_t row, const std::string& column);

/// Raw records assembled from named columns, ready for build_sample.
std::vector<RawRecord> records_from_table(const CsvTable& table,
                                          const std::string& time_col,
                                          const std::string& status_col,
                                          const std::vector<std::string>& covariate_cols);

}  // namespace phtest
