#include "phtest/csv.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>

#include "phtest/errors.hpp"

namespace phtest {

namespace {

std::string trimmed(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// One pass over the stream; quoted cells may contain commas, doubled
// quotes and line breaks.
std::vector<std::vector<std::string>> parse_rows(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false;
    bool cell_started = false;
    bool row_started = false;

    auto end_cell = [&] {
        row.push_back(cell);
        cell.clear();
        cell_started = false;
    };
    auto end_row = [&] {
        end_cell();
        rows.push_back(std::move(row));
        row.clear();
        row_started = false;
    };

    char c;
    while (in.get(c)) {
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    cell.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                cell.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!cell_started || cell.empty()) {
                    quoted = true;
                    cell_started = true;
                    row_started = true;
                } else {
                    cell.push_back(c);
                }
                break;
            case ',':
                end_cell();
                row_started = true;
                break;
            case '\r':
                break;
            case '\n':
                if (row_started || cell_started || !row.empty()) end_row();
                break;
            default:
                cell.push_back(c);
                cell_started = true;
                row_started = true;
        }
    }
    if (quoted) throw DataError("unterminated quoted cell at end of input");
    if (row_started || !row.empty() || !cell.empty()) end_row();
    return rows;
}

}  // namespace

std::size_t CsvTable::column_index(const std::string& name) const {
    std::size_t found = columns.size();
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j] == name) {
            if (found != columns.size())
                throw DataError("column '" + name + "' appears more than once");
            found = j;
        }
    }
    if (found == columns.size()) throw DataError("no column named '" + name + "'");
    return found;
}

CsvTable read_csv(std::istream& in) {
    auto rows = parse_rows(in);
    if (rows.empty()) throw DataError("input has no header row");

    CsvTable table;
    table.columns = rows.front();
    for (auto& c : table.columns) c = trimmed(c);
    if (table.columns.empty() || (table.columns.size() == 1 && table.columns[0].empty()))
        throw DataError("header row is empty");

    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != table.columns.size())
            throw DataError("row has " + std::to_string(rows[r].size()) +
                                " cells, header has " + std::to_string(table.columns.size()),
                            r);
        table.rows.push_back(std::move(rows[r]));
    }
    return table;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    return read_csv(in);
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
    const std::string s = trimmed(cell);
    std::string lower = s;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s.empty() || lower == "na" || lower == "nan" || s == ".")
        return std::numeric_limits<double>::quiet_NaN();

    const char* begin = s.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end != begin + s.size())
        throw DataError("cell '" + s + "' in column '" + column + "' is not numeric", row);
    return value;
}

std::vector<RawRecord> records_from_table(const CsvTable& table,
                                          const std::string& time_col,
                                          const std::string& status_col,
                                          const std::vector<std::string>& covariate_cols) {
    if (covariate_cols.empty()) throw UsageError("no covariate columns selected");
    const std::size_t ti = table.column_index(time_col);
    const std::size_t si = table.column_index(status_col);
    std::vector<std::size_t> ci;
    for (const auto& name : covariate_cols) ci.push_back(table.column_index(name));

    std::vector<RawRecord> records;
    records.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        RawRecord rec;
        rec.time = parse_cell(row[ti], r + 1, time_col);
        rec.status = parse_cell(row[si], r + 1, status_col);
        for (std::size_t j = 0; j < ci.size(); ++j)
            rec.covariates.push_back(parse_cell(row[ci[j]], r + 1, covariate_cols[j]));
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace phtest
