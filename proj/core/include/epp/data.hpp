#pragma once

#include "epp/common.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace epp {

/// n x p numeric table with row labels and column names.
struct DataMatrix {
    Matrix values;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_names;

    [[nodiscard]] Eigen::Index rows() const { return values.rows(); }
    [[nodiscard]] Eigen::Index cols() const { return values.cols(); }
};

/// Builds a DataMatrix from values, synthesizing "obs<i>" / "V<j>" names where
/// none are given, and validates the invariants (n >= 2, p >= 1, finite, unique labels).
DataMatrix make_data_matrix(Matrix values,
                            std::vector<std::string> row_labels = {},
                            std::vector<std::string> col_names = {});

/// Throws DataError unless `x` satisfies the DataMatrix invariants.
void validate(const DataMatrix& x);

struct CsvOptions {
    bool has_header = true;
    std::optional<std::string> label_column;
};

DataMatrix load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
DataMatrix parse_csv(std::string_view text, const CsvOptions& options = {});

/// Splits one CSV record (RFC 4180 quoting) into fields.
std::vector<std::string> split_csv_record(std::string_view line);

/// Quotes a field if it contains separators, quotes or line breaks.
std::string csv_escape(std::string_view field);

/// Writes `text` to a temporary sibling file and renames it over `path`.
void write_text_atomic(const std::filesystem::path& path, std::string_view text);

/// Stable 64-bit fingerprint of the numeric contents and shape.
std::uint64_t fingerprint(const Matrix& values);

} // namespace epp
