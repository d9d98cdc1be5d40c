#include "epp/data.hpp"

#include "epp/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace epp {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

// Splits text into records of fields, honoring quoted fields that contain
// separators, doubled quotes and line breaks.
std::vector<std::vector<std::string>> parse_records(std::string_view text)
{
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;

    auto end_record = [&] {
        if (field_started || !fields.empty() || !field.empty()) {
            fields.push_back(std::move(field));
            records.push_back(std::move(fields));
        }
        fields.clear();
        field.clear();
        field_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            in_quotes = true;
            field_started = true;
            break;
        case ',':
            fields.push_back(std::move(field));
            field.clear();
            field_started = true;
            break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
            end_record();
            break;
        case '\n':
            end_record();
            break;
        default:
            field += c;
            field_started = true;
        }
    }
    if (in_quotes) throw DataError("unterminated quoted field at end of input");
    end_record();
    return records;
}

} // namespace

std::vector<std::string> split_csv_record(std::string_view line)
{
    auto records = parse_records(line);
    if (records.empty()) return {};
    return std::move(records.front());
}

std::string csv_escape(std::string_view field)
{
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void validate(const DataMatrix& x)
{
    if (x.values.rows() < 2) throw DataError("data needs at least 2 rows, got " + std::to_string(x.values.rows()));
    if (x.values.cols() < 1) throw DataError("data needs at least 1 numeric column");
    if (!x.values.allFinite()) throw DataError("data contains non-finite values");
    if (static_cast<Eigen::Index>(x.row_labels.size()) != x.values.rows())
        throw DataError("row label count does not match row count");
    if (static_cast<Eigen::Index>(x.col_names.size()) != x.values.cols())
        throw DataError("column name count does not match column count");
    std::unordered_set<std::string> seen;
    for (const auto& label : x.row_labels) {
        if (!seen.insert(label).second) throw DataError("duplicate row label '" + label + "'");
    }
}

DataMatrix make_data_matrix(Matrix values, std::vector<std::string> row_labels, std::vector<std::string> col_names)
{
    DataMatrix x;
    if (row_labels.empty()) {
        row_labels.reserve(static_cast<std::size_t>(values.rows()));
        for (Eigen::Index i = 0; i < values.rows(); ++i) row_labels.push_back("obs" + std::to_string(i + 1));
    }
    if (col_names.empty()) {
        col_names.reserve(static_cast<std::size_t>(values.cols()));
        for (Eigen::Index j = 0; j < values.cols(); ++j) col_names.push_back("V" + std::to_string(j + 1));
    }
    x.values = std::move(values);
    x.row_labels = std::move(row_labels);
    x.col_names = std::move(col_names);
    validate(x);
    return x;
}

DataMatrix parse_csv(std::string_view text, const CsvOptions& options)
{
    auto records = parse_records(text);
    if (records.empty()) throw DataError("empty CSV input");

    std::vector<std::string> header;
    std::size_t first_data = 0;
    if (options.has_header) {
        header = records.front();
        for (auto& h : header) h = std::string(trim(h));
        first_data = 1;
    }
    const std::size_t width = records.front().size();
    if (records.size() <= first_data) throw DataError("CSV has a header but no data rows");

    std::optional<std::size_t> label_col;
    if (options.label_column) {
        if (!options.has_header) throw DataError("label column '" + *options.label_column + "' requires a header row");
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (header[j] == *options.label_column) label_col = j;
        }
        if (!label_col) throw DataError("label column '" + *options.label_column + "' not found in header");
    }

    const std::size_t n = records.size() - first_data;
    const std::size_t p = width - (label_col ? 1 : 0);
    if (p == 0) throw DataError("CSV has no numeric columns");

    Matrix values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    std::vector<std::string> labels;
    std::vector<std::string> names;
    if (options.has_header) {
        for (std::size_t j = 0; j < width; ++j) {
            if (label_col && j == *label_col) continue;
            names.push_back(header[j].empty() ? "V" + std::to_string(names.size() + 1) : header[j]);
        }
    }

    for (std::size_t r = 0; r < n; ++r) {
        const auto& rec = records[first_data + r];
        const std::size_t row_no = r + 1;
        if (rec.size() != width) {
            throw DataError("row " + std::to_string(row_no) + ": expected " + std::to_string(width) + " fields, got " +
                            std::to_string(rec.size()));
        }
        std::size_t out_col = 0;
        for (std::size_t j = 0; j < width; ++j) {
            if (label_col && j == *label_col) {
                labels.emplace_back(trim(rec[j]));
                continue;
            }
            const std::string_view cell = trim(rec[j]);
            double v = 0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
                const std::string col = options.has_header ? "'" + header[j] + "'" : std::to_string(j + 1);
                throw DataError("row " + std::to_string(row_no) + ", column " + col + ": cannot parse '" +
                                std::string(cell) + "' as a finite number");
            }
            values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(out_col++)) = v;
        }
    }
    return make_data_matrix(std::move(values), std::move(labels), std::move(names));
}

DataMatrix load_csv(const std::filesystem::path& path, const CsvOptions& options)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF && static_cast<unsigned char>(text[1]) == 0xBB &&
        static_cast<unsigned char>(text[2]) == 0xBF) {
        text.erase(0, 3);
    }
    try {
        return parse_csv(text, options);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_text_atomic(const std::filesystem::path& path, std::string_view text)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out.flush()) throw Error("failed writing '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error("cannot move output into place at '" + path.string() + "'");
    }
}

std::uint64_t fingerprint(const Matrix& values)
{
    const std::int64_t dims[2] = {values.rows(), values.cols()};
    std::uint64_t h = fnv1a64(dims, sizeof dims);
    // Column-major storage; hash the IEEE bytes, normalizing -0.0 to 0.0.
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        double v = values.data()[k];
        if (v == 0.0) v = 0.0;
        h = fnv1a64(&v, sizeof v, h);
    }
    return h;
}

} // namespace epp
