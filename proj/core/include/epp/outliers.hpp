#pragma once

#include "epp/common.hpp"
#include "epp/data.hpp"
#include "epp/run.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace epp {

enum class Location { Mean, Median };
enum class Scale { Sd, Mad };

std::string_view to_string(Location loc);
std::string_view to_string(Scale scale);
Location parse_location(std::string_view name);
Scale parse_scale(std::string_view name);

struct OutlierConfig {
    double k = 3.0;
    Location location = Location::Mean;
    Scale scale = Scale::Sd;
};

/// Normal-consistency factor applied to the median absolute deviation.
inline constexpr double kMadConstant = 1.4826;

double location_estimate(std::span<const double> x, Location loc);
double scale_estimate(std::span<const double> x, Scale scale);

struct OutlierMatrix {
    /// n x m, entry (i, j) is 1 when observation i is extreme along direction j.
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> flags;
    std::vector<std::string> row_labels;
    OutlierConfig config;
    IndexKind index = IndexKind::KurtosisMax;
    Algorithm algorithm = Algorithm::Tribe;
    std::vector<std::string> warnings;
};

/// Flags |s_ij - loc(s_j)| > k * scale(s_j) for every stored direction j.
OutlierMatrix detect(const EppRun& run, const OutlierConfig& cfg);

/// Same rule on an arbitrary score matrix (n x m).
OutlierMatrix detect_scores(const Matrix& scores, std::vector<std::string> row_labels, const OutlierConfig& cfg);

struct OutlierEntry {
    std::string label;
    int row;
    int frequency;
    double percentage;
};

struct OutlierSummary {
    int total = 0;
    int directions = 0;
    std::vector<OutlierEntry> entries;  // flagged rows in input order
};

OutlierSummary summarize(const OutlierMatrix& om);

/// Aligned text summary (OutlierID / Frequency / Percentage blocks).
std::string format_summary(const OutlierMatrix& om, const OutlierSummary& summary);

struct FlagCell {
    std::string label;
    int direction;  // 1-based
    int flag;
};

/// Long-format table for plotting, rows in input order.
std::vector<FlagCell> plot_data(const OutlierMatrix& om, bool only_outliers);

/// Rows outside the Tukey fences [Q1 - 1.5 IQR, Q3 + 1.5 IQR] in any column
/// (quartiles by linear interpolation). Returns sorted row positions.
std::vector<int> tukey_marginal_outliers(const DataMatrix& x);

} // namespace epp
