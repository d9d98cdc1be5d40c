#pragma once

#include "epp/common.hpp"
#include "epp/data.hpp"
#include "epp/run.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace epp {

/// 0-based positions into EppRun::records.
using Selection = std::vector<int>;

/// First min(10, m) directions.
Selection default_selection(const EppRun& run);

/// Parses "1:10", "1,70,90" or "3" (1-based, inclusive ranges) into a Selection.
Selection parse_selection(std::string_view text);

/// Throws ArgumentError when a position is outside [0, run.size()).
void check_selection(const EppRun& run, const Selection& which);

/// Attaches training data to a run (e.g. one read from disk). Returns a warning
/// when the data fingerprint does not match the run's.
std::vector<std::string> bind_data(EppRun& run, const DataMatrix& data);

/// n x |which| scores of the training data.
Matrix fitted(const EppRun& run, const Selection& which);
inline Matrix fitted(const EppRun& run) { return fitted(run, default_selection(run)); }

/// Scores of new rows (same p as the training data).
Matrix predict(const EppRun& run, const Matrix& newdata, const Selection& which);

/// p x |which| unit directions in original variable coordinates.
Matrix coef(const EppRun& run, const Selection& which);

/// Angle in degrees between the best direction and each selected one, in [0, 90].
std::vector<double> angles_to_best(const EppRun& run, const Selection& which);

struct ScreePoint {
    int run_number;  // 1-based position in the sorted order
    double value;
};
std::vector<ScreePoint> scree(const EppRun& run, const Selection& which);

struct DensityPoint {
    double x;
    double density;
};

/// Gaussian KDE with Silverman's bandwidth 0.9 min(sd, IQR/1.34) n^(-1/5),
/// evaluated on an equispaced grid covering the data +- 4 bandwidths.
std::vector<DensityPoint> density_report(std::span<const double> scores, int grid_size = 512);

struct Histogram {
    std::vector<double> edges;  // bins + 1 entries
    std::vector<int> counts;
};

/// Equal-width histogram; bins <= 0 selects Sturges' rule.
Histogram histogram_report(std::span<const double> scores, int bins = 0);

/// Quantile with linear interpolation between order statistics (R type 7).
double quantile_linear(std::vector<double> values, double prob);

void save_run(const EppRun& run, const std::filesystem::path& path);
std::string serialize_run(const EppRun& run);
EppRun load_run(const std::filesystem::path& path);
EppRun deserialize_run(std::string_view text);

inline constexpr int kRunFormatVersion = 1;

} // namespace epp
