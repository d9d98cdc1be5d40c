#include "epp/outliers.hpp"

#include "epp/error.hpp"
#include "epp/results.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

namespace epp {

namespace {

constexpr std::array<std::string_view, 2> kLocationNames{"mean", "median"};
constexpr std::array<std::string_view, 2> kScaleNames{"sd", "mad"};

double median_of(std::vector<double> v)
{
    const std::size_t n = v.size();
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (n % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(v.begin(), mid);
    return 0.5 * (lower + upper);
}

} // namespace

std::string_view to_string(Location loc) { return kLocationNames[static_cast<std::size_t>(loc)]; }
std::string_view to_string(Scale scale) { return kScaleNames[static_cast<std::size_t>(scale)]; }

Location parse_location(std::string_view name)
{
    return static_cast<Location>(match_unique_prefix(name, kLocationNames, "location estimator"));
}

Scale parse_scale(std::string_view name)
{
    return static_cast<Scale>(match_unique_prefix(name, kScaleNames, "scale estimator"));
}

double location_estimate(std::span<const double> x, Location loc)
{
    if (x.empty()) throw ArgumentError("location of empty sample");
    if (loc == Location::Median) return median_of({x.begin(), x.end()});
    double sum = 0;
    for (double v : x) sum += v;
    return sum / static_cast<double>(x.size());
}

double scale_estimate(std::span<const double> x, Scale scale)
{
    if (x.size() < 2) throw ArgumentError("scale needs at least 2 values");
    if (scale == Scale::Mad) {
        const double med = median_of({x.begin(), x.end()});
        std::vector<double> dev;
        dev.reserve(x.size());
        for (double v : x) dev.push_back(std::abs(v - med));
        return kMadConstant * median_of(std::move(dev));
    }
    const double mean = location_estimate(x, Location::Mean);
    double ss = 0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

OutlierMatrix detect_scores(const Matrix& scores, std::vector<std::string> row_labels, const OutlierConfig& cfg)
{
    if (!(cfg.k > 0)) throw ArgumentError("outlier factor k must be positive");
    if (scores.cols() < 1) throw ArgumentError("no directions to screen for outliers");
    if (static_cast<Eigen::Index>(row_labels.size()) != scores.rows())
        throw ArgumentError("row label count does not match the score matrix");

    OutlierMatrix om;
    om.config = cfg;
    om.row_labels = std::move(row_labels);
    om.flags.setZero(scores.rows(), scores.cols());
    for (Eigen::Index j = 0; j < scores.cols(); ++j) {
        const Vector col = scores.col(j);
        const std::span<const double> s(col.data(), static_cast<std::size_t>(col.size()));
        const double loc = location_estimate(s, cfg.location);
        const double sc = scale_estimate(s, cfg.scale);
        if (!(sc > 0)) {
            om.warnings.push_back("direction " + std::to_string(j + 1) + " has zero " +
                                  std::string(to_string(cfg.scale)) + "; no observations flagged");
            continue;
        }
        for (Eigen::Index i = 0; i < scores.rows(); ++i) {
            om.flags(i, j) = std::abs(col[i] - loc) > cfg.k * sc ? 1 : 0;
        }
    }
    return om;
}

OutlierMatrix detect(const EppRun& run, const OutlierConfig& cfg)
{
    if (run.records.empty()) throw ArgumentError("run has no directions");
    Selection all(run.records.size());
    for (std::size_t j = 0; j < all.size(); ++j) all[j] = static_cast<int>(j);
    std::vector<std::string> labels = run.row_labels;
    if (labels.empty()) {
        for (Eigen::Index i = 0; i < run.z.rows(); ++i) labels.push_back("obs" + std::to_string(i + 1));
    }
    OutlierMatrix om = detect_scores(fitted(run, all), std::move(labels), cfg);
    om.index = run.index;
    om.algorithm = run.algorithm;
    return om;
}

OutlierSummary summarize(const OutlierMatrix& om)
{
    OutlierSummary s;
    s.directions = static_cast<int>(om.flags.cols());
    for (Eigen::Index i = 0; i < om.flags.rows(); ++i) {
        const int freq = om.flags.row(i).cast<int>().sum();
        if (freq == 0) continue;
        ++s.total;
        s.entries.push_back({om.row_labels[static_cast<std::size_t>(i)], static_cast<int>(i), freq,
                             100.0 * freq / static_cast<double>(s.directions)});
    }
    return s;
}

std::string format_summary(const OutlierMatrix& om, const OutlierSummary& summary)
{
    std::ostringstream os;
    os << "Outlier Summary\n"
       << "-----------------------\n"
       << "Index name       : " << to_string(om.index) << '\n'
       << "Algorithm used   : " << to_string(om.algorithm) << '\n'
       << "Location used    : " << to_string(om.config.location) << '\n'
       << "Scale used       : " << to_string(om.config.scale) << '\n'
       << "k value used     : " << om.config.k << '\n'
       << "-----------------------\n\n"
       << "Number of outliers detected:\n " << summary.total << "\n";
    if (summary.entries.empty()) return os.str();

    auto pct = [](double v) {
        std::ostringstream p;
        p << std::setprecision(4) << v;
        return p.str();
    };
    os << "\nObservations considered outliers:\n";
    constexpr std::size_t kPerBlock = 6;
    for (std::size_t start = 0; start < summary.entries.size(); start += kPerBlock) {
        const std::size_t end = std::min(start + kPerBlock, summary.entries.size());
        std::string ids = "OutlierID: ", freq = "Frequency: ", perc = "Percentage:";
        for (std::size_t e = start; e < end; ++e) {
            const auto& entry = summary.entries[e];
            const std::string f = std::to_string(entry.frequency);
            const std::string q = pct(entry.percentage);
            const std::size_t w = std::max({entry.label.size(), f.size(), q.size()});
            auto pad = [w](std::string s) { return " " + s + std::string(w - s.size(), ' '); };
            ids += pad(entry.label);
            freq += pad(f);
            perc += pad(q);
        }
        if (start > 0) os << '\n';
        os << ids << '\n' << freq << '\n' << perc << '\n';
    }
    return os.str();
}

std::vector<FlagCell> plot_data(const OutlierMatrix& om, bool only_outliers)
{
    std::vector<FlagCell> out;
    for (Eigen::Index i = 0; i < om.flags.rows(); ++i) {
        if (only_outliers && om.flags.row(i).cast<int>().sum() == 0) continue;
        for (Eigen::Index j = 0; j < om.flags.cols(); ++j) {
            out.push_back({om.row_labels[static_cast<std::size_t>(i)], static_cast<int>(j + 1), om.flags(i, j)});
        }
    }
    return out;
}

std::vector<int> tukey_marginal_outliers(const DataMatrix& x)
{
    if (x.rows() < 4) throw ArgumentError("Tukey fences need at least 4 rows");
    std::set<int> flagged;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const std::vector<double> col(x.values.col(j).data(), x.values.col(j).data() + x.rows());
        const double q1 = quantile_linear(col, 0.25);
        const double q3 = quantile_linear(col, 0.75);
        const double iqr = q3 - q1;
        const double lo_fence = q1 - 1.5 * iqr;
        const double hi_fence = q3 + 1.5 * iqr;
        // Whiskers end at the most extreme observations inside the fences.
        double lo_whisker = std::numeric_limits<double>::infinity();
        double hi_whisker = -std::numeric_limits<double>::infinity();
        for (double v : col) {
            if (v >= lo_fence) lo_whisker = std::min(lo_whisker, v);
            if (v <= hi_fence) hi_whisker = std::max(hi_whisker, v);
        }
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const double v = col[static_cast<std::size_t>(i)];
            if (v < lo_whisker || v > hi_whisker) flagged.insert(static_cast<int>(i));
        }
    }
    return {flagged.begin(), flagged.end()};
}

} // namespace epp
