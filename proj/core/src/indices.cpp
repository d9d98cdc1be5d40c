#include "epp/indices.hpp"

#include "epp/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace epp {

namespace {

constexpr std::array<std::string_view, 5> kIndexNames{"FriedmanTukey", "Friedman", "KurtosisMax", "KurtosisMin",
                                                      "Discriminant"};

void require_points(std::span<const double> scores, std::size_t min_n, const char* index)
{
    if (scores.size() < min_n) {
        throw ArgumentError(std::string(index) + " index needs at least " + std::to_string(min_n) + " scores");
    }
}

} // namespace

std::string_view to_string(IndexKind kind) { return kIndexNames[static_cast<std::size_t>(kind)]; }

Orientation orientation(IndexKind kind)
{
    switch (kind) {
    case IndexKind::KurtosisMin:
    case IndexKind::Discriminant:
        return Orientation::Minimize;
    default:
        return Orientation::Maximize;
    }
}

IndexKind parse_index_kind(std::string_view name)
{
    return static_cast<IndexKind>(match_unique_prefix(name, kIndexNames, "projection index"));
}

double IndexConfig::ft_bandwidth(std::size_t n) const
{
    return bandwidth_coef * std::pow(static_cast<double>(std::max<std::size_t>(n, 1)), -1.0 / 6.0);
}

double ft_kernel(double x)
{
    if (std::abs(x) > 1.0) return 0.0;
    const double t = 1.0 - x * x;
    return 35.0 / 32.0 * t * t * t;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

Vector project(const Matrix& z, const Vector& u)
{
    if (u.size() != z.cols()) {
        throw ArgumentError("direction has dimension " + std::to_string(u.size()) + ", data has " +
                            std::to_string(z.cols()) + " columns");
    }
    if (std::abs(u.norm() - 1.0) > 1e-8) throw ArgumentError("projection direction must have unit norm");
    return z * u;
}

Vector normalize_scores(std::span<const double> scores)
{
    const auto n = static_cast<Eigen::Index>(scores.size());
    if (n < 2) throw ArgumentError("normalizing scores needs at least 2 values");
    Eigen::Map<const Vector> s(scores.data(), n);
    const double mean = s.mean();
    const double sd = std::sqrt((s.array() - mean).square().sum() / static_cast<double>(n));
    if (!(sd > 1e-12)) throw ComputeError("degenerate projection");
    return (s.array() - mean) / sd;
}

double index_friedman_tukey(std::span<const double> scores, const IndexConfig& cfg)
{
    require_points(scores, 2, "Friedman-Tukey");
    const std::size_t n = scores.size();
    const double h = cfg.ft_bandwidth(n);

    std::vector<double> s(scores.begin(), scores.end());
    std::sort(s.begin(), s.end());

    // Symmetric double sum: diagonal terms plus twice the pairs within one bandwidth.
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n && s[j] - s[i] <= h; ++j) off += ft_kernel((s[j] - s[i]) / h);
    }
    const double total = static_cast<double>(n) * ft_kernel(0.0) + 2.0 * off;
    return total / (static_cast<double>(n) * static_cast<double>(n) * h);
}

double index_friedman(std::span<const double> scores, const IndexConfig&)
{
    require_points(scores, 1, "Friedman");
    double m1 = 0, m2 = 0, m3 = 0;
    for (double v : scores) {
        const double t = 2.0 * normal_cdf(v) - 1.0;
        const double t2 = t * t;
        m1 += t;
        m2 += 0.5 * (3.0 * t2 - 1.0);
        m3 += 0.5 * t * (5.0 * t2 - 3.0);
    }
    const double n = static_cast<double>(scores.size());
    m1 /= n;
    m2 /= n;
    m3 /= n;
    return 1.5 * m1 * m1 + 2.5 * m2 * m2 + 3.5 * m3 * m3;
}

double index_kurtosis(std::span<const double> scores)
{
    require_points(scores, 2, "kurtosis");
    double sum = 0;
    for (double v : scores) {
        const double v2 = v * v;
        sum += v2 * v2;
    }
    return sum;
}

double index_discriminant(std::span<const double> scores, const IndexConfig&)
{
    require_points(scores, 2, "discriminant");
    const std::size_t n = scores.size();
    double num = 0, den = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double si = scores[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = si - scores[j];
            const double d2 = d * d;
            const double w = std::exp(-d2);
            num += w * d2;
            den += w;
        }
    }
    if (den > 0) return num / den;

    // Every pair so far apart that exp underflows: fall back to log-space weights.
    double min_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) min_d2 = std::min(min_d2, (scores[i] - scores[j]) * (scores[i] - scores[j]));
    num = den = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = scores[i] - scores[j];
            const double w = std::exp(min_d2 - d * d);
            num += w * d * d;
            den += w;
        }
    }
    return num / den;
}

IndexValue evaluate(IndexKind kind, std::span<const double> scores, const IndexConfig& cfg)
{
    double value = 0;
    switch (kind) {
    case IndexKind::FriedmanTukey:
        value = index_friedman_tukey(scores, cfg);
        break;
    case IndexKind::Friedman:
        require_points(scores, 2, "Friedman");
        value = index_friedman(scores, cfg);
        break;
    case IndexKind::KurtosisMax:
    case IndexKind::KurtosisMin:
        require_points(scores, 2, "kurtosis");
        value = index_kurtosis(scores);
        break;
    case IndexKind::Discriminant:
        value = index_discriminant(scores, cfg);
        break;
    }
    return {value, orientation(kind) == Orientation::Maximize ? value : -value};
}

IndexValue evaluate_direction(IndexKind kind, const Matrix& z, const Vector& u, const IndexConfig& cfg)
{
    return evaluate(kind, normalize_scores(project(z, u)), cfg);
}

} // namespace epp
