#pragma once

#include "epp/common.hpp"

#include <array>
#include <span>
#include <string>
#include <string_view>

namespace epp {

enum class IndexKind { FriedmanTukey, Friedman, KurtosisMax, KurtosisMin, Discriminant };

enum class Orientation { Maximize, Minimize };

inline constexpr std::array<IndexKind, 5> kAllIndices{
    IndexKind::FriedmanTukey, IndexKind::Friedman, IndexKind::KurtosisMax,
    IndexKind::KurtosisMin, IndexKind::Discriminant};

std::string_view to_string(IndexKind kind);
Orientation orientation(IndexKind kind);

/// Case-insensitive unique-prefix lookup ("KurtosisMa" -> KurtosisMax; "Kurt" is ambiguous).
IndexKind parse_index_kind(std::string_view name);

/// Fixed constants of the indices. Only exposed so tests can see what is used.
struct IndexConfig {
    /// Friedman-Tukey bandwidth h = bandwidth_coef * n^(-1/6).
    double bandwidth_coef = 3.12;
    /// Legendre expansion degree of the Friedman index.
    static constexpr int friedman_degree = 3;

    [[nodiscard]] double ft_bandwidth(std::size_t n) const;
};

/// Friedman-Tukey kernel K(x) = 35/32 (1 - x^2)^3 on |x| <= 1.
double ft_kernel(double x);

/// Standard normal CDF.
double normal_cdf(double x);

/// scores_i = u . z_i. Throws ArgumentError unless |u| = 1 within 1e-8.
Vector project(const Matrix& z, const Vector& u);

/// Rescales to mean 0 and population sd 1. Throws ComputeError("degenerate projection")
/// when the population sd is <= 1e-12.
Vector normalize_scores(std::span<const double> scores);
inline Vector normalize_scores(const Vector& scores) {
    return normalize_scores(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())));
}

// The indices below expect normalized scores; they do not normalize themselves.

double index_friedman_tukey(std::span<const double> scores, const IndexConfig& cfg = {});
double index_friedman(std::span<const double> scores, const IndexConfig& cfg = {});
double index_kurtosis(std::span<const double> scores);
double index_discriminant(std::span<const double> scores, const IndexConfig& cfg = {});

struct IndexValue {
    double value;    // raw index
    double fitness;  // value, negated for minimize-oriented indices
};

IndexValue evaluate(IndexKind kind, std::span<const double> scores, const IndexConfig& cfg = {});

inline IndexValue evaluate(IndexKind kind, const Vector& scores, const IndexConfig& cfg = {}) {
    return evaluate(kind, std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())), cfg);
}

/// project -> normalize_scores -> evaluate.
IndexValue evaluate_direction(IndexKind kind, const Matrix& z, const Vector& u, const IndexConfig& cfg = {});

} // namespace epp
