#pragma once

#include "epp/common.hpp"
#include "epp/run.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace epp {

enum class AggMethod { Cumulative, Inverse, SqInverse };

std::string_view to_string(AggMethod method);
AggMethod parse_agg_method(std::string_view name);

/// Rank-k summary of many one-dimensional directions.
struct AggResult {
    Matrix P;            // p x p, O O^T
    Matrix O;            // p x k, orthonormal, sign-canonical columns
    int k = 0;
    Vector eigenvalues;  // spectrum of the average projector, descending
};

/// (1/N) sum u_i u_i^T. Every direction must be unit length and share one dimension.
Matrix average_projector(std::span<const Vector> directions);

/// Eigenvalues of a symmetric matrix, descending, with round-off below zero clamped to 0.
Vector symmetric_spectrum(const Matrix& m);

/// Eigenvalues at or below this count as zero when estimating the spectrum rank.
inline constexpr double kSpectrumZero = 1e-9;

/// Number of leading eigenvalues to keep.
///  - Cumulative: smallest k with sum_{i<=k} l_i / sum l_i >= percentage.
///  - Inverse: r = #{l_i > 1e-9}; k = #{l_i > sum l / r}.
///  - SqInverse: k = #{l_i^2 > sum l^2 / r}.
/// Result is clamped to [1, r].
int select_k(std::span<const double> eigenvalues, AggMethod method, double percentage = 0.85);
inline int select_k(const Vector& eigenvalues, AggMethod method, double percentage = 0.85) {
    return select_k(std::span<const double>(eigenvalues.data(), static_cast<std::size_t>(eigenvalues.size())),
                    method, percentage);
}

/// Aggregates raw unit directions.
AggResult aggregate_directions(std::span<const Vector> directions, AggMethod method, double percentage = 0.85);

/// Aggregates all directions of one or more runs, mapped to original coordinates first.
AggResult aggregate_runs(std::span<const EppRun> runs, AggMethod method, double percentage = 0.85);

/// All directions of `run` in original coordinates.
std::vector<Vector> original_directions(const EppRun& run);

} // namespace epp
