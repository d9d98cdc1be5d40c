#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace epp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Resolves `query` against `names` by case-insensitive unique prefix.
/// An exact (case-insensitive) match always wins, so "Friedman" is not
/// ambiguous with "FriedmanTukey". Throws ArgumentError on no/ambiguous match.
std::size_t match_unique_prefix(std::string_view query,
                                std::span<const std::string_view> names,
                                std::string_view what);

/// Flips the sign of `v` in place so that its largest-magnitude entry is positive.
/// Ties on magnitude resolve to the first such entry.
void canonicalize_sign(Eigen::Ref<Vector> v);

/// splitmix64 finalizer; the fixed mixing function used for all seed splitting.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for sub-task `index` derived from `master` (runs, replications, restarts).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t h = 0xcbf29ce484222325ULL);

std::string to_hex64(std::uint64_t value);
std::uint64_t from_hex64(std::string_view text);

} // namespace epp
