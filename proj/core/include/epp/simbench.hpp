#pragma once

#include "epp/aggregate.hpp"
#include "epp/common.hpp"
#include "epp/data.hpp"
#include "epp/indices.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace epp::sim {

/// Three-population Gaussian mixture with a shared diagonal covariance.
struct MixtureSpec {
    std::array<int, 3> sizes{100, 100, 100};
    std::array<Vector, 3> means = default_means(10);
    Vector cov_diag = default_cov_diag(10);
    bool rotate = true;
    std::uint64_t seed = 0;

    static std::array<Vector, 3> default_means(int p);
    static Vector default_cov_diag(int p);
    static MixtureSpec balanced(std::uint64_t seed);
    static MixtureSpec unbalanced(std::uint64_t seed);
};

struct Mixture {
    DataMatrix data;
    std::vector<int> labels;  // 1, 2 or 3
};

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, R diagonal made positive).
Matrix random_orthogonal(int p, std::uint64_t seed);

Mixture gen_mixture(const MixtureSpec& spec);

struct KMeansResult {
    std::vector<int> labels;  // 0-based cluster ids
    Matrix centers;           // k x p
    double wcss = 0;
    /// WCSS after each Lloyd iteration of the winning restart.
    std::vector<double> wcss_trace;
};

/// Lloyd's algorithm with k-means++ seeding; best of `restarts` by WCSS.
KMeansResult kmeans(const Matrix& x, int k, int restarts = 10, std::uint64_t seed = 0, int max_iter = 100);

/// Hubert-Arabie adjusted Rand index.
double adjusted_rand(std::span<const int> a, std::span<const int> b);

struct PcaResult {
    Matrix scores;       // n x k
    Vector eigenvalues;  // all p, descending
    int l80 = 0;         // components needed for >= 80% of the variance
};

PcaResult pca_scores(const Matrix& x, bool use_correlation, int k);

enum class Setting { Balanced, Unbalanced };
std::string_view to_string(Setting s);
Setting parse_setting(std::string_view name);

struct BenchConfig {
    std::vector<Setting> settings{Setting::Balanced, Setting::Unbalanced};
    int reps = 50;
    int n_simu = 20;
    int maxiter = 200;
    std::vector<IndexKind> indices{kAllIndices.begin(), kAllIndices.end()};
    std::vector<AggMethod> methods{AggMethod::Inverse, AggMethod::Cumulative};
    double percentage = 0.85;
    std::uint64_t seed = 0;
    int workers = 1;
    bool baselines = true;
};

/// One tidy output row.
struct BenchRow {
    Setting setting;
    int rep;
    std::string method;  // index name, "all", "fast", "kmeans-raw", "pc1", "pc1:2", "pc80"
    std::string agg;     // aggregation method name, or "-" for baselines
    int k_chosen;
    double ari;
    double seconds;
};

std::vector<BenchRow> run_benchmark(const BenchConfig& cfg);

std::string bench_csv(const std::vector<BenchRow>& rows);

/// Mean seconds per single index evaluation on an n x p sphered Gaussian sample.
struct IndexTiming {
    IndexKind index;
    double seconds_per_eval;
};
std::vector<IndexTiming> time_index_evaluations(int n, int p, int evaluations, std::uint64_t seed);

} // namespace epp::sim
