#include "epp/simbench.hpp"

#include "epp/error.hpp"
#include "epp/optimizers.hpp"
#include "epp/preprocess.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace epp::sim {

namespace {

using Rng = std::mt19937_64;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

constexpr std::array<std::string_view, 2> kSettingNames{"balanced", "unbalanced"};

} // namespace

std::array<Vector, 3> MixtureSpec::default_means(int p)
{
    if (p < 2) throw ArgumentError("mixture dimension must be at least 2");
    std::array<Vector, 3> mu{Vector::Zero(p), Vector::Zero(p), Vector::Zero(p)};
    mu[0][0] = -1.0;
    mu[0][1] = -0.58;
    mu[1][0] = 1.0;
    mu[1][1] = -0.58;
    mu[2][1] = 1.15;
    return mu;
}

Vector MixtureSpec::default_cov_diag(int p)
{
    if (p < 2) throw ArgumentError("mixture dimension must be at least 2");
    Vector d = Vector::Ones(p);
    d[0] = 0.1;
    d[1] = 0.2;
    return d;
}

MixtureSpec MixtureSpec::balanced(std::uint64_t seed)
{
    MixtureSpec s;
    s.seed = seed;
    return s;
}

MixtureSpec MixtureSpec::unbalanced(std::uint64_t seed)
{
    MixtureSpec s;
    s.sizes = {200, 80, 20};
    s.seed = seed;
    return s;
}

Matrix random_orthogonal(int p, std::uint64_t seed)
{
    if (p < 1) throw ArgumentError("dimension must be positive");
    Rng rng(seed);
    std::normal_distribution<double> normal;
    Matrix g(p, p);
    for (Eigen::Index k = 0; k < g.size(); ++k) g.data()[k] = normal(rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix& r = qr.matrixQR();
    for (int i = 0; i < p; ++i) {
        if (r(i, i) < 0) q.col(i) = -q.col(i);
    }
    return q;
}

Mixture gen_mixture(const MixtureSpec& spec)
{
    const Eigen::Index p = spec.cov_diag.size();
    for (const auto& mu : spec.means) {
        if (mu.size() != p) throw ArgumentError("mixture means and covariance differ in dimension");
    }
    if ((spec.cov_diag.array() < 0).any()) throw ArgumentError("covariance diagonal must be non-negative");
    int n = 0;
    for (int s : spec.sizes) {
        if (s < 1) throw ArgumentError("mixture component sizes must be positive");
        n += s;
    }

    Rng rng(derive_seed(spec.seed, 0));
    std::normal_distribution<double> normal;
    const Vector sd = spec.cov_diag.cwiseSqrt();
    Mixture out;
    Matrix x(n, p);
    Eigen::Index row = 0;
    for (int c = 0; c < 3; ++c) {
        for (int i = 0; i < spec.sizes[static_cast<std::size_t>(c)]; ++i, ++row) {
            for (Eigen::Index j = 0; j < p; ++j) x(row, j) = spec.means[static_cast<std::size_t>(c)][j] + sd[j] * normal(rng);
            out.labels.push_back(c + 1);
        }
    }
    if (spec.rotate) x = x * random_orthogonal(static_cast<int>(p), derive_seed(spec.seed, 1)).transpose();
    out.data = make_data_matrix(std::move(x));
    return out;
}

namespace {

struct Assignment {
    std::vector<int> labels;
    std::vector<double> dist2;
    double wcss = 0;
};

Assignment assign(const Matrix& x, const Matrix& centers)
{
    Assignment a;
    a.labels.resize(static_cast<std::size_t>(x.rows()));
    a.dist2.resize(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (Eigen::Index c = 0; c < centers.rows(); ++c) {
            const double d = (x.row(i) - centers.row(c)).squaredNorm();
            if (d < best) {
                best = d;
                arg = static_cast<int>(c);
            }
        }
        a.labels[static_cast<std::size_t>(i)] = arg;
        a.dist2[static_cast<std::size_t>(i)] = best;
        a.wcss += best;
    }
    return a;
}

Matrix seed_plus_plus(const Matrix& x, int k, Rng& rng)
{
    const Eigen::Index n = x.rows();
    Matrix centers(k, x.cols());
    std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
    centers.row(0) = x.row(first(rng));
    std::vector<double> d2(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = (x.row(i) - centers.row(0)).squaredNorm();
    for (int c = 1; c < k; ++c) {
        const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
        Eigen::Index pick = 0;
        if (total > 0) {
            std::discrete_distribution<Eigen::Index> draw(d2.begin(), d2.end());
            pick = draw(rng);
        } else {
            pick = first(rng);
        }
        centers.row(c) = x.row(pick);
        for (Eigen::Index i = 0; i < n; ++i) {
            d2[static_cast<std::size_t>(i)] = std::min(d2[static_cast<std::size_t>(i)], (x.row(i) - centers.row(c)).squaredNorm());
        }
    }
    return centers;
}

} // namespace

KMeansResult kmeans(const Matrix& x, int k, int restarts, std::uint64_t seed, int max_iter)
{
    if (k < 1) throw ArgumentError("k must be positive");
    if (k > x.rows()) throw ArgumentError("k exceeds the number of observations");
    if (restarts < 1) throw ArgumentError("restarts must be positive");

    KMeansResult best;
    best.wcss = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        Matrix centers = seed_plus_plus(x, k, rng);
        Assignment a = assign(x, centers);
        std::vector<double> trace{a.wcss};
        for (int it = 0; it < max_iter; ++it) {
            Matrix sums = Matrix::Zero(k, x.cols());
            std::vector<int> counts(static_cast<std::size_t>(k), 0);
            for (Eigen::Index i = 0; i < x.rows(); ++i) {
                sums.row(a.labels[static_cast<std::size_t>(i)]) += x.row(i);
                counts[static_cast<std::size_t>(a.labels[static_cast<std::size_t>(i)])]++;
            }
            for (int c = 0; c < k; ++c) {
                if (counts[static_cast<std::size_t>(c)] > 0) {
                    centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
                } else {
                    // Empty cluster: re-seed at the point farthest from its current center.
                    const auto far = std::max_element(a.dist2.begin(), a.dist2.end()) - a.dist2.begin();
                    centers.row(c) = x.row(far);
                    a.dist2[static_cast<std::size_t>(far)] = 0;
                }
            }
            Assignment next = assign(x, centers);
            const bool stable = next.labels == a.labels;
            a = std::move(next);
            trace.push_back(a.wcss);
            if (stable) break;
        }
        if (a.wcss < best.wcss) {
            best.labels = a.labels;
            best.centers = centers;
            best.wcss = a.wcss;
            best.wcss_trace = std::move(trace);
        }
    }
    return best;
}

double adjusted_rand(std::span<const int> a, std::span<const int> b)
{
    if (a.size() != b.size()) throw ArgumentError("partitions have different lengths");
    if (a.size() < 2) throw ArgumentError("adjusted Rand index needs at least 2 observations");

    std::map<std::pair<int, int>, double> table;
    std::map<int, double> rows, cols;
    for (std::size_t i = 0; i < a.size(); ++i) {
        table[{a[i], b[i]}] += 1;
        rows[a[i]] += 1;
        cols[b[i]] += 1;
    }
    auto choose2 = [](double m) { return m * (m - 1) / 2; };
    double index = 0, sum_a = 0, sum_b = 0;
    for (const auto& [_, m] : table) index += choose2(m);
    for (const auto& [_, m] : rows) sum_a += choose2(m);
    for (const auto& [_, m] : cols) sum_b += choose2(m);
    const double expected = sum_a * sum_b / choose2(static_cast<double>(a.size()));
    const double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected) return 1.0;  // both partitions trivial and identical in structure
    return (index - expected) / (max_index - expected);
}

PcaResult pca_scores(const Matrix& x, bool use_correlation, int k)
{
    if (k < 1 || k > x.cols()) throw ArgumentError("number of components must lie in 1..p");
    if (x.rows() < 2) throw ArgumentError("PCA needs at least 2 rows");
    Matrix centered = x.rowwise() - x.colwise().mean();
    if (use_correlation) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            const double sd = std::sqrt(centered.col(j).squaredNorm() / static_cast<double>(x.rows() - 1));
            if (sd < kDegenerateScale) throw DataError("column " + std::to_string(j + 1) + " is constant; correlation undefined");
            centered.col(j) /= sd;
        }
    }
    const Matrix cov = centered.transpose() * centered / static_cast<double>(x.rows() - 1);
    Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
    if (es.info() != Eigen::Success) throw ComputeError("PCA eigen-decomposition failed");

    PcaResult out;
    out.eigenvalues = es.eigenvalues().reverse().cwiseMax(0.0);
    Matrix vectors = es.eigenvectors().rowwise().reverse();
    for (Eigen::Index j = 0; j < vectors.cols(); ++j) canonicalize_sign(vectors.col(j));
    out.scores = centered * vectors.leftCols(k);

    const double total = out.eigenvalues.sum();
    double acc = 0;
    for (Eigen::Index j = 0; j < out.eigenvalues.size(); ++j) {
        acc += out.eigenvalues[j];
        out.l80 = static_cast<int>(j + 1);
        if (acc / total >= 0.8 - 1e-12) break;
    }
    return out;
}

std::string_view to_string(Setting s) { return kSettingNames[static_cast<std::size_t>(s)]; }

Setting parse_setting(std::string_view name)
{
    return static_cast<Setting>(match_unique_prefix(name, kSettingNames, "simulation setting"));
}

namespace {

struct IndexRun {
    IndexKind kind;
    EppRun run;
    double seconds;
};

double cluster_ari(const Matrix& scores, const std::vector<int>& truth, std::uint64_t seed)
{
    const auto km = kmeans(scores, 3, 10, seed);
    return adjusted_rand(km.labels, truth);
}

} // namespace

std::vector<BenchRow> run_benchmark(const BenchConfig& cfg)
{
    if (cfg.reps < 1) throw ArgumentError("reps must be positive");
    std::vector<BenchRow> rows;
    StoppingRule stop;
    stop.maxiter = cfg.maxiter;

    for (Setting setting : cfg.settings) {
        for (int rep = 0; rep < cfg.reps; ++rep) {
            const std::uint64_t rep_seed =
                derive_seed(cfg.seed, static_cast<std::uint64_t>(rep) * 2 + static_cast<std::uint64_t>(setting));
            const Mixture mix =
                gen_mixture(setting == Setting::Balanced ? MixtureSpec::balanced(rep_seed) : MixtureSpec::unbalanced(rep_seed));
            const Matrix centered = mix.data.values.rowwise() - mix.data.values.colwise().mean();
            const std::uint64_t km_seed = derive_seed(rep_seed, 7);

            std::vector<IndexRun> runs;
            for (IndexKind kind : cfg.indices) {
                OptimizerParams params;
                params.algorithm = Algorithm::Tribe;
                params.seed = derive_seed(rep_seed, 100 + static_cast<std::uint64_t>(kind));
                const auto start = Clock::now();
                EppRun run = run_many(mix.data, true, kind, params, stop, {cfg.n_simu, cfg.workers});
                runs.push_back({kind, std::move(run), seconds_since(start)});
            }

            auto emit_aggregated = [&](const std::string& name, const std::vector<const IndexRun*>& parts) {
                std::vector<EppRun> selected;
                double secs = 0;
                for (const IndexRun* part : parts) {
                    selected.push_back(part->run);
                    secs += part->seconds;
                }
                for (AggMethod method : cfg.methods) {
                    const auto start = Clock::now();
                    const AggResult agg = aggregate_runs(selected, method, cfg.percentage);
                    const double ari = cluster_ari(centered * agg.O, mix.labels, km_seed);
                    rows.push_back({setting, rep + 1, name, std::string(to_string(method)), agg.k, ari,
                                    secs + seconds_since(start)});
                }
            };

            std::map<IndexKind, const IndexRun*> by_kind;
            for (const auto& r : runs) {
                by_kind[r.kind] = &r;
                emit_aggregated(std::string(to_string(r.kind)), {&r});
            }
            if (by_kind.size() == kAllIndices.size()) {
                std::vector<const IndexRun*> all;
                for (IndexKind kind : kAllIndices) all.push_back(by_kind[kind]);
                emit_aggregated("all", all);
            }
            if (by_kind.count(IndexKind::Friedman) && by_kind.count(IndexKind::KurtosisMin)) {
                emit_aggregated("fast", {by_kind[IndexKind::Friedman], by_kind[IndexKind::KurtosisMin]});
            }

            if (cfg.baselines) {
                auto start = Clock::now();
                double ari = cluster_ari(centered, mix.labels, km_seed);
                rows.push_back({setting, rep + 1, "kmeans-raw", "-", static_cast<int>(centered.cols()), ari,
                                seconds_since(start)});

                start = Clock::now();
                const PcaResult pca = pca_scores(mix.data.values, true, static_cast<int>(centered.cols()));
                const double pca_secs = seconds_since(start);
                for (auto [name, k] : {std::pair<const char*, int>{"pc1", 1}, {"pc1:2", 2}, {"pc80", pca.l80}}) {
                    start = Clock::now();
                    ari = cluster_ari(pca.scores.leftCols(k), mix.labels, km_seed);
                    rows.push_back({setting, rep + 1, name, "-", k, ari, pca_secs + seconds_since(start)});
                }
            }
        }
    }
    return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows)
{
    std::ostringstream os;
    os.precision(10);
    os << "setting,rep,method,agg,k_chosen,ari,seconds\n";
    for (const auto& r : rows) {
        os << to_string(r.setting) << ',' << r.rep << ',' << r.method << ',' << r.agg << ',' << r.k_chosen << ','
           << r.ari << ',' << r.seconds << '\n';
    }
    return os.str();
}

std::vector<IndexTiming> time_index_evaluations(int n, int p, int evaluations, std::uint64_t seed)
{
    if (n < 2 || p < 1 || evaluations < 1) throw ArgumentError("invalid timing configuration");
    Rng rng(seed);
    std::normal_distribution<double> normal;
    Matrix x(n, p);
    for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] = normal(rng);
    const Fitted fit = whiten_svd(x);

    std::vector<Vector> dirs;
    for (int e = 0; e < evaluations; ++e) {
        Vector u(fit.z.cols());
        for (Eigen::Index j = 0; j < u.size(); ++j) u[j] = normal(rng);
        dirs.push_back(u.normalized());
    }

    std::vector<IndexTiming> out;
    volatile double sink = 0;
    for (IndexKind kind : kAllIndices) {
        const auto start = Clock::now();
        double acc = 0;
        for (const auto& u : dirs) acc += evaluate_direction(kind, fit.z, u).value;
        sink = sink + acc;
        out.push_back({kind, seconds_since(start) / evaluations});
    }
    return out;
}

} // namespace epp::sim
