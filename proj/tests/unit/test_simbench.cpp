#include "epp/error.hpp"
#include "epp/preprocess.hpp"
#include "epp/simbench.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>

using namespace epp;
using namespace epp::sim;

TEST(RandomOrthogonal, Orthogonality)
{
    for (int p : {1, 2, 5, 10}) {
        const Matrix q = random_orthogonal(p, 7 + static_cast<std::uint64_t>(p));
        EXPECT_LT((q.transpose() * q - Matrix::Identity(p, p)).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_NEAR(std::abs(q.determinant()), 1.0, 1e-10);
        for (int j = 0; j < p; ++j) EXPECT_NEAR(q.col(j).norm(), 1.0, 1e-12);
    }
    EXPECT_EQ(random_orthogonal(4, 3), random_orthogonal(4, 3));
    EXPECT_NE(random_orthogonal(4, 3), random_orthogonal(4, 4));
}

TEST(Mixture, DesignAndSampleMeans)
{
    MixtureSpec spec;
    spec.sizes = {40000, 40000, 40000};
    spec.rotate = false;
    spec.seed = 5;
    const Mixture mix = gen_mixture(spec);
    ASSERT_EQ(mix.data.rows(), 120000);
    ASSERT_EQ(mix.data.cols(), 10);
    const auto means = MixtureSpec::default_means(10);
    EXPECT_DOUBLE_EQ(means[2][1], 1.15);
    for (int c = 0; c < 3; ++c) {
        const Vector m = mix.data.values.middleRows(c * 40000, 40000).colwise().mean();
        EXPECT_LT((m - means[static_cast<std::size_t>(c)]).cwiseAbs().maxCoeff(), 0.05);
    }
    const Matrix first = mix.data.values.topRows(40000);
    const Vector var = (first.rowwise() - first.colwise().mean()).colwise().squaredNorm() / 39999.0;
    EXPECT_NEAR(var(0), 0.1, 0.01);
    EXPECT_NEAR(var(1), 0.2, 0.01);
    EXPECT_NEAR(var(5), 1.0, 0.03);
}

TEST(Mixture, CountsAndRotation)
{
    const Mixture un = gen_mixture(MixtureSpec::unbalanced(3));
    std::map<int, int> counts;
    for (int l : un.labels) counts[l]++;
    EXPECT_EQ(counts, (std::map<int, int>{{1, 200}, {2, 80}, {3, 20}}));

    MixtureSpec plain = MixtureSpec::balanced(9);
    plain.rotate = false;
    const Matrix a = gen_mixture(plain).data.values;
    const Matrix b = gen_mixture(MixtureSpec::balanced(9)).data.values;
    EXPECT_GT((a - b).cwiseAbs().maxCoeff(), 0.1);
    for (int i = 0; i < 300; i += 37)
        for (int j = i + 1; j < 300; j += 41)
            EXPECT_NEAR((a.row(i) - a.row(j)).norm(), (b.row(i) - b.row(j)).norm(), 1e-10);
}

TEST(KMeans, SmallExactCases)
{
    Matrix x(4, 2);
    x << 0, 0, 0, 0.1, 10, 10, 10.1, 10;
    const KMeansResult r = kmeans(x, 2, 10, 1);
    EXPECT_EQ(r.labels[0], r.labels[1]);
    EXPECT_EQ(r.labels[2], r.labels[3]);
    EXPECT_NE(r.labels[0], r.labels[2]);

    const Matrix pts = oracle::gaussian(6, 2, 3);
    const KMeansResult each = kmeans(pts, 6, 3, 2);
    EXPECT_NEAR(each.wcss, 0.0, 1e-24);
    EXPECT_EQ(std::set<int>(each.labels.begin(), each.labels.end()).size(), 6u);
    EXPECT_THROW(kmeans(pts, 7), ArgumentError);
}

TEST(KMeans, WcssNonIncreasingAndDeterministic)
{
    const Mixture mix = gen_mixture(MixtureSpec::balanced(12));
    const KMeansResult r = kmeans(mix.data.values, 3, 5, 4);
    for (std::size_t i = 1; i < r.wcss_trace.size(); ++i) EXPECT_LE(r.wcss_trace[i], r.wcss_trace[i - 1] + 1e-9);
    EXPECT_NEAR(r.wcss, r.wcss_trace.back(), 1e-9);
    EXPECT_EQ(kmeans(mix.data.values, 3, 5, 4).labels, r.labels);
}

TEST(AdjustedRand, Examples)
{
    const std::vector<int> a{1, 1, 2, 2, 3, 3};
    EXPECT_DOUBLE_EQ(adjusted_rand(a, a), 1.0);
    const std::vector<int> renamed{7, 7, 0, 0, 4, 4};
    EXPECT_DOUBLE_EQ(adjusted_rand(a, renamed), 1.0);
    // Contingency table all ones: index 0, expected 2*2/6 = 2/3, max 2 -> -0.5.
    EXPECT_DOUBLE_EQ(adjusted_rand(std::vector<int>{1, 1, 2, 2}, std::vector<int>{1, 2, 1, 2}), -0.5);
    EXPECT_THROW(adjusted_rand(std::vector<int>{1, 2}, std::vector<int>{1}), ArgumentError);
}

TEST(AdjustedRand, MatchesContingencyOracleAndNullIsZero)
{
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> lab(0, 3);
    for (int t = 0; t < 30; ++t) {
        std::vector<int> a(50), b(50);
        for (int i = 0; i < 50; ++i) {
            a[static_cast<std::size_t>(i)] = lab(rng);
            b[static_cast<std::size_t>(i)] = (i % 3 == 0) ? lab(rng) : a[static_cast<std::size_t>(i)] + 10;
        }
        EXPECT_NEAR(adjusted_rand(a, b), oracle::adjusted_rand(a, b), 1e-12);
    }
    std::vector<int> a(10000), b(10000);
    std::uniform_int_distribution<int> three(1, 3);
    for (int i = 0; i < 10000; ++i) {
        a[static_cast<std::size_t>(i)] = three(rng);
        b[static_cast<std::size_t>(i)] = three(rng);
    }
    EXPECT_NEAR(adjusted_rand(a, b), 0.0, 0.02);
}

TEST(Pca, AxisAlignedData)
{
    Matrix x = oracle::gaussian(2000, 3, 8);
    x.col(0) *= 1.0;
    x.col(1) *= 5.0;
    x.col(2) *= 0.2;
    const PcaResult r = pca_scores(x, false, 3);
    const Matrix c = x.rowwise() - x.colwise().mean();
    const int order[] = {1, 0, 2};
    for (int j = 0; j < 3; ++j) {
        const Vector s = r.scores.col(j);
        const Vector axis = c.col(order[j]);
        EXPECT_GT(std::abs(s.dot(axis)) / (s.norm() * axis.norm()), 0.99);
    }
    EXPECT_GT(r.eigenvalues(0), r.eigenvalues(1));
}

TEST(Pca, CorrelationModeTotalVariance)
{
    Matrix x = oracle::gaussian(300, 6, 9);
    x.col(3) = 100 * x.col(3) + x.col(0);
    const PcaResult r = pca_scores(x, true, 2);
    EXPECT_NEAR(r.eigenvalues.sum(), 6.0, 1e-10);
    EXPECT_EQ(r.scores.cols(), 2);
    EXPECT_GE(r.l80, 1);
    double acc = 0;
    for (int j = 0; j < r.l80; ++j) acc += r.eigenvalues(j);
    EXPECT_GE(acc / 6.0, 0.8 - 1e-12);
    EXPECT_LT((acc - r.eigenvalues(r.l80 - 1)) / 6.0, 0.8);
    x.col(2).setConstant(1.0);
    EXPECT_THROW(pca_scores(x, true, 2), DataError);
    EXPECT_THROW(pca_scores(x, false, 7), ArgumentError);
}

TEST(Pca, AnalyticTwoByTwo)
{
    // Covariance [[a, b], [b, a]] has eigenvectors (1, 1)/sqrt2 and (1, -1)/sqrt2 with eigenvalues a +- b.
    const Matrix g = oracle::gaussian(500, 2, 10);
    Matrix x(500, 2);
    x.col(0) = 3.0 * g.col(0) + g.col(1);
    x.col(1) = 3.0 * g.col(0) - g.col(1);
    const Matrix c = x.rowwise() - x.colwise().mean();
    const Matrix cov = c.transpose() * c / 499.0;
    // Force the exact symmetric form by using the sample covariance's own entries.
    const double a = 0.5 * (cov(0, 0) + cov(1, 1));
    Matrix sym = c;
    sym.col(0) *= std::sqrt(a / cov(0, 0));
    sym.col(1) *= std::sqrt(a / cov(1, 1));
    const Matrix symcov = sym.transpose() * sym / 499.0;
    const PcaResult r = pca_scores(sym, false, 2);
    const double bb = symcov(0, 1);
    EXPECT_NEAR(r.eigenvalues(0), a + std::abs(bb), 1e-8);
    EXPECT_NEAR(r.eigenvalues(1), a - std::abs(bb), 1e-8);
    const Vector v1 = Vector{{1.0, bb > 0 ? 1.0 : -1.0}} / std::sqrt(2.0);
    const Vector expected = sym * v1;
    EXPECT_LT(std::min((r.scores.col(0) - expected).cwiseAbs().maxCoeff(), (r.scores.col(0) + expected).cwiseAbs().maxCoeff()),
              1e-8);
}

TEST(Bench, SmokeOneRep)
{
    BenchConfig cfg;
    cfg.reps = 1;
    cfg.n_simu = 3;
    cfg.maxiter = 50;
    cfg.seed = 1;
    const auto rows = run_benchmark(cfg);
    std::map<std::string, int> per_method;
    for (const auto& r : rows) per_method[r.method + "/" + r.agg]++;
    // 5 indices + all + fast, two aggregations each, plus four baselines; two settings.
    EXPECT_EQ(rows.size(), 2u * (7 * 2 + 4));
    for (const auto& [name, count] : per_method) EXPECT_EQ(count, 2) << name;
    for (const auto& r : rows) {
        EXPECT_LE(r.ari, 1.0);
        EXPECT_GE(r.k_chosen, 1);
        EXPECT_GE(r.seconds, 0.0);
    }
    const std::string csv = bench_csv(rows);
    EXPECT_EQ(csv.rfind("setting,rep,method,agg,k_chosen,ari,seconds\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), static_cast<long>(rows.size()) + 1);
}

TEST(Bench, FastInverseUsuallyChoosesTwo)
{
    BenchConfig cfg;
    cfg.settings = {Setting::Balanced};
    cfg.reps = 30;
    cfg.indices = {IndexKind::Friedman, IndexKind::KurtosisMin};
    cfg.methods = {AggMethod::Inverse};
    cfg.baselines = false;
    cfg.seed = 4;
    std::map<int, int> ks;
    for (const auto& r : run_benchmark(cfg))
        if (r.method == "fast") ks[r.k_chosen]++;
    const auto mode = std::max_element(ks.begin(), ks.end(), [](auto& a, auto& b) { return a.second < b.second; });
    EXPECT_EQ(mode->first, 2);
}

TEST(Bench, RotationInvarianceAfterWhitening)
{
    double rotated = 0, plain = 0;
    for (std::uint64_t rep = 0; rep < 30; ++rep) {
        MixtureSpec spec = MixtureSpec::balanced(derive_seed(77, rep));
        const Mixture r = gen_mixture(spec);
        spec.rotate = false;
        const Mixture p = gen_mixture(spec);
        std::vector<int> truth(r.labels.begin(), r.labels.end());
        rotated += adjusted_rand(kmeans(whiten_svd(r.data.values).z, 3, 10, rep).labels, truth);
        plain += adjusted_rand(kmeans(whiten_svd(p.data.values).z, 3, 10, rep).labels, truth);
    }
    EXPECT_NEAR(rotated / 30, plain / 30, 0.1);
}

TEST(Bench, IndexTimingsCoverAllIndices)
{
    const auto t = time_index_evaluations(100, 5, 20, 3);
    ASSERT_EQ(t.size(), kAllIndices.size());
    for (const auto& e : t) EXPECT_GT(e.seconds_per_eval, 0.0);
    EXPECT_THROW(time_index_evaluations(1, 5, 20, 3), ArgumentError);
}
