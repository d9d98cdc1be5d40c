#include "epp/error.hpp"
#include "epp/optimizers.hpp"
#include "epp/simbench.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace epp;

namespace {

constexpr Algorithm kAlgorithms[] = {Algorithm::GA, Algorithm::PSO, Algorithm::Tribe};

OptimizerParams params_for(Algorithm alg, std::uint64_t seed)
{
    OptimizerParams p;
    p.algorithm = alg;
    p.seed = seed;
    return p;
}

class EachAlgorithm : public ::testing::TestWithParam<Algorithm> {};

} // namespace

TEST(Algorithms, Names)
{
    EXPECT_EQ(parse_algorithm("tri"), Algorithm::Tribe);
    EXPECT_EQ(parse_algorithm("GA"), Algorithm::GA);
    EXPECT_EQ(parse_algorithm("p"), Algorithm::PSO);
    EXPECT_THROW(parse_algorithm("SA"), ArgumentError);
}

TEST(StoppingRule, Validation)
{
    EXPECT_NO_THROW((StoppingRule{100, 10, 1e-6}.validate()));
    EXPECT_THROW((StoppingRule{10, 10, 1e-6}.validate()), ArgumentError);
    EXPECT_THROW((StoppingRule{0, 1, 1e-6}.validate()), ArgumentError);
    EXPECT_THROW((StoppingRule{100, 10, 0}.validate()), ArgumentError);
}

TEST_P(EachAlgorithm, ConstantObjectiveStopsAtStepIter)
{
    for (int step : {1, 4, 10}) {
        const OptimizeTrace t = optimize_traced([](const Vector&) { return -2.5; }, 4, params_for(GetParam(), 3),
                                                StoppingRule{50, step, 1e-6});
        EXPECT_EQ(t.record.iterations, step);
        EXPECT_TRUE(t.record.converged);
        EXPECT_TRUE(t.warnings.empty());
        EXPECT_NEAR(t.record.direction.norm(), 1.0, 1e-12);
    }
}

TEST_P(EachAlgorithm, SteadyImprovementHitsMaxiter)
{
    int calls = 0;
    const OptimizeTrace t = optimize_traced([&calls](const Vector&) { return 1e-3 * calls++; }, 3,
                                            params_for(GetParam(), 4), StoppingRule{60, 10, 1e-6});
    EXPECT_EQ(t.record.iterations, 60);
    EXPECT_FALSE(t.record.converged);
    ASSERT_EQ(t.warnings.size(), 1u);
    EXPECT_NE(t.warnings[0].find("maximum number of iterations"), std::string::npos);
}

TEST_P(EachAlgorithm, FindsAnalyticOptimum)
{
    const Objective f = [](const Vector& u) { return u(0) * u(0); };
    int fine = 0, coarse = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto params = params_for(GetParam(), derive_seed(17, s));
        const RunRecord patient = optimize(f, 3, params, StoppingRule{200, 50, 1e-6});
        if (oracle::angle_deg(patient.direction, Vector::Unit(3, 0)) <= 1.0) ++fine;
        const RunRecord standard = optimize(f, 3, params, StoppingRule{});
        if (oracle::angle_deg(standard.direction, Vector::Unit(3, 0)) <= 3.0) ++coarse;
    }
    EXPECT_GE(fine, 95);
    EXPECT_GE(coarse, 95);
}

TEST_P(EachAlgorithm, BestFitnessNeverDecreases)
{
    const Matrix z = oracle::gaussian(120, 5, 2);
    const Objective f = index_objective(z, IndexKind::Friedman);
    for (std::uint64_t s = 0; s < 5; ++s) {
        const OptimizeTrace t = optimize_traced(f, 5, params_for(GetParam(), s), StoppingRule{});
        EXPECT_TRUE(std::is_sorted(t.best_fitness.begin(), t.best_fitness.end()));
        EXPECT_EQ(t.best_fitness.size(), static_cast<std::size_t>(t.record.iterations) + 1);
        EXPECT_LE(std::abs(t.record.direction.norm() - 1.0), 1e-12);
        EXPECT_NEAR(t.record.index_value, t.best_fitness.back(), 1e-12);
    }
}

TEST_P(EachAlgorithm, DeterministicGivenSeed)
{
    const Matrix z = oracle::gaussian(80, 4, 7);
    const Objective f = index_objective(z, IndexKind::KurtosisMax);
    const RunRecord a = optimize(f, 4, params_for(GetParam(), 99), StoppingRule{});
    const RunRecord b = optimize(f, 4, params_for(GetParam(), 99), StoppingRule{});
    EXPECT_EQ(a.direction, b.direction);
    EXPECT_EQ(a.iterations, b.iterations);
}

TEST_P(EachAlgorithm, ErrorsOnBadInput)
{
    EXPECT_THROW(optimize([](const Vector&) { return 0.0; }, 0, params_for(GetParam(), 0), StoppingRule{}), ArgumentError);
    try {
        optimize([](const Vector& u) { return u(0) > 2 ? 0.0 : std::nan(""); }, 2, params_for(GetParam(), 0), StoppingRule{});
        FAIL();
    } catch (const ComputeError& e) {
        EXPECT_NE(std::string(e.what()).find("not finite at direction ("), std::string::npos) << e.what();
    }
}

TEST_P(EachAlgorithm, OneDimensional)
{
    const RunRecord r = optimize([](const Vector& u) { return u(0); }, 1, params_for(GetParam(), 1), StoppingRule{});
    EXPECT_DOUBLE_EQ(r.direction(0), 1.0);
}

INSTANTIATE_TEST_SUITE_P(Optimizers, EachAlgorithm, ::testing::ValuesIn(kAlgorithms),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Genetic, OperatorRates)
{
    const Objective f = [](const Vector& u) { return u(0) * u(1); };
    OperatorCounts total;
    for (std::uint64_t s = 0; total.mutation_trials < 10000 || total.crossover_trials < 10000; ++s) {
        const OptimizeTrace t = optimize_traced(f, 6, params_for(Algorithm::GA, s), StoppingRule{100, 99, 1e-300});
        total.crossover_trials += t.operators.crossover_trials;
        total.crossovers += t.operators.crossovers;
        total.mutation_trials += t.operators.mutation_trials;
        total.mutations += t.operators.mutations;
    }
    EXPECT_NEAR(static_cast<double>(total.crossovers) / total.crossover_trials, 0.65, 0.02);
    EXPECT_NEAR(static_cast<double>(total.mutations) / total.mutation_trials, 0.05, 0.01);
}

TEST(Tribes, PopulationAdaptsWithinCap)
{
    const Matrix z = oracle::gaussian(150, 8, 12);
    const Objective f = index_objective(z, IndexKind::FriedmanTukey);
    int grown = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        const OptimizeTrace t = optimize_traced(f, 8, params_for(Algorithm::Tribe, s), StoppingRule{200, 20, 1e-9});
        EXPECT_GE(t.final_population, 1);
        EXPECT_LE(t.final_population, 40);
        if (t.final_population > 1) ++grown;
    }
    EXPECT_GT(grown, 0);
}

TEST(RunMany, SortedDeterministicAndWorkerIndependent)
{
    const Matrix z = oracle::gaussian(100, 4, 3) + 0.5 * oracle::gaussian(100, 4, 4).cwiseAbs2();
    Preprocessor pp;
    pp.center = Vector::Zero(4);
    pp.scale = Vector::Ones(4);
    pp.rank = 4;
    for (IndexKind kind : {IndexKind::KurtosisMax, IndexKind::KurtosisMin}) {
        const EppRun a = run_many(z, pp, kind, {}, params_for(Algorithm::Tribe, 5), StoppingRule{}, {25, 1});
        const EppRun b = run_many(z, pp, kind, {}, params_for(Algorithm::Tribe, 5), StoppingRule{}, {25, 4});
        ASSERT_EQ(a.size(), 25);
        ASSERT_EQ(b.size(), 25);
        for (int i = 0; i < a.size(); ++i) {
            EXPECT_EQ(a.records[i].direction, b.records[i].direction);
            EXPECT_EQ(a.records[i].index_value, b.records[i].index_value);
            EXPECT_EQ(a.records[i].run_index, b.records[i].run_index);
            EXPECT_NEAR(a.records[i].index_value, evaluate_direction(kind, z, a.records[i].direction).value,
                        1e-10 * std::abs(a.records[i].index_value));
            if (i > 0) {
                if (kind == IndexKind::KurtosisMax) EXPECT_GE(a.records[i - 1].index_value, a.records[i].index_value);
                else EXPECT_LE(a.records[i - 1].index_value, a.records[i].index_value);
            }
        }
    }
}

TEST(RunMany, SingleRunAndErrors)
{
    const Matrix z = oracle::gaussian(30, 3, 1);
    Preprocessor pp;
    const EppRun one = run_many(z, pp, IndexKind::Friedman, {}, params_for(Algorithm::PSO, 1), StoppingRule{}, {1, 1});
    EXPECT_EQ(one.size(), 1);
    EXPECT_EQ(one.records[0].run_index, 0);
    EXPECT_THROW(run_many(z, pp, IndexKind::Friedman, {}, {}, StoppingRule{}, {0, 1}), ArgumentError);

    // A degenerate coordinate makes some directions fail; the error names a run.
    Matrix flat = z;
    flat.col(1).setZero();
    flat.col(2).setZero();
    try {
        run_many(flat, pp, IndexKind::Friedman, {}, params_for(Algorithm::GA, 1), StoppingRule{}, {3, 1});
    } catch (const ComputeError& e) {
        EXPECT_EQ(std::string(e.what()).rfind("run ", 0), 0u) << e.what();
    }
}

TEST(RunMany, KurtosisMinSeparatesMixtureClusters)
{
    std::vector<double> aris;
    for (std::uint64_t s = 0; s < 10; ++s) {
        const sim::Mixture mix = sim::gen_mixture(sim::MixtureSpec::balanced(derive_seed(500, s)));
        const EppRun run = run_many(mix.data, true, IndexKind::KurtosisMin, params_for(Algorithm::Tribe, s), StoppingRule{}, {100, 1});
        Matrix scores(run.z.rows(), 2);
        scores.col(0) = run.z * run.records[0].direction;
        // Second direction: best one not parallel to the first.
        for (const auto& rec : run.records) {
            if (oracle::angle_deg(rec.direction, run.records[0].direction) > 30) {
                scores.col(1) = run.z * rec.direction;
                break;
            }
        }
        const auto km = sim::kmeans(scores, 3, 10, s);
        std::vector<int> truth(mix.labels.begin(), mix.labels.end());
        aris.push_back(sim::adjusted_rand(km.labels, truth));
    }
    std::nth_element(aris.begin(), aris.begin() + 5, aris.end());
    EXPECT_GE(aris[5], 0.8);
}
