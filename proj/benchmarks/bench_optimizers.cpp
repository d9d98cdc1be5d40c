#include "epp/optimizers.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

void BM_Optimize(benchmark::State& state, epp::Algorithm alg)
{
    std::mt19937_64 rng(2);
    std::normal_distribution<double> nd;
    epp::Matrix z(300, 10);
    for (Eigen::Index k = 0; k < z.size(); ++k) z.data()[k] = nd(rng);
    const epp::Objective objective = epp::index_objective(z, epp::IndexKind::KurtosisMax);
    epp::OptimizerParams params;
    params.algorithm = alg;
    for (auto _ : state) {
        params.seed++;
        benchmark::DoNotOptimize(epp::optimize(objective, 10, params, epp::StoppingRule{}));
    }
}

} // namespace

BENCHMARK_CAPTURE(BM_Optimize, GA, epp::Algorithm::GA)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Optimize, PSO, epp::Algorithm::PSO)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Optimize, Tribe, epp::Algorithm::Tribe)->Unit(benchmark::kMillisecond);
