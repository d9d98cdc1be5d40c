#include "epp/indices.hpp"
#include "epp/preprocess.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

epp::Matrix sample(int n, int p)
{
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    epp::Matrix x(n, p);
    for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] = nd(rng);
    return epp::whiten_svd(x).z;
}

void BM_Index(benchmark::State& state, epp::IndexKind kind)
{
    const auto n = static_cast<int>(state.range(0));
    const epp::Matrix z = sample(n, 10);
    const epp::Vector u = epp::Vector::Ones(z.cols()).normalized();
    for (auto _ : state) benchmark::DoNotOptimize(epp::evaluate_direction(kind, z, u));
    state.SetComplexityN(n);
}

} // namespace

BENCHMARK_CAPTURE(BM_Index, FriedmanTukey, epp::IndexKind::FriedmanTukey)->RangeMultiplier(2)->Range(128, 2048)->Complexity();
BENCHMARK_CAPTURE(BM_Index, Friedman, epp::IndexKind::Friedman)->RangeMultiplier(2)->Range(128, 2048)->Complexity();
BENCHMARK_CAPTURE(BM_Index, Kurtosis, epp::IndexKind::KurtosisMax)->RangeMultiplier(2)->Range(128, 2048)->Complexity();
BENCHMARK_CAPTURE(BM_Index, Discriminant, epp::IndexKind::Discriminant)->RangeMultiplier(2)->Range(128, 2048)->Complexity();
