#pragma once

#include "epp/common.hpp"
#include "epp/indices.hpp"
#include "epp/run.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace epp {

/// Fitness to be maximized over unit vectors. Must be reentrant when used from run_many.
using Objective = std::function<double(const Vector&)>;

/// Per-iteration statistics of the genetic operators (for auditing operator rates).
struct OperatorCounts {
    std::uint64_t crossover_trials = 0;
    std::uint64_t crossovers = 0;
    std::uint64_t mutation_trials = 0;
    std::uint64_t mutations = 0;
};

struct OptimizeTrace {
    RunRecord record;
    /// best-so-far fitness after initialization (entry 0) and after each iteration.
    std::vector<double> best_fitness;
    OperatorCounts operators;
    std::vector<std::string> warnings;
    /// Final population size (Tribes grows and shrinks its swarm).
    int final_population = 0;
};

/// Maximizes `objective` over the unit sphere in `dim` dimensions.
/// The returned record carries the best-ever direction (sign-canonical) and its
/// fitness in `index_value`; callers that optimize an index re-map it.
OptimizeTrace optimize_traced(const Objective& objective, int dim, const OptimizerParams& params,
                              const StoppingRule& stop);

inline RunRecord optimize(const Objective& objective, int dim, const OptimizerParams& params,
                          const StoppingRule& stop) {
    return optimize_traced(objective, dim, params, stop).record;
}

/// Objective evaluating `kind` on the projections of `z`.
Objective index_objective(const Matrix& z, IndexKind kind, const IndexConfig& cfg = {});

struct RunManyOptions {
    int n_simu = 100;
    /// Worker threads for independent restarts; output does not depend on it.
    int workers = 1;
};

/// n_simu independent restarts with per-run seeds derive_seed(params.seed, run),
/// sorted best first. The returned run holds `z` and `pp` for later reporting.
EppRun run_many(const Matrix& z, const Preprocessor& pp, IndexKind kind, const IndexConfig& cfg,
                const OptimizerParams& params, const StoppingRule& stop, const RunManyOptions& options);

/// Convenience: preprocess `data` and run.
EppRun run_many(const DataMatrix& data, bool sphere, IndexKind kind, const OptimizerParams& params,
                const StoppingRule& stop, const RunManyOptions& options);

} // namespace epp
