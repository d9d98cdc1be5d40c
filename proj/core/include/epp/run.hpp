#pragma once

#include "epp/common.hpp"
#include "epp/indices.hpp"
#include "epp/preprocess.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace epp {

enum class Algorithm { GA, PSO, Tribe };

std::string_view to_string(Algorithm alg);
Algorithm parse_algorithm(std::string_view name);

/// Stop when the best fitness changed by less than `eps` (relative) over the
/// last `step_iter` iterations, or after `maxiter` iterations.
struct StoppingRule {
    int maxiter = 100;
    int step_iter = 10;
    double eps = 1e-6;

    void validate() const;
};

struct OptimizerParams {
    Algorithm algorithm = Algorithm::Tribe;
    int individuals = 50;  // GA population
    int particles = 50;    // PSO swarm
    std::uint64_t seed = 0;
};

/// One converged (or exhausted) direction.
struct RunRecord {
    Vector direction;        // unit, sign-canonical
    double index_value = 0;  // raw index, not fitness
    int iterations = 0;
    bool converged = false;
    int run_index = 0;       // restart number the record came from
};

/// A batch of restarts for one index, sorted best-first, with everything needed
/// to score training or new data.
struct EppRun {
    std::vector<RunRecord> records;
    Preprocessor preprocessor;
    IndexKind index = IndexKind::KurtosisMax;
    Algorithm algorithm = Algorithm::Tribe;
    int n_simu = 0;
    StoppingRule stopping;
    std::uint64_t seed = 0;
    std::uint64_t data_fingerprint = 0;
    std::vector<std::string> row_labels;
    std::vector<std::string> warnings;

    /// Transformed training data. Not persisted; re-attached with bind_data().
    Matrix z;

    [[nodiscard]] bool has_data() const { return z.size() > 0; }
    [[nodiscard]] int size() const { return static_cast<int>(records.size()); }
};

} // namespace epp
