#pragma once

// Internal machinery shared by the sphere optimizers.

#include "epp/optimizers.hpp"

#include <memory>
#include <limits>
#include <random>

namespace epp::detail {

using Rng = std::mt19937_64;

Vector random_unit(int dim, Rng& rng);

/// Renormalizes in place; falls back to a random unit vector for (near) zero input.
void renormalize(Vector& x, Rng& rng);

/// Sign of `x` flipped, if needed, so that x . reference >= 0.
Vector aligned(const Vector& x, const Vector& reference);

/// Objective wrapper that tracks the best-ever candidate.
class SearchState {
public:
    SearchState(const Objective& objective, int dim, std::uint64_t seed)
        : objective_(objective), dim_(dim), rng_(seed) {}

    /// Evaluates a unit vector; throws ComputeError on non-finite fitness.
    double evaluate(const Vector& x);

    [[nodiscard]] int dim() const { return dim_; }
    Rng& rng() { return rng_; }
    [[nodiscard]] double best_fitness() const { return best_fitness_; }
    [[nodiscard]] const Vector& best() const { return best_; }
    [[nodiscard]] std::uint64_t evaluations() const { return evaluations_; }

    OperatorCounts operators;

private:
    const Objective& objective_;
    int dim_;
    Rng rng_;
    Vector best_;
    double best_fitness_ = -std::numeric_limits<double>::infinity();
    std::uint64_t evaluations_ = 0;
};

/// One population-based optimizer. `initialize` draws the starting population,
/// `step` performs one iteration.
class Swarm {
public:
    virtual ~Swarm() = default;
    virtual void initialize(SearchState& state) = 0;
    virtual void step(SearchState& state) = 0;
    [[nodiscard]] virtual int population() const = 0;
};

std::unique_ptr<Swarm> make_genetic(int individuals);
std::unique_ptr<Swarm> make_pso(int particles);
std::unique_ptr<Swarm> make_tribes();

} // namespace epp::detail
