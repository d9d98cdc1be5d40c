#include "epp/optimizers.hpp"

#include "epp/error.hpp"
#include "search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace epp {

namespace {

constexpr std::array<std::string_view, 3> kAlgorithmNames{"GA", "PSO", "Tribe"};

std::string describe(const Vector& v)
{
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << ')';
    return os.str();
}

} // namespace

std::string_view to_string(Algorithm alg) { return kAlgorithmNames[static_cast<std::size_t>(alg)]; }

Algorithm parse_algorithm(std::string_view name)
{
    return static_cast<Algorithm>(match_unique_prefix(name, kAlgorithmNames, "algorithm"));
}

void StoppingRule::validate() const
{
    if (maxiter < 1) throw ArgumentError("maxiter must be positive");
    if (step_iter < 1) throw ArgumentError("step_iter must be positive");
    if (step_iter >= maxiter) throw ArgumentError("step_iter must be smaller than maxiter");
    if (!(eps > 0)) throw ArgumentError("eps must be positive");
}

namespace detail {

Vector random_unit(int dim, Rng& rng)
{
    std::normal_distribution<double> normal;
    Vector v(dim);
    for (;;) {
        for (int i = 0; i < dim; ++i) v[i] = normal(rng);
        const double norm = v.norm();
        if (norm > 1e-12) return v / norm;
    }
}

void renormalize(Vector& x, Rng& rng)
{
    const double norm = x.norm();
    if (norm > 1e-12 && std::isfinite(norm)) {
        x /= norm;
    } else {
        x = random_unit(static_cast<int>(x.size()), rng);
    }
}

Vector aligned(const Vector& x, const Vector& reference) { return x.dot(reference) < 0 ? Vector(-x) : x; }

double SearchState::evaluate(const Vector& x)
{
    const double f = objective_(x);
    ++evaluations_;
    if (!std::isfinite(f)) throw ComputeError("objective is not finite at direction " + describe(x));
    if (f > best_fitness_) {
        best_fitness_ = f;
        best_ = x;
    }
    return f;
}

namespace {

struct Candidate {
    Vector x;
    double f;
};

// Generational GA with tournament selection, two-point crossover on coordinate
// blocks, Gaussian mutation and single-individual elitism.
class Genetic final : public Swarm {
public:
    explicit Genetic(int size) : size_(size) {}

    void initialize(SearchState& state) override
    {
        pop_.clear();
        for (int i = 0; i < size_; ++i) {
            Vector x = random_unit(state.dim(), state.rng());
            const double f = state.evaluate(x);
            pop_.push_back({std::move(x), f});
        }
    }

    void step(SearchState& state) override
    {
        auto& rng = state.rng();
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::normal_distribution<double> noise(0.0, kMutationSd);

        std::vector<Candidate> next;
        next.reserve(pop_.size());
        next.push_back(*std::max_element(pop_.begin(), pop_.end(),
                                         [](const Candidate& a, const Candidate& b) { return a.f < b.f; }));

        while (static_cast<int>(next.size()) < size_) {
            Vector a = pop_[tournament(rng)].x;
            Vector b = aligned(pop_[tournament(rng)].x, a);

            ++state.operators.crossover_trials;
            if (unif(rng) < kCrossoverRate && state.dim() > 1) {
                ++state.operators.crossovers;
                crossover(a, b, rng);
            }
            for (Vector* child : {&a, &b}) {
                if (static_cast<int>(next.size()) >= size_) break;
                ++state.operators.mutation_trials;
                if (unif(rng) < kMutationRate) {
                    ++state.operators.mutations;
                    for (Eigen::Index i = 0; i < child->size(); ++i) (*child)[i] += noise(rng);
                }
                renormalize(*child, rng);
                const double f = state.evaluate(*child);
                next.push_back({std::move(*child), f});
            }
        }
        pop_ = std::move(next);
    }

    [[nodiscard]] int population() const override { return size_; }

private:
    static constexpr int kTournamentSize = 3;
    static constexpr double kCrossoverRate = 0.65;
    static constexpr double kMutationRate = 0.05;
    static constexpr double kMutationSd = 0.1;

    std::size_t tournament(detail::Rng& rng) const
    {
        std::uniform_int_distribution<std::size_t> pick(0, pop_.size() - 1);
        std::size_t best = pick(rng);
        for (int i = 1; i < kTournamentSize; ++i) {
            const std::size_t c = pick(rng);
            if (pop_[c].f > pop_[best].f) best = c;
        }
        return best;
    }

    // Swaps the coordinate block [lo, hi) between the parents; cut points are
    // two distinct positions in 0..dim.
    static void crossover(Vector& a, Vector& b, detail::Rng& rng)
    {
        const auto dim = static_cast<int>(a.size());
        std::uniform_int_distribution<int> cut(0, dim);
        int lo = cut(rng);
        int hi = cut(rng);
        while (hi == lo) hi = cut(rng);
        if (lo > hi) std::swap(lo, hi);
        a.segment(lo, hi - lo).swap(b.segment(lo, hi - lo));
    }

    int size_;
    std::vector<Candidate> pop_;
};

// Constriction PSO on the sphere. Each particle is informed by the best personal
// best among the 3 swarm members whose positions have the largest |cosine| with it.
class ParticleSwarm final : public Swarm {
public:
    explicit ParticleSwarm(int size) : size_(size) {}

    void initialize(SearchState& state) override
    {
        particles_.clear();
        for (int i = 0; i < size_; ++i) {
            Particle p;
            p.x = random_unit(state.dim(), state.rng());
            p.v = 0.5 * (random_unit(state.dim(), state.rng()) - p.x);
            p.fx = state.evaluate(p.x);
            p.best = p.x;
            p.fbest = p.fx;
            particles_.push_back(std::move(p));
        }
    }

    void step(SearchState& state) override
    {
        auto& rng = state.rng();
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const auto n = particles_.size();
        const int dim = state.dim();

        Matrix positions(dim, static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) positions.col(static_cast<Eigen::Index>(i)) = particles_[i].x;
        const Matrix cosines = (positions.transpose() * positions).cwiseAbs();

        std::vector<std::size_t> informer(n);
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::iota(order.begin(), order.end(), 0);
            const std::size_t m = std::min<std::size_t>(kNeighbours, n);
            std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m), order.end(),
                              [&](std::size_t a, std::size_t b) {
                                  const double ca = cosines(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a));
                                  const double cb = cosines(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b));
                                  return ca != cb ? ca > cb : a < b;
                              });
            std::size_t best = order[0];
            for (std::size_t k = 1; k < m; ++k) {
                if (particles_[order[k]].fbest > particles_[best].fbest) best = order[k];
            }
            informer[i] = best;
        }

        for (std::size_t i = 0; i < n; ++i) {
            auto& p = particles_[i];
            const Vector own = aligned(p.best, p.x);
            const Vector social = aligned(particles_[informer[i]].best, p.x);
            for (int d = 0; d < dim; ++d) {
                p.v[d] = kInertia * p.v[d] + kCognitive * unif(rng) * (own[d] - p.x[d]) +
                         kSocial * unif(rng) * (social[d] - p.x[d]);
            }
            const double speed = p.v.norm();
            if (speed > kMaxSpeed) p.v *= kMaxSpeed / speed;
            p.x += p.v;
            renormalize(p.x, rng);
            p.fx = state.evaluate(p.x);
            if (p.fx > p.fbest) {
                p.fbest = p.fx;
                p.best = p.x;
            }
        }
    }

    [[nodiscard]] int population() const override { return size_; }

private:
    static constexpr double kInertia = 0.7298;
    static constexpr double kCognitive = 1.4962;
    static constexpr double kSocial = 1.4962;
    static constexpr double kMaxSpeed = 1.0;
    static constexpr std::size_t kNeighbours = 3;

    struct Particle {
        Vector x, v, best;
        double fx = 0, fbest = 0;
    };

    int size_;
    std::vector<Particle> particles_;
};

} // namespace

std::unique_ptr<Swarm> make_genetic(int individuals) { return std::make_unique<Genetic>(individuals); }
std::unique_ptr<Swarm> make_pso(int particles) { return std::make_unique<ParticleSwarm>(particles); }

} // namespace detail

OptimizeTrace optimize_traced(const Objective& objective, int dim, const OptimizerParams& params,
                              const StoppingRule& stop)
{
    if (dim < 1) throw ArgumentError("search dimension must be at least 1");
    stop.validate();

    std::unique_ptr<detail::Swarm> swarm;
    switch (params.algorithm) {
    case Algorithm::GA:
        if (params.individuals < 2) throw ArgumentError("GA needs at least 2 individuals");
        swarm = detail::make_genetic(params.individuals);
        break;
    case Algorithm::PSO:
        if (params.particles < 1) throw ArgumentError("PSO needs at least 1 particle");
        swarm = detail::make_pso(params.particles);
        break;
    case Algorithm::Tribe:
        swarm = detail::make_tribes();
        break;
    }

    detail::SearchState state(objective, dim, params.seed);
    OptimizeTrace trace;
    swarm->initialize(state);
    trace.best_fitness.push_back(state.best_fitness());

    int iteration = 0;
    bool converged = false;
    while (iteration < stop.maxiter) {
        swarm->step(state);
        ++iteration;
        trace.best_fitness.push_back(state.best_fitness());
        if (iteration >= stop.step_iter) {
            const double now = trace.best_fitness[static_cast<std::size_t>(iteration)];
            const double then = trace.best_fitness[static_cast<std::size_t>(iteration - stop.step_iter)];
            if (std::abs(now - then) / std::max(std::abs(then), 1e-12) < stop.eps) {
                converged = true;
                break;
            }
        }
    }
    if (!converged) {
        trace.warnings.push_back("maximum number of iterations (" + std::to_string(stop.maxiter) +
                                 ") reached without convergence");
    }

    Vector direction = state.best();
    direction.normalize();
    canonicalize_sign(direction);

    trace.record.direction = std::move(direction);
    trace.record.index_value = objective(trace.record.direction);
    trace.record.iterations = iteration;
    trace.record.converged = converged;
    trace.operators = state.operators;
    trace.final_population = swarm->population();
    return trace;
}

Objective index_objective(const Matrix& z, IndexKind kind, const IndexConfig& cfg)
{
    return [&z, kind, cfg](const Vector& u) { return evaluate_direction(kind, z, u, cfg).fitness; };
}

EppRun run_many(const Matrix& z, const Preprocessor& pp, IndexKind kind, const IndexConfig& cfg,
                const OptimizerParams& params, const StoppingRule& stop, const RunManyOptions& options)
{
    if (options.n_simu < 1) throw ArgumentError("n_simu must be positive");
    if (z.cols() < 1) throw ArgumentError("data has no columns to project");
    stop.validate();

    const auto n_simu = static_cast<std::size_t>(options.n_simu);
    std::vector<OptimizeTrace> traces(n_simu);
    const Objective objective = index_objective(z, kind, cfg);

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::size_t first_error_run = n_simu;

    auto worker = [&] {
        for (;;) {
            const std::size_t run = next.fetch_add(1);
            if (run >= n_simu) return;
            try {
                OptimizerParams local = params;
                local.seed = derive_seed(params.seed, run);
                traces[run] = optimize_traced(objective, static_cast<int>(z.cols()), local, stop);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (run < first_error_run) {
                    first_error_run = run;
                    first_error = std::current_exception();
                }
            }
        }
    };

    const int workers = std::clamp(options.workers, 1, options.n_simu);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    }

    if (first_error) {
        try {
            std::rethrow_exception(first_error);
        } catch (const std::exception& e) {
            throw ComputeError("run " + std::to_string(first_error_run + 1) + " failed: " + e.what());
        }
    }

    EppRun out;
    out.preprocessor = pp;
    out.index = kind;
    out.algorithm = params.algorithm;
    out.n_simu = options.n_simu;
    out.stopping = stop;
    out.seed = params.seed;
    out.z = z;
    out.data_fingerprint = fingerprint(z);
    for (Eigen::Index i = 0; i < z.rows(); ++i) out.row_labels.push_back("obs" + std::to_string(i + 1));
    out.records.reserve(n_simu);
    for (std::size_t run = 0; run < n_simu; ++run) {
        RunRecord rec = traces[run].record;
        rec.index_value = evaluate_direction(kind, z, rec.direction, cfg).value;
        rec.run_index = static_cast<int>(run);
        out.records.push_back(std::move(rec));
    }

    const bool maximize = orientation(kind) == Orientation::Maximize;
    std::sort(out.records.begin(), out.records.end(), [maximize](const RunRecord& a, const RunRecord& b) {
        if (a.index_value != b.index_value) return maximize ? a.index_value > b.index_value : a.index_value < b.index_value;
        return a.run_index < b.run_index;
    });
    for (const auto& rec : out.records) {
        if (!rec.converged) {
            out.warnings.push_back("run " + std::to_string(rec.run_index + 1) + " did not converge within " +
                                   std::to_string(stop.maxiter) + " iterations");
        }
    }
    return out;
}

EppRun run_many(const DataMatrix& data, bool sphere, IndexKind kind, const OptimizerParams& params,
                const StoppingRule& stop, const RunManyOptions& options)
{
    validate(data);
    Fitted fit = prepare(data.values, sphere);
    EppRun run = run_many(fit.z, fit.preprocessor, kind, IndexConfig{}, params, stop, options);
    run.row_labels = data.row_labels;
    run.data_fingerprint = fingerprint(data.values);
    run.warnings.insert(run.warnings.begin(), fit.preprocessor.warnings.begin(), fit.preprocessor.warnings.end());
    return run;
}

} // namespace epp
