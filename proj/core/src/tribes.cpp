#include "search.hpp"

#include <algorithm>
#include <cmath>

namespace epp::detail {

namespace {

// Parameter-free adaptive swarm. The population starts as one tribe holding one
// particle; every NL/2 iterations (NL = number of information links) tribes
// where most members failed to improve spawn a particle into a new tribe, and
// tribes where most improved drop their worst member.
class Tribes final : public Swarm {
public:
    void initialize(SearchState& state) override
    {
        tribes_.clear();
        Tribe first;
        first.members.push_back(spawn(state));
        tribes_.push_back(std::move(first));
        since_adapt_ = 0;
    }

    void step(SearchState& state) override
    {
        const int dim = state.dim();
        auto& rng = state.rng();
        std::normal_distribution<double> normal;

        // Informer bests are fixed at the start of the iteration.
        std::vector<std::vector<Vector>> guides(tribes_.size());
        std::vector<const Particle*> shamans;
        for (const auto& t : tribes_) shamans.push_back(&t.members[t.shaman()]);
        for (std::size_t ti = 0; ti < tribes_.size(); ++ti) {
            const auto& t = tribes_[ti];
            const std::size_t shaman = t.shaman();
            for (std::size_t pi = 0; pi < t.members.size(); ++pi) {
                const Particle* g = &t.members[shaman];
                if (pi == shaman) {
                    for (const Particle* s : shamans) {
                        if (s->fbest > g->fbest) g = s;
                    }
                }
                guides[ti].push_back(g->best);
            }
        }

        for (std::size_t ti = 0; ti < tribes_.size(); ++ti) {
            auto& t = tribes_[ti];
            t.improved = 0;
            for (std::size_t pi = 0; pi < t.members.size(); ++pi) {
                auto& p = t.members[pi];
                const Vector g = aligned(guides[ti][pi], p.best);
                double radius = (g - p.best).norm();
                if (radius < kMinRadius) radius = self_radius(p);
                const double sd = radius / std::sqrt(static_cast<double>(dim));

                Vector x(dim);
                if (p.improved_last && p.improved_before) {
                    // Gaussian pivot: blend of samples around the particle's best and its guide.
                    for (int d = 0; d < dim; ++d) {
                        x[d] = 0.5 * (p.best[d] + sd * normal(rng)) + 0.5 * (g[d] + sd * normal(rng));
                    }
                } else {
                    for (int d = 0; d < dim; ++d) x[d] = p.best[d] + sd * normal(rng);
                }
                renormalize(x, rng);
                p.x = std::move(x);
                p.fx = state.evaluate(p.x);

                const bool improved = p.fx > p.fbest;
                if (improved) {
                    p.fbest = p.fx;
                    p.best = p.x;
                    ++t.improved;
                }
                p.improved_before = p.improved_last;
                p.improved_last = improved;
            }
        }

        if (++since_adapt_ >= std::max(1, links() / 2)) {
            adapt(state);
            since_adapt_ = 0;
        }
    }

    [[nodiscard]] int population() const override
    {
        int total = 0;
        for (const auto& t : tribes_) total += static_cast<int>(t.members.size());
        return total;
    }

private:
    static constexpr int kMaxParticles = 40;
    static constexpr double kMinRadius = 1e-9;
    static constexpr double kLoneRadius = 0.5;

    struct Particle {
        Vector x, best;
        double fx = 0, fbest = 0;
        bool improved_last = false;
        bool improved_before = false;
    };

    struct Tribe {
        std::vector<Particle> members;
        int improved = 0;

        [[nodiscard]] std::size_t shaman() const
        {
            std::size_t best = 0;
            for (std::size_t i = 1; i < members.size(); ++i) {
                if (members[i].fbest > members[best].fbest) best = i;
            }
            return best;
        }
        [[nodiscard]] bool bad() const
        {
            const int failed = static_cast<int>(members.size()) - improved;
            return 2 * failed > static_cast<int>(members.size());
        }
    };

    static Particle spawn(SearchState& state)
    {
        Particle p;
        p.x = random_unit(state.dim(), state.rng());
        p.fx = state.evaluate(p.x);
        p.best = p.x;
        p.fbest = p.fx;
        return p;
    }

    // Step size for a particle that is its own best informer: distance to the
    // nearest other personal best, or a fixed radius when it is alone.
    [[nodiscard]] double self_radius(const Particle& p) const
    {
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& t : tribes_) {
            for (const auto& q : t.members) {
                if (&q == &p) continue;
                const double d = (aligned(q.best, p.best) - p.best).norm();
                if (d > kMinRadius) nearest = std::min(nearest, d);
            }
        }
        return std::isfinite(nearest) ? nearest : kLoneRadius;
    }

    // Fully connected tribes plus links between every pair of shamans.
    [[nodiscard]] int links() const
    {
        int nl = 0;
        for (const auto& t : tribes_) nl += static_cast<int>(t.members.size() * t.members.size());
        const int tribes = static_cast<int>(tribes_.size());
        return nl + tribes * (tribes - 1);
    }

    void adapt(SearchState& state)
    {
        int total = population();
        Tribe fresh;
        for (auto& t : tribes_) {
            if (t.bad()) {
                if (total < kMaxParticles) {
                    fresh.members.push_back(spawn(state));
                    ++total;
                }
            } else if (t.members.size() > 1) {
                std::size_t worst = 0;
                for (std::size_t i = 1; i < t.members.size(); ++i) {
                    if (t.members[i].fbest < t.members[worst].fbest) worst = i;
                }
                t.members.erase(t.members.begin() + static_cast<std::ptrdiff_t>(worst));
                --total;
            }
        }
        if (!fresh.members.empty()) tribes_.push_back(std::move(fresh));
    }

    std::vector<Tribe> tribes_;
    int since_adapt_ = 0;
};

} // namespace

std::unique_ptr<Swarm> make_tribes() { return std::make_unique<Tribes>(); }

} // namespace epp::detail
