#include "epp/aggregate.hpp"

#include "epp/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace epp {

namespace {

constexpr std::array<std::string_view, 3> kMethodNames{"cumulative", "inverse", "sq.inverse"};

} // namespace

std::string_view to_string(AggMethod method) { return kMethodNames[static_cast<std::size_t>(method)]; }

AggMethod parse_agg_method(std::string_view name)
{
    return static_cast<AggMethod>(match_unique_prefix(name, kMethodNames, "aggregation method"));
}

Matrix average_projector(std::span<const Vector> directions)
{
    if (directions.empty()) throw ArgumentError("no directions to aggregate");
    const Eigen::Index p = directions.front().size();
    Matrix sum = Matrix::Zero(p, p);
    for (std::size_t i = 0; i < directions.size(); ++i) {
        const Vector& u = directions[i];
        if (u.size() != p) {
            throw ArgumentError("direction " + std::to_string(i + 1) + " has dimension " + std::to_string(u.size()) +
                                ", expected " + std::to_string(p));
        }
        if (std::abs(u.norm() - 1.0) > 1e-8) throw ArgumentError("direction " + std::to_string(i + 1) + " is not unit length");
        sum.selfadjointView<Eigen::Lower>().rankUpdate(u);
    }
    Matrix avg = sum.selfadjointView<Eigen::Lower>();
    return avg / static_cast<double>(directions.size());
}

Vector symmetric_spectrum(const Matrix& m)
{
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw ComputeError("eigen-decomposition failed");
    Vector ev = es.eigenvalues().reverse();
    return ev.cwiseMax(0.0);
}

int select_k(std::span<const double> eigenvalues, AggMethod method, double percentage)
{
    if (eigenvalues.empty()) throw ArgumentError("empty eigenvalue spectrum");
    if (!(percentage > 0.0 && percentage <= 1.0)) throw ArgumentError("percentage must lie in (0, 1]");
    for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
        if (!std::isfinite(eigenvalues[i]) || eigenvalues[i] < -1e-12) throw ArgumentError("eigenvalues must be non-negative");
        if (i > 0 && eigenvalues[i] > eigenvalues[i - 1] + 1e-12) throw ArgumentError("eigenvalues must be sorted descending");
    }

    int r = 0;
    double sum = 0, sum_sq = 0;
    for (double l : eigenvalues) {
        if (l > kSpectrumZero) ++r;
        sum += std::max(l, 0.0);
        sum_sq += l * l;
    }
    if (r == 0) throw ArgumentError("eigenvalue spectrum is zero");

    int k = 0;
    switch (method) {
    case AggMethod::Cumulative: {
        double acc = 0;
        for (double l : eigenvalues) {
            acc += std::max(l, 0.0);
            ++k;
            if (acc / sum >= percentage - 1e-12) break;
        }
        break;
    }
    case AggMethod::Inverse: {
        const double cut = sum / r;
        for (double l : eigenvalues) k += l > cut ? 1 : 0;
        break;
    }
    case AggMethod::SqInverse: {
        const double cut = sum_sq / r;
        for (double l : eigenvalues) k += l * l > cut ? 1 : 0;
        break;
    }
    }
    return std::clamp(k, 1, r);
}

AggResult aggregate_directions(std::span<const Vector> directions, AggMethod method, double percentage)
{
    const Matrix avg = average_projector(directions);
    Eigen::SelfAdjointEigenSolver<Matrix> es(avg);
    if (es.info() != Eigen::Success) throw ComputeError("eigen-decomposition of the average projector failed");

    const Eigen::Index p = avg.rows();
    Vector values = es.eigenvalues().cwiseMax(0.0);
    Matrix vectors = es.eigenvectors();
    for (Eigen::Index i = 0; i < p; ++i) canonicalize_sign(vectors.col(i));

    // Descending eigenvalue; exact ties broken by the first differing eigenvector coordinate.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (values[a] != values[b]) return values[a] > values[b];
        for (Eigen::Index i = 0; i < p; ++i) {
            if (vectors(i, a) != vectors(i, b)) return vectors(i, a) > vectors(i, b);
        }
        return a < b;
    });

    AggResult out;
    out.eigenvalues.resize(p);
    for (Eigen::Index i = 0; i < p; ++i) out.eigenvalues[i] = std::min(values[order[static_cast<std::size_t>(i)]], 1.0);
    out.k = select_k(out.eigenvalues, method, percentage);
    out.O.resize(p, out.k);
    for (int j = 0; j < out.k; ++j) out.O.col(j) = vectors.col(order[static_cast<std::size_t>(j)]);
    out.P = out.O * out.O.transpose();
    return out;
}

std::vector<Vector> original_directions(const EppRun& run)
{
    std::vector<Vector> out;
    out.reserve(run.records.size());
    for (const auto& rec : run.records) out.push_back(to_original_coords(run.preprocessor, rec.direction));
    return out;
}

AggResult aggregate_runs(std::span<const EppRun> runs, AggMethod method, double percentage)
{
    if (runs.empty()) throw ArgumentError("no runs to aggregate");
    std::vector<Vector> all;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (i > 0 && runs[i].preprocessor.input_dim() != runs[0].preprocessor.input_dim()) {
            throw ArgumentError("run " + std::to_string(i + 1) + " was fitted on " +
                                std::to_string(runs[i].preprocessor.input_dim()) + " variables, run 1 on " +
                                std::to_string(runs[0].preprocessor.input_dim()));
        }
        auto dirs = original_directions(runs[i]);
        all.insert(all.end(), std::make_move_iterator(dirs.begin()), std::make_move_iterator(dirs.end()));
    }
    return aggregate_directions(all, method, percentage);
}

} // namespace epp
