#include "epp/results.hpp"

#include "epp/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace epp {

using Json = nlohmann::ordered_json;

Selection default_selection(const EppRun& run)
{
    Selection which(static_cast<std::size_t>(std::min(10, run.size())));
    for (std::size_t i = 0; i < which.size(); ++i) which[i] = static_cast<int>(i);
    return which;
}

Selection parse_selection(std::string_view text)
{
    Selection out;
    auto parse_int = [&](std::string_view s) {
        while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
        while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
        int v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || v < 1)
            throw ArgumentError("invalid direction number '" + std::string(s) + "' in selection '" + std::string(text) + "'");
        return v;
    };
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string_view item = text.substr(pos, comma - pos);
        const std::size_t colon = item.find(':');
        if (colon == std::string_view::npos) {
            out.push_back(parse_int(item) - 1);
        } else {
            const int lo = parse_int(item.substr(0, colon));
            const int hi = parse_int(item.substr(colon + 1));
            if (hi < lo) throw ArgumentError("descending range '" + std::string(item) + "' in selection");
            for (int v = lo; v <= hi; ++v) out.push_back(v - 1);
        }
        pos = comma + 1;
    }
    return out;
}

void check_selection(const EppRun& run, const Selection& which)
{
    if (which.empty()) throw ArgumentError("empty direction selection");
    for (int w : which) {
        if (w < 0 || w >= run.size()) {
            throw ArgumentError("direction " + std::to_string(w + 1) + " out of range 1.." + std::to_string(run.size()));
        }
    }
}

std::vector<std::string> bind_data(EppRun& run, const DataMatrix& data)
{
    std::vector<std::string> warnings;
    const std::uint64_t fp = fingerprint(data.values);
    if (fp != run.data_fingerprint) {
        warnings.push_back("data fingerprint " + to_hex64(fp) + " does not match the run's " +
                           to_hex64(run.data_fingerprint) + "; scores may not correspond to the fitted data");
    }
    run.z = transform(run.preprocessor, data.values);
    run.row_labels = data.row_labels;
    return warnings;
}

namespace {

Matrix directions_of(const EppRun& run, const Selection& which)
{
    check_selection(run, which);
    Matrix u(run.preprocessor.output_dim(), static_cast<Eigen::Index>(which.size()));
    for (std::size_t j = 0; j < which.size(); ++j) {
        u.col(static_cast<Eigen::Index>(j)) = run.records[static_cast<std::size_t>(which[j])].direction;
    }
    return u;
}

} // namespace

Matrix fitted(const EppRun& run, const Selection& which)
{
    if (!run.has_data()) throw ArgumentError("run has no training data attached");
    return run.z * directions_of(run, which);
}

Matrix predict(const EppRun& run, const Matrix& newdata, const Selection& which)
{
    return transform(run.preprocessor, newdata) * directions_of(run, which);
}

Matrix coef(const EppRun& run, const Selection& which)
{
    check_selection(run, which);
    Matrix a(run.preprocessor.input_dim(), static_cast<Eigen::Index>(which.size()));
    for (std::size_t j = 0; j < which.size(); ++j) {
        a.col(static_cast<Eigen::Index>(j)) =
            to_original_coords(run.preprocessor, run.records[static_cast<std::size_t>(which[j])].direction);
    }
    return a;
}

std::vector<double> angles_to_best(const EppRun& run, const Selection& which)
{
    check_selection(run, which);
    const Vector& best = run.records.front().direction;
    std::vector<double> out;
    out.reserve(which.size());
    for (int w : which) {
        const double c = std::min(1.0, std::abs(best.dot(run.records[static_cast<std::size_t>(w)].direction)));
        out.push_back(std::acos(c) * 180.0 / std::numbers::pi);
    }
    return out;
}

std::vector<ScreePoint> scree(const EppRun& run, const Selection& which)
{
    check_selection(run, which);
    std::vector<ScreePoint> out;
    out.reserve(which.size());
    for (int w : which) out.push_back({w + 1, run.records[static_cast<std::size_t>(w)].index_value});
    return out;
}

double quantile_linear(std::vector<double> values, double prob)
{
    if (values.empty()) throw ArgumentError("quantile of empty sample");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<DensityPoint> density_report(std::span<const double> scores, int grid_size)
{
    const auto n = static_cast<Eigen::Index>(scores.size());
    if (n < 2) throw ArgumentError("density needs at least 2 scores");
    if (grid_size < 2) throw ArgumentError("density grid needs at least 2 points");
    Eigen::Map<const Vector> s(scores.data(), n);
    const double mean = s.mean();
    const double sd = std::sqrt((s.array() - mean).square().sum() / static_cast<double>(n - 1));
    if (!(sd > 1e-12)) throw ComputeError("degenerate projection: scores have no spread");

    std::vector<double> sorted(scores.begin(), scores.end());
    const double iqr = quantile_linear(sorted, 0.75) - quantile_linear(sorted, 0.25);
    const double spread = iqr > 0 ? std::min(sd, iqr / 1.34) : sd;
    const double bw = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);

    const auto [lo_it, hi_it] = std::minmax_element(scores.begin(), scores.end());
    const double lo = *lo_it - 4.0 * bw;
    const double hi = *hi_it + 4.0 * bw;
    const double step = (hi - lo) / (grid_size - 1);
    const double norm = 1.0 / (static_cast<double>(n) * bw * std::sqrt(2.0 * std::numbers::pi));

    std::vector<DensityPoint> out;
    out.reserve(static_cast<std::size_t>(grid_size));
    for (int g = 0; g < grid_size; ++g) {
        const double x = lo + step * g;
        double acc = 0;
        for (double v : scores) {
            const double t = (x - v) / bw;
            acc += std::exp(-0.5 * t * t);
        }
        out.push_back({x, acc * norm});
    }
    return out;
}

Histogram histogram_report(std::span<const double> scores, int bins)
{
    if (scores.size() < 2) throw ArgumentError("histogram needs at least 2 scores");
    if (bins <= 0) bins = static_cast<int>(std::ceil(std::log2(static_cast<double>(scores.size())))) + 1;
    const auto [lo_it, hi_it] = std::minmax_element(scores.begin(), scores.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (!(hi - lo > 1e-12)) throw ComputeError("degenerate projection: scores have no spread");

    Histogram h;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    const double width = (hi - lo) / bins;
    for (int b = 0; b <= bins; ++b) h.edges.push_back(b == bins ? hi : lo + width * b);
    for (double v : scores) {
        auto b = static_cast<int>((v - lo) / width);
        h.counts[static_cast<std::size_t>(std::clamp(b, 0, bins - 1))]++;
    }
    return h;
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

Json to_json(const Vector& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector vector_from(const Json& j, const char* what)
{
    if (!j.is_array()) throw FormatError(std::string("field '") + what + "' must be an array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

const Json& field(const Json& j, const char* name)
{
    auto it = j.find(name);
    if (it == j.end()) throw FormatError(std::string("missing field '") + name + "'");
    return *it;
}

} // namespace

std::string serialize_run(const EppRun& run)
{
    const auto& pp = run.preprocessor;
    const Eigen::Index r = pp.output_dim();

    Json doc;
    doc["format_version"] = kRunFormatVersion;
    doc["index"] = std::string(to_string(run.index));
    doc["algorithm"] = std::string(to_string(run.algorithm));
    doc["sphered"] = pp.sphered;
    doc["n_simu"] = run.n_simu;
    doc["stopping"] = {{"maxiter", run.stopping.maxiter}, {"step_iter", run.stopping.step_iter}, {"eps", run.stopping.eps}};
    doc["seed"] = run.seed;

    Json jp;
    jp["center"] = to_json(pp.center);
    jp["scale"] = to_json(pp.scale);
    if (pp.sphered) {
        jp["whitener"] = {{"rows", pp.whitener.rows()},
                          {"cols", pp.whitener.cols()},
                          {"data", std::vector<double>(pp.whitener.data(), pp.whitener.data() + pp.whitener.size())}};
    } else {
        jp["whitener"] = nullptr;
    }
    jp["rank"] = pp.rank;
    doc["preprocessor"] = std::move(jp);

    std::vector<double> dirs;
    std::vector<double> values;
    std::vector<int> iterations;
    std::vector<bool> converged;
    std::vector<int> runs;
    dirs.reserve(static_cast<std::size_t>(r) * run.records.size());
    for (const auto& rec : run.records) {
        dirs.insert(dirs.end(), rec.direction.data(), rec.direction.data() + rec.direction.size());
        values.push_back(rec.index_value);
        iterations.push_back(rec.iterations);
        converged.push_back(rec.converged);
        runs.push_back(rec.run_index + 1);
    }
    doc["directions"] = {{"rows", r}, {"cols", run.records.size()}, {"data", dirs}};
    doc["values"] = values;
    doc["iterations"] = iterations;
    doc["converged"] = converged;
    doc["runs"] = runs;
    doc["row_labels"] = run.row_labels;
    doc["data_fingerprint"] = to_hex64(run.data_fingerprint);
    return doc.dump(1) + "\n";
}

EppRun deserialize_run(std::string_view text)
{
    Json doc;
    try {
        doc = Json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("run file is not valid JSON: ") + e.what());
    }
    try {
        const int version = field(doc, "format_version").get<int>();
        if (version != kRunFormatVersion) {
            throw FormatError("unsupported run file version " + std::to_string(version) + " (expected " +
                              std::to_string(kRunFormatVersion) + ")");
        }
        EppRun run;
        run.index = parse_index_kind(field(doc, "index").get<std::string>());
        run.algorithm = parse_algorithm(field(doc, "algorithm").get<std::string>());
        run.n_simu = field(doc, "n_simu").get<int>();
        const auto& stop = field(doc, "stopping");
        run.stopping = {field(stop, "maxiter").get<int>(), field(stop, "step_iter").get<int>(),
                        field(stop, "eps").get<double>()};
        run.seed = field(doc, "seed").get<std::uint64_t>();

        auto& pp = run.preprocessor;
        const auto& jp = field(doc, "preprocessor");
        pp.center = vector_from(field(jp, "center"), "center");
        pp.scale = vector_from(field(jp, "scale"), "scale");
        pp.rank = field(jp, "rank").get<int>();
        pp.sphered = field(doc, "sphered").get<bool>();
        if (pp.center.size() != pp.scale.size() || pp.center.size() == 0)
            throw FormatError("center and scale lengths differ");
        const auto& jw = field(jp, "whitener");
        if (pp.sphered) {
            const auto rows = field(jw, "rows").get<Eigen::Index>();
            const auto cols = field(jw, "cols").get<Eigen::Index>();
            const Vector data = vector_from(field(jw, "data"), "whitener.data");
            if (rows != pp.center.size() || cols != pp.rank || data.size() != rows * cols)
                throw FormatError("whitener shape is inconsistent with the preprocessor");
            pp.whitener = Eigen::Map<const Matrix>(data.data(), rows, cols);
        } else if (!jw.is_null() || pp.rank != pp.center.size()) {
            throw FormatError("unsphered preprocessor must have a null whitener and full rank");
        }

        const auto& jd = field(doc, "directions");
        const auto r = field(jd, "rows").get<Eigen::Index>();
        const auto m = field(jd, "cols").get<Eigen::Index>();
        const Vector dirs = vector_from(field(jd, "data"), "directions.data");
        const Vector values = vector_from(field(doc, "values"), "values");
        const auto iterations = field(doc, "iterations").get<std::vector<int>>();
        const auto converged = field(doc, "converged").get<std::vector<bool>>();
        const auto runs = field(doc, "runs").get<std::vector<int>>();
        if (r != pp.rank || dirs.size() != r * m || values.size() != m || static_cast<Eigen::Index>(iterations.size()) != m ||
            static_cast<Eigen::Index>(converged.size()) != m || static_cast<Eigen::Index>(runs.size()) != m)
            throw FormatError("direction table is inconsistent with its metadata");
        for (Eigen::Index j = 0; j < m; ++j) {
            RunRecord rec;
            rec.direction = dirs.segment(j * r, r);
            rec.index_value = values[j];
            rec.iterations = iterations[static_cast<std::size_t>(j)];
            rec.converged = converged[static_cast<std::size_t>(j)];
            rec.run_index = runs[static_cast<std::size_t>(j)] - 1;
            if (!rec.converged) {
                run.warnings.push_back("run " + std::to_string(rec.run_index + 1) + " did not converge within " +
                                       std::to_string(run.stopping.maxiter) + " iterations");
            }
            run.records.push_back(std::move(rec));
        }
        run.row_labels = field(doc, "row_labels").get<std::vector<std::string>>();
        run.data_fingerprint = from_hex64(field(doc, "data_fingerprint").get<std::string>());
        return run;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed run file: ") + e.what());
    } catch (const ArgumentError& e) {
        throw FormatError(std::string("malformed run file: ") + e.what());
    }
}

void save_run(const EppRun& run, const std::filesystem::path& path) { write_text_atomic(path, serialize_run(run)); }

EppRun load_run(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open run file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return deserialize_run(buf.str());
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

} // namespace epp
