#include "cli.hpp"

#include "epp/aggregate.hpp"
#include "epp/data.hpp"
#include "epp/error.hpp"
#include "epp/optimizers.hpp"
#include "epp/outliers.hpp"
#include "epp/results.hpp"
#include "epp/simbench.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace epp::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

struct Common {
    std::string data;
    std::string labels;
    std::uint64_t seed = 0;
    std::string out;
};

struct RunArgs {
    std::vector<std::string> indices{"KurtosisMax"};
    std::string alg = "Tribe";
    int n_simu = 100;
    int maxiter = 100;
    int step_iter = 10;
    double eps = 1e-6;
    bool sphere = false;
    int particles = 50;
    int individuals = 50;
    int workers = 1;
};

struct ReportArgs {
    std::string run;
    std::string which;
    std::string type = "density";
};

struct AggregateArgs {
    std::vector<std::string> runs;
    std::string method = "cumulative";
    double percentage = 0.85;
};

struct OutlierArgs {
    std::string run;
    double k = 0;
    std::string location = "mean";
    std::string scale = "sd";
    bool marginal = false;
};

struct PredictArgs {
    std::string run;
    std::string which;
};

struct SimArgs {
    std::string setting = "both";
    int reps = 50;
    int n_simu = 20;
    int maxiter = 200;
    std::vector<std::string> indices{"FriedmanTukey", "Friedman", "KurtosisMax", "KurtosisMin", "Discriminant"};
    std::vector<std::string> methods{"inverse", "cumulative"};
    double percentage = 0.85;
    int workers = 1;
};

void add_common(CLI::App* cmd, Common& c, bool data_required)
{
    auto* data = cmd->add_option("--data", c.data, "Input CSV file");
    if (data_required) data->required();
    cmd->add_option("--labels", c.labels, "Name of the CSV column holding row labels");
    cmd->add_option("--seed", c.seed, "Master random seed")->capture_default_str();
    cmd->add_option("--out", c.out, "Output path (standard output when omitted, where allowed)");
}

DataMatrix read_data(const Common& c)
{
    CsvOptions opts;
    if (!c.labels.empty()) opts.label_column = c.labels;
    return load_csv(c.data, opts);
}

std::string fmt(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string matrix_csv(const Matrix& m, const std::vector<std::string>& row_labels, const std::string& row_header,
                       const std::vector<std::string>& col_names)
{
    std::ostringstream os;
    os << csv_escape(row_header);
    for (const auto& c : col_names) os << ',' << csv_escape(c);
    os << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        os << csv_escape(row_labels[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < m.cols(); ++j) os << ',' << fmt(m(i, j));
        os << '\n';
    }
    return os.str();
}

void emit(const std::string& text, const std::string& path, std::ostream& out)
{
    if (path.empty() || path == "-") {
        out << text;
    } else {
        write_text_atomic(path, text);
    }
}

std::vector<std::string> direction_names(const Selection& which)
{
    std::vector<std::string> names;
    for (int w : which) names.push_back("D" + std::to_string(w + 1));
    return names;
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err)
{
    for (const auto& w : warnings) err << "warning: " << w << '\n';
}

std::string run_summary(const EppRun& run)
{
    std::ostringstream os;
    os << "Index name       : " << to_string(run.index) << '\n' << "Index values     :";
    const auto which = default_selection(run);
    for (int w : which) os << ' ' << std::setprecision(6) << run.records[static_cast<std::size_t>(w)].index_value;
    os << "\nAlgorithm used   : " << to_string(run.algorithm) << '\n'
       << "Sphered          : " << (run.preprocessor.sphered ? "TRUE" : "FALSE") << '\n'
       << "Iterations       :";
    for (int w : which) os << ' ' << run.records[static_cast<std::size_t>(w)].iterations;
    os << '\n';
    return os.str();
}

// A path may name a run file or a manifest listing run files.
std::vector<fs::path> expand_run_paths(const std::vector<std::string>& paths)
{
    std::vector<fs::path> out;
    for (const auto& p : paths) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw FormatError("cannot open '" + p + "'");
        Json doc;
        try {
            doc = Json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(p + ": not valid JSON: " + e.what());
        }
        if (doc.contains("runs") && doc.contains("manifest_version")) {
            for (const auto& r : doc["runs"]) out.push_back(fs::path(p).parent_path() / r.at("file").get<std::string>());
        } else {
            out.emplace_back(p);
        }
    }
    return out;
}

int cmd_run(const Common& c, const RunArgs& a, std::ostream& out, std::ostream& err)
{
    if (c.out.empty()) throw ArgumentError("run requires --out");
    const DataMatrix data = read_data(c);
    OptimizerParams params;
    params.algorithm = parse_algorithm(a.alg);
    params.particles = a.particles;
    params.individuals = a.individuals;
    params.seed = c.seed;
    StoppingRule stop{a.maxiter, a.step_iter, a.eps};

    std::vector<IndexKind> kinds;
    for (const auto& name : a.indices) kinds.push_back(parse_index_kind(name));

    if (kinds.size() == 1) {
        EppRun run = run_many(data, a.sphere, kinds[0], params, stop, {a.n_simu, a.workers});
        save_run(run, c.out);
        print_warnings(run.warnings, err);
        out << run_summary(run);
        return kExitOk;
    }

    const fs::path manifest_path(c.out);
    Json manifest;
    manifest["manifest_version"] = 1;
    manifest["runs"] = Json::array();
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        OptimizerParams local = params;
        local.seed = derive_seed(c.seed, 1000 + static_cast<std::uint64_t>(kinds[i]));
        EppRun run = run_many(data, a.sphere, kinds[i], local, stop, {a.n_simu, a.workers});
        const std::string file = manifest_path.stem().string() + "." + std::string(to_string(kinds[i])) + ".json";
        save_run(run, manifest_path.parent_path() / file);
        manifest["runs"].push_back({{"index", std::string(to_string(kinds[i]))}, {"file", file}});
        print_warnings(run.warnings, err);
        out << run_summary(run) << '\n';
    }
    write_text_atomic(manifest_path, manifest.dump(1) + "\n");
    return kExitOk;
}

int cmd_report(const Common& c, const ReportArgs& a, std::ostream& out, std::ostream& err)
{
    EppRun run = load_run(a.run);
    const bool needs_data = a.type == "density" || a.type == "hist" || a.type == "pairs";
    Selection which;
    if (!a.which.empty()) {
        which = parse_selection(a.which);
    } else if (needs_data) {
        which = default_selection(run);
    } else {
        for (int i = 0; i < run.size(); ++i) which.push_back(i);
    }
    check_selection(run, which);

    std::ostringstream os;
    if (a.type == "scree") {
        os << "run,value\n";
        for (const auto& pt : scree(run, which)) os << pt.run_number << ',' << fmt(pt.value) << '\n';
    } else if (a.type == "angles") {
        os << "direction,angle\n";
        const auto angles = angles_to_best(run, which);
        for (std::size_t j = 0; j < which.size(); ++j) os << which[j] + 1 << ',' << fmt(angles[j]) << '\n';
    } else if (needs_data) {
        if (c.data.empty()) throw ArgumentError("report --type " + a.type + " requires --data");
        print_warnings(bind_data(run, read_data(c)), err);
        const Matrix scores = fitted(run, which);
        if (a.type == "pairs") {
            os << matrix_csv(scores, run.row_labels, "label", direction_names(which));
        } else if (a.type == "density") {
            os << "direction,x,density\n";
            for (std::size_t j = 0; j < which.size(); ++j) {
                const Vector s = scores.col(static_cast<Eigen::Index>(j));
                for (const auto& pt : density_report({s.data(), static_cast<std::size_t>(s.size())}))
                    os << which[j] + 1 << ',' << fmt(pt.x) << ',' << fmt(pt.density) << '\n';
            }
        } else {
            os << "direction,lower,upper,count\n";
            for (std::size_t j = 0; j < which.size(); ++j) {
                const Vector s = scores.col(static_cast<Eigen::Index>(j));
                const Histogram h = histogram_report({s.data(), static_cast<std::size_t>(s.size())});
                for (std::size_t b = 0; b < h.counts.size(); ++b)
                    os << which[j] + 1 << ',' << fmt(h.edges[b]) << ',' << fmt(h.edges[b + 1]) << ',' << h.counts[b] << '\n';
            }
        }
    } else {
        throw ArgumentError("unknown report type '" + a.type + "'");
    }
    emit(os.str(), c.out, out);
    return kExitOk;
}

Json matrix_json(const Matrix& m)
{
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

int cmd_aggregate(const Common& c, const AggregateArgs& a, std::ostream& out, std::ostream&)
{
    if (a.runs.empty()) throw ArgumentError("aggregate requires --runs");
    std::vector<EppRun> runs;
    for (const auto& p : expand_run_paths(a.runs)) runs.push_back(load_run(p));
    const AggMethod method = parse_agg_method(a.method);
    const AggResult agg = aggregate_runs(runs, method, a.percentage);

    if (fs::path(c.out).extension() == ".csv") {
        std::vector<std::string> vars;
        for (Eigen::Index i = 0; i < agg.O.rows(); ++i) vars.push_back("V" + std::to_string(i + 1));
        std::vector<std::string> cols;
        for (int j = 0; j < agg.k; ++j) cols.push_back("O" + std::to_string(j + 1));
        emit(matrix_csv(agg.O, vars, "variable", cols), c.out, out);
        return kExitOk;
    }
    Json doc;
    doc["method"] = std::string(to_string(method));
    doc["percentage"] = a.percentage;
    doc["n_directions"] = [&] {
        std::size_t n = 0;
        for (const auto& r : runs) n += r.records.size();
        return n;
    }();
    doc["k"] = agg.k;
    doc["eigenvalues"] = std::vector<double>(agg.eigenvalues.data(), agg.eigenvalues.data() + agg.eigenvalues.size());
    doc["O"] = matrix_json(agg.O);
    doc["P"] = matrix_json(agg.P);
    emit(doc.dump(1) + "\n", c.out, out);
    return kExitOk;
}

int cmd_outliers(const Common& c, const OutlierArgs& a, std::ostream& out, std::ostream& err)
{
    const DataMatrix data = read_data(c);
    if (a.marginal) {
        const auto rows = tukey_marginal_outliers(data);
        std::ostringstream os;
        os << "label\n";
        for (int r : rows) os << csv_escape(data.row_labels[static_cast<std::size_t>(r)]) << '\n';
        err << "marginal outliers: " << rows.size() << '\n';
        emit(os.str(), c.out, out);
        return kExitOk;
    }
    if (a.run.empty()) throw ArgumentError("outliers requires --run");
    if (!(a.k > 0)) throw ArgumentError("outliers requires --k > 0");

    EppRun run = load_run(a.run);
    print_warnings(bind_data(run, data), err);
    OutlierConfig cfg{a.k, parse_location(a.location), parse_scale(a.scale)};
    const OutlierMatrix om = detect(run, cfg);
    print_warnings(om.warnings, err);
    const OutlierSummary summary = summarize(om);

    if (c.out.empty()) {
        out << format_summary(om, summary);
        return kExitOk;
    }
    Selection all;
    for (int j = 0; j < run.size(); ++j) all.push_back(j);
    write_text_atomic(c.out, matrix_csv(om.flags.cast<double>(), om.row_labels, "label", direction_names(all)));
    out << format_summary(om, summary);
    return kExitOk;
}

int cmd_predict(const Common& c, const PredictArgs& a, std::ostream& out, std::ostream&)
{
    const EppRun run = load_run(a.run);
    const DataMatrix data = read_data(c);
    const Selection which = a.which.empty() ? default_selection(run) : parse_selection(a.which);
    const Matrix scores = predict(run, data.values, which);
    emit(matrix_csv(scores, data.row_labels, "label", direction_names(which)), c.out, out);
    return kExitOk;
}

int cmd_simbench(const Common& c, const SimArgs& a, std::ostream& out, std::ostream&)
{
    sim::BenchConfig cfg;
    if (a.setting == "both") {
        cfg.settings = {sim::Setting::Balanced, sim::Setting::Unbalanced};
    } else {
        cfg.settings = {sim::parse_setting(a.setting)};
    }
    cfg.reps = a.reps;
    cfg.n_simu = a.n_simu;
    cfg.maxiter = a.maxiter;
    cfg.indices.clear();
    for (const auto& i : a.indices) cfg.indices.push_back(parse_index_kind(i));
    cfg.methods.clear();
    for (const auto& m : a.methods) cfg.methods.push_back(parse_agg_method(m));
    cfg.percentage = a.percentage;
    cfg.seed = c.seed;
    cfg.workers = a.workers;
    emit(sim::bench_csv(sim::run_benchmark(cfg)), c.out, out);
    return kExitOk;
}

} // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Exploratory projection pursuit: search, summarize and screen one-dimensional projections", "epp"};
    app.require_subcommand(1);
    app.allow_extras(false);

    Common common;
    RunArgs run_args;
    ReportArgs report_args;
    AggregateArgs agg_args;
    OutlierArgs outlier_args;
    PredictArgs predict_args;
    SimArgs sim_args;

    auto* run_cmd = app.add_subcommand("run", "Search n-simu locally optimal directions for one or more indices");
    add_common(run_cmd, common, true);
    run_cmd->add_option("--index", run_args.indices, "Projection index name(s)")->capture_default_str();
    run_cmd->add_option("--alg", run_args.alg, "Optimizer: GA, PSO or Tribe")->capture_default_str();
    run_cmd->add_option("--n-simu", run_args.n_simu, "Number of restarts")->capture_default_str()->check(CLI::PositiveNumber);
    run_cmd->add_option("--maxiter", run_args.maxiter, "Maximum iterations per run")->capture_default_str()->check(CLI::PositiveNumber);
    run_cmd->add_option("--step-iter", run_args.step_iter, "Convergence look-back window")->capture_default_str()->check(CLI::PositiveNumber);
    run_cmd->add_option("--eps", run_args.eps, "Relative convergence tolerance")->capture_default_str()->check(CLI::PositiveNumber);
    run_cmd->add_option("--sphere", run_args.sphere, "Whiten the data before searching")->capture_default_str();
    run_cmd->add_option("--particles", run_args.particles, "PSO swarm size")->capture_default_str()->check(CLI::PositiveNumber);
    run_cmd->add_option("--individuals", run_args.individuals, "GA population size")->capture_default_str()->check(CLI::PositiveNumber);
    run_cmd->add_option("--workers", run_args.workers, "Parallel restart workers")->capture_default_str()->check(CLI::PositiveNumber);

    auto* report_cmd = app.add_subcommand("report", "Emit plot-ready report tables for a run");
    add_common(report_cmd, common, false);
    report_cmd->add_option("--run", report_args.run, "Run file")->required();
    report_cmd->add_option("--which", report_args.which, "Directions, e.g. 1:10 or 1,70,90");
    report_cmd->add_option("--type", report_args.type, "Report type")
        ->capture_default_str()
        ->check(CLI::IsMember({"scree", "angles", "density", "hist", "pairs"}));

    auto* agg_cmd = app.add_subcommand("aggregate", "Combine directions of runs into an average projector");
    add_common(agg_cmd, common, false);
    agg_cmd->add_option("--runs", agg_args.runs, "Run files or manifests")->required();
    agg_cmd->add_option("--method", agg_args.method, "cumulative, inverse or sq.inverse")->capture_default_str();
    agg_cmd->add_option("--percentage", agg_args.percentage, "Cumulative share for --method cumulative")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));

    auto* out_cmd = app.add_subcommand("outliers", "Flag observations extreme along the found directions");
    add_common(out_cmd, common, true);
    out_cmd->add_option("--run", outlier_args.run, "Run file");
    out_cmd->add_option("--k", outlier_args.k, "Outlier factor (required)");
    out_cmd->add_option("--location", outlier_args.location, "mean or median")->capture_default_str();
    out_cmd->add_option("--scale", outlier_args.scale, "sd or mad")->capture_default_str();
    out_cmd->add_flag("--marginal", outlier_args.marginal, "List univariate Tukey-fence outliers instead");

    auto* predict_cmd = app.add_subcommand("predict", "Project new observations on stored directions");
    add_common(predict_cmd, common, true);
    predict_cmd->add_option("--run", predict_args.run, "Run file")->required();
    predict_cmd->add_option("--which", predict_args.which, "Directions, e.g. 1:10");

    auto* sim_cmd = app.add_subcommand("simbench", "Run the rotated three-cluster mixture benchmark");
    add_common(sim_cmd, common, false);
    sim_cmd->add_option("--setting", sim_args.setting, "balanced, unbalanced or both")->capture_default_str();
    sim_cmd->add_option("--reps", sim_args.reps, "Replications per setting")->capture_default_str()->check(CLI::PositiveNumber);
    sim_cmd->add_option("--n-simu", sim_args.n_simu, "Restarts per index")->capture_default_str()->check(CLI::PositiveNumber);
    sim_cmd->add_option("--maxiter", sim_args.maxiter, "Maximum iterations per run")->capture_default_str()->check(CLI::PositiveNumber);
    sim_cmd->add_option("--index", sim_args.indices, "Indices to run")->capture_default_str();
    sim_cmd->add_option("--method", sim_args.methods, "Aggregation methods")->capture_default_str();
    sim_cmd->add_option("--percentage", sim_args.percentage, "Cumulative share")->capture_default_str();
    sim_cmd->add_option("--workers", sim_args.workers, "Parallel restart workers")->capture_default_str()->check(CLI::PositiveNumber);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(common, run_args, out, err);
        if (report_cmd->parsed()) return cmd_report(common, report_args, out, err);
        if (agg_cmd->parsed()) return cmd_aggregate(common, agg_args, out, err);
        if (out_cmd->parsed()) return cmd_outliers(common, outlier_args, out, err);
        if (predict_cmd->parsed()) return cmd_predict(common, predict_args, out, err);
        if (sim_cmd->parsed()) return cmd_simbench(common, sim_args, out, err);
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

} // namespace epp::cli
