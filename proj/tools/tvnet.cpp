// tvnet command-line front end.  Data goes to files (or stdout), progress to
// stderr.  Exit codes: 0 ok, 1 validation, 2 numeric/convergence, 3 I/O.

#include "tvnet/benchmark.hpp"
#include "tvnet/error.hpp"
#include "tvnet/factors.hpp"
#include "tvnet/io.hpp"
#include "tvnet/networks.hpp"
#include "tvnet/pipeline.hpp"
#include "tvnet/simulate.hpp"
#include "tvnet/text.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <filesystem>
#include <set>
#include <iostream>
#include <optional>
#include <thread>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace tvnet;

namespace {

constexpr const char* kToolVersion = "1.0.0";
constexpr int kManifestVersion = 1;

void log(const std::string& msg) { std::cerr << "tvnet: " << msg << std::endl; }

// Files are written to a staging directory and moved into place only when the
// whole command succeeded.
class ArtifactDir {
public:
    explicit ArtifactDir(fs::path out) : out_(std::move(out)), staging_(out_ / ".tvnet-staging") {
        try {
            fs::create_directories(out_);
            fs::remove_all(staging_);
            fs::create_directories(staging_);
        } catch (const fs::filesystem_error& e) {
            throw IoError("cannot prepare output directory " + out_.string() + ": " + e.what());
        }
    }
    ArtifactDir(const ArtifactDir&) = delete;
    ArtifactDir& operator=(const ArtifactDir&) = delete;
    ~ArtifactDir() {
        if (!committed_) {
            std::error_code ec;
            fs::remove_all(staging_, ec);
        }
    }

    void write(const std::string& rel, const std::string& contents) {
        const fs::path target = staging_ / rel;
        try {
            fs::create_directories(target.parent_path());
        } catch (const fs::filesystem_error& e) {
            throw IoError(std::string("cannot create directory: ") + e.what());
        }
        write_file(target, contents);
        files_.push_back(rel);
    }

    void commit(json manifest) {
        manifest["files"] = files_;
        write("manifest.json", manifest.dump(2) + "\n");
        try {
            for (const std::string& rel : files_) {
                const fs::path dst = out_ / rel;
                fs::create_directories(dst.parent_path());
                fs::rename(staging_ / rel, dst);
            }
            fs::remove_all(staging_);
        } catch (const fs::filesystem_error& e) {
            throw IoError(std::string("cannot move artifacts into place: ") + e.what());
        }
        committed_ = true;
        log("wrote " + std::to_string(files_.size()) + " files to " + out_.string());
    }

private:
    fs::path out_, staging_;
    std::vector<std::string> files_;
    bool committed_ = false;
};

// FNV-1a, so manifests pin the exact input bytes.
std::string fingerprint(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct Config {
    std::string out = "tvnet-out";
    std::string config_file;
    unsigned threads = 0;

    // simulation / benchmark
    int example = 1;
    long d = 10;
    long n = 200;
    std::uint64_t seed = 1;
    int reps = 1;
    int replication = 0;
    int burn_in = 200;
    std::vector<std::string> methods{"wglasso", "oracle", "clime"};

    // data
    std::string input;
    bool standardize = false;

    // VAR
    int p = 1;
    bool auto_order = false;
    int kmax = 10;
    double xi_a = 0.1;
    double h = 0.0;
    double b = 0.0;
    double gamma = 1.0;
    double lambda1 = 0.0;  // > 0: fixed
    double lambda3 = 0.0;  // > 0: fixed

    // factors
    std::string factor_mode = "none";
    long k = 2;
    bool auto_k = false;
    long qmax = 8;
    double h_star = 0.0;

    // networks / metrics
    std::string paths_dir;
    std::string precision;
    std::string truth;
    std::string edges;
};

unsigned resolved_threads(const Config& c) {
    if (c.threads > 0) return c.threads;
    return std::max(1u, std::thread::hardware_concurrency());
}

json config_json(const std::string& command, const Config& c, const std::string& config_file) {
    json j;
    j["subcommand"] = command;
    if (!config_file.empty()) j["config_file"] = config_file;
    if (command == "simulate" || command == "benchmark") {
        j["example"] = c.example;
        j["d"] = c.d;
        j["n"] = c.n;
        j["seed"] = c.seed;
        j["burn_in"] = c.burn_in;
    }
    if (command == "simulate") j["replication"] = c.replication;
    if (command == "benchmark") {
        j["reps"] = c.reps;
        j["methods"] = c.methods;
    }
    if (command == "estimate" || command == "factor-adjust") {
        j["input"] = c.input;
        j["standardize"] = c.standardize;
    }
    if (command == "estimate" || command == "benchmark") {
        j["p"] = c.p;
        j["auto_order"] = c.auto_order;
        j["kmax"] = c.kmax;
        j["xi_a"] = c.xi_a;
        j["h"] = c.h;
        j["b"] = c.b;
        j["gamma"] = c.gamma;
        j["lambda1"] = c.lambda1 > 0.0 ? json(c.lambda1) : json("bic");
        j["lambda3"] = c.lambda3 > 0.0 ? json(c.lambda3) : json("ebic");
    }
    if (command == "estimate" || command == "factor-adjust" || command == "benchmark") {
        j["factor_mode"] = c.factor_mode;
        j["k"] = c.auto_k ? json("auto") : json(c.k);
        j["qmax"] = c.qmax;
        j["h_star"] = c.h_star;
    }
    if (command == "networks") {
        j["paths"] = c.paths_dir;
        j["precision"] = c.precision;
    }
    if (command == "metrics") {
        j["truth"] = c.truth;
        j["edges"] = c.edges;
        j["paths"] = c.paths_dir;
        j["precision"] = c.precision;
    }
    // Thread count and output location do not affect any artifact, so they are
    // left out to keep manifests byte-identical across runs.
    return j;
}

json base_manifest(const std::string& command, const Config& c, const std::string& config_file) {
    json m;
    m["tool"] = "tvnet";
    m["version"] = kToolVersion;
    m["formats"] = {{"manifest", kManifestVersion},
                    {"container", kContainerVersion},
                    {"rng", kRngName}};
    m["config"] = config_json(command, c, config_file);
    return m;
}

EstimateOptions estimate_options(const Config& c) {
    if (c.p < 1) throw ValidationError("--p must be at least 1");
    if (c.h < 0.0 || c.b < 0.0) throw ValidationError("bandwidths must be positive");
    if (!(c.gamma > 0.0 && c.gamma <= 1.0)) throw ValidationError("--gamma must lie in (0, 1]");
    EstimateOptions o;
    o.lag_order = c.p;
    o.h = c.h;
    o.b = c.b;
    o.gamma = c.gamma;
    if (c.lambda1 > 0.0) o.lambda1 = Lambda1Rule::fixed(c.lambda1);
    if (c.lambda3 > 0.0) o.lambda3 = Lambda3Rule::fixed(c.lambda3);
    o.threads = resolved_threads(c);
    return o;
}

json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

// Factor step shared by estimate and factor-adjust.
std::optional<FactorAdjustment> run_factor_step(const Config& c, const TimeSeriesPanel& z,
                                                double& h_star) {
    const FactorMode mode = factor_mode_from_string(c.factor_mode);
    if (mode == FactorMode::None) return std::nullopt;
    if (!c.auto_k && c.k < 1) throw ValidationError("--k must be at least 1");
    h_star = c.h_star > 0.0 ? c.h_star : default_bandwidths(z.n(), z.d()).h_star;
    log("factor adjustment (" + to_string(mode) + ")");
    try {
        return factor_adjust(z, mode, c.auto_k ? -1 : c.k, h_star, c.qmax, {},
                             resolved_threads(c));
    } catch (const Error& e) {
        rethrow_in_stage(e, "factor adjustment");
    }
}

json factor_json(const FactorAdjustment& fa, double h_star) {
    json j;
    j["mode"] = to_string(fa.fit.mode);
    j["k"] = fa.fit.k;
    j["auto_k"] = fa.auto_k;
    j["h_star"] = h_star;
    if (fa.auto_k) {
        j["ic"] = vector_json(fa.selection.ic);
        j["rss"] = vector_json(fa.selection.rss);
    }
    return j;
}

TimeSeriesPanel read_panel(const Config& c) {
    if (c.input.empty()) throw ValidationError("--input is required");
    return load_panel(c.input, c.standardize);
}

int cmd_simulate(const Config& c, const std::string& config_file) {
    if (c.replication < 0) throw ValidationError("--replication must be nonnegative");
    log("simulating example " + std::to_string(c.example) + " (d=" + std::to_string(c.d) +
        ", n=" + std::to_string(c.n) + ")");
    const SimulatedData data = generate({c.example, c.d, c.n, c.seed,
                                         static_cast<std::uint32_t>(c.replication), c.burn_in});
    ArtifactDir dir(c.out);
    dir.write("panel.csv", panel_csv(data.panel));
    dir.write("truth.bin", encode_truth(data.truth));
    dir.write("innovations.csv", residuals_csv({data.innovations, 0, "innovations"}));
    json m = base_manifest("simulate", c, config_file);
    m["simulation"] = {{"initial_state", "zero vector, then burn-in steps at tau_1"},
                       {"burn_in", c.burn_in},
                       {"innovations", "Gaussian"},
                       {"granger_edges", data.truth.granger.size()},
                       {"partial_edges", data.truth.partial.size()}};
    dir.commit(m);
    return 0;
}

void write_var_artifacts(ArtifactDir& dir, const std::vector<CoefficientPath>& paths,
                         const std::string& folder) {
    for (const auto& path : paths) {
        const std::string stem = folder + "/path_" + std::to_string(path.response + 1);
        dir.write(stem + ".bin", encode_path(path));
        dir.write(stem + ".csv", path_csv(path));
    }
}

int cmd_estimate(const Config& c, const std::string& config_file) {
    const TimeSeriesPanel raw = read_panel(c);
    const std::string input_bytes = read_file(c.input);
    EstimateOptions opts = estimate_options(c);
    json m = base_manifest("estimate", c, config_file);
    m["input"] = {{"path", c.input}, {"bytes", input_bytes.size()}, {"fnv1a64", fingerprint(input_bytes)},
                  {"n", raw.n()}, {"d", raw.d()}};

    double h_star = 0.0;
    const auto fa = run_factor_step(c, raw, h_star);
    const TimeSeriesPanel& panel = fa ? fa->idiosyncratic : raw;
    if (fa) m["factors"] = factor_json(*fa, h_star);

    if (c.auto_order) {
        log("selecting the VAR order (kmax=" + std::to_string(c.kmax) + ")");
        OrderSelection sel;
        try {
            sel = select_var_order(panel, c.kmax, c.xi_a, opts);
        } catch (const Error& e) {
            rethrow_in_stage(e, "order selection");
        }
        opts.lag_order = sel.order;
        m["order_selection"] = {{"order", sel.order},
                                {"lag_totals", vector_json(sel.totals)},
                                {"ratios", vector_json(sel.ratios)}};
    }
    log("estimating tv-VAR(" + std::to_string(opts.lag_order) + ") networks");
    const PipelineResult res = estimate_network(panel, opts);

    ArtifactDir dir(c.out);
    write_var_artifacts(dir, res.var.paths, "paths");
    dir.write("precision.bin", encode_precision(res.precision));
    dir.write("residuals.csv", residuals_csv(res.residuals));
    dir.write("edges.csv", edge_list_csv(res.network, panel.names()));
    dir.write("edge_profiles.csv",
              edge_profile_csv(res.network, res.var.paths, &res.precision, panel.names()));
    if (fa) dir.write("idiosyncratic.csv", panel_csv(panel));

    json tuning;
    tuning["lag_order"] = opts.lag_order;
    tuning["h"] = res.bandwidths.h;
    tuning["b"] = res.bandwidths.b;
    tuning["lambda2"] = res.var.lambda2;
    tuning["lambda3"] = vector_json(res.precision.lambdas);
    json lambda1 = json::array();
    for (const auto& pre : res.var.preliminary) lambda1.push_back(vector_json(pre.lambdas));
    tuning["lambda1"] = lambda1;
    m["tuning"] = tuning;
    m["network"] = {{"granger_edges", res.network.granger.size()},
                    {"partial_edges", res.network.partial.size()}};
    dir.commit(m);
    return 0;
}

int cmd_factor_adjust(const Config& c, const std::string& config_file) {
    const TimeSeriesPanel z = read_panel(c);
    if (factor_mode_from_string(c.factor_mode) == FactorMode::None)
        throw ValidationError("factor-adjust needs --factor-mode constant or time-varying");
    const std::string input_bytes = read_file(c.input);
    double h_star = 0.0;
    const auto fa = run_factor_step(c, z, h_star);
    ArtifactDir dir(c.out);
    auto table = [&](const Matrix& values) { return panel_csv(TimeSeriesPanel(values, z.names())); };
    dir.write("idiosyncratic.csv", table(fa->idiosyncratic.values()));
    dir.write("common.csv", table(fa->fit.common));
    if (fa->fit.mode == FactorMode::Constant) {
        std::ostringstream f;
        write_matrix_rows(f, fa->fit.factors);
        dir.write("factors.csv", f.str());
        std::ostringstream l;
        write_matrix_rows(l, fa->fit.loadings);
        dir.write("loadings.csv", l.str());
    }
    json m = base_manifest("factor-adjust", c, config_file);
    m["input"] = {{"path", c.input}, {"bytes", input_bytes.size()}, {"fnv1a64", fingerprint(input_bytes)}};
    m["factors"] = factor_json(*fa, h_star);
    dir.commit(m);
    return 0;
}

std::vector<CoefficientPath> read_paths(const std::string& folder) {
    if (folder.empty()) throw ValidationError("--paths is required");
    std::vector<CoefficientPath> paths;
    std::error_code ec;
    fs::directory_iterator it(folder, ec);
    if (ec) throw IoError("cannot read directory " + folder);
    std::vector<fs::path> files;
    for (const auto& entry : it)
        if (entry.path().extension() == ".bin" && entry.path().filename().string().rfind("path_", 0) == 0)
            files.push_back(entry.path());
    if (files.empty()) throw IoError("no path_*.bin containers in " + folder);
    for (const auto& f : files) paths.push_back(load_path(f));
    std::sort(paths.begin(), paths.end(),
              [](const CoefficientPath& a, const CoefficientPath& b) { return a.response < b.response; });
    return paths;
}

int cmd_networks(const Config& c, const std::string& config_file) {
    const auto paths = read_paths(c.paths_dir);
    std::optional<PrecisionPath> prec;
    if (!c.precision.empty()) prec = load_precision(c.precision);
    const NetworkEstimate net = build_network(paths, prec ? &*prec : nullptr);
    ArtifactDir dir(c.out);
    dir.write("edges.csv", edge_list_csv(net, {}));
    dir.write("edge_profiles.csv", edge_profile_csv(net, paths, prec ? &*prec : nullptr, {}));
    json m = base_manifest("networks", c, config_file);
    m["network"] = {{"granger_edges", net.granger.size()}, {"partial_edges", net.partial.size()}};
    dir.commit(m);
    return 0;
}

json metrics_json(const ClassificationMetrics& cm) {
    return {{"TP", cm.counts.tp}, {"FP", cm.counts.fp}, {"FN", cm.counts.fn}, {"TN", cm.counts.tn},
            {"TPR", cm.tpr},      {"TNR", cm.tnr},      {"PPV", cm.ppv},      {"NPV", cm.npv},
            {"F1", cm.f1},        {"MCC", cm.mcc}};
}

int cmd_metrics(const Config& c, const std::string& config_file) {
    if (c.truth.empty()) throw ValidationError("--truth is required");
    const ScenarioTruth truth = load_truth(c.truth);
    json result;
    if (!c.edges.empty()) {
        const EdgeLists edges = parse_edge_list_csv(read_file(c.edges), truth.d);
        result["granger"] = metrics_json(
            classification_metrics(edges.granger, truth.granger, PairUniverse::Directed));
        result["partial"] = metrics_json(classification_metrics(
            edges.partial, truth.partial, PairUniverse::UndirectedOffDiagonal));
    }
    if (!c.paths_dir.empty()) {
        const auto paths = read_paths(c.paths_dir);
        std::vector<Matrix> a;
        for (Eigen::Index t = 0; t < paths.front().n(); ++t) a.push_back(transition_matrix(paths, t, 1));
        result["EE_A"] = scaled_frobenius_error(a, truth.transitions);
    }
    if (!c.precision.empty())
        result["EE_Omega"] = scaled_frobenius_error(load_precision(c.precision).matrices, truth.precision);
    if (result.empty()) throw ValidationError("metrics needs --edges, --paths or --precision");
    std::cout << result.dump(2) << std::endl;
    ArtifactDir dir(c.out);
    dir.write("metrics.json", result.dump(2) + "\n");
    json m = base_manifest("metrics", c, config_file);
    dir.commit(m);
    return 0;
}

int cmd_benchmark(const Config& c, const std::string& config_file) {
    BenchmarkConfig bc;
    bc.example = c.example;
    bc.d = c.d;
    bc.n = c.n;
    bc.seed = c.seed;
    bc.reps = c.reps;
    bc.burn_in = c.burn_in;
    bc.methods.clear();
    for (const auto& name : c.methods) bc.methods.push_back(method_from_string(name));
    bc.options = estimate_options(c);
    if (c.p != 1) throw ValidationError("benchmark scenarios are tv-VAR(1); --p must be 1");
    bc.factor_mode = factor_mode_from_string(c.factor_mode == "none" && c.example == 4
                                                 ? "time-varying"
                                                 : c.factor_mode);
    bc.factor_k = c.auto_k ? -1 : c.k;
    bc.h_star = c.h_star;
    log("benchmark: example " + std::to_string(c.example) + ", d=" + std::to_string(c.d) + ", n=" +
        std::to_string(c.n) + ", " + std::to_string(c.reps) + " replications");
    const BenchmarkResult result = run_benchmark(bc);

    json summary = json::object();
    for (const auto& [method, metrics] : result.summary) {
        json cell;
        for (const auto& [name, s] : metrics) cell[name] = {{"mean", s.mean}, {"sd", s.sd}, {"count", s.count}};
        summary[method] = cell;
    }
    json failures = json::object();
    for (const auto& [method, count] : result.failures) failures[method] = count;
    json reps = json::array();
    for (const auto& rep : result.replications) {
        json r;
        r["replication"] = rep.replication;
        for (const auto& [method, rec] : rep.records) r["records"][method] = rec;
        for (const auto& [method, why] : rep.failures) r["failures"][method] = why;
        reps.push_back(r);
    }
    for (const auto& [method, count] : result.failures)
        if (count > 0) log(method + ": " + std::to_string(count) + " replication(s) failed");

    ArtifactDir dir(c.out);
    dir.write("benchmark.csv", benchmark_csv(result));
    dir.write("benchmark.json", json{{"summary", summary}, {"failures", failures}}.dump(2) + "\n");
    dir.write("replications.json", reps.dump(2) + "\n");
    std::cout << benchmark_csv(result);
    dir.commit(base_manifest("benchmark", c, config_file));
    return 0;
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Validation: return 1;
        case ErrorKind::Numeric: return 2;
        case ErrorKind::IO: return 3;
    }
    return 2;
}

void add_out(CLI::App* app, Config& c) {
    app->add_option("--config", c.config_file, "TOML-style configuration file; flags override it");
    app->add_option("--out", c.out, "Output directory");
    app->add_option("--threads", c.threads, "Worker threads (0: all cores)");
}

void add_scenario(CLI::App* app, Config& c) {
    app->add_option("--example", c.example, "Simulation example (1-4)")->check(CLI::Range(1, 4));
    app->add_option("--d", c.d, "Dimension");
    app->add_option("--n", c.n, "Sample length");
    app->add_option("--seed", c.seed, "Random seed");
    app->add_option("--burn-in", c.burn_in, "Burn-in steps");
}

void add_var(CLI::App* app, Config& c) {
    auto* p = app->add_option("--p", c.p, "VAR lag order");
    app->add_flag("--auto-order", c.auto_order, "Select the lag order by the ratio criterion")
        ->excludes(p);
    app->add_option("--kmax", c.kmax, "Largest candidate order for --auto-order");
    app->add_option("--xi-a", c.xi_a, "Norm floor in the ratio criterion");
    app->add_option("--h", c.h, "Coefficient bandwidth (0: default rule)");
    app->add_option("--b", c.b, "Covariance bandwidth (0: default rule)");
    app->add_option("--gamma", c.gamma, "GIC penalty constant in (0, 1]");
    app->add_option("--lambda1", c.lambda1, "Fixed stage-1 level (0: BIC)");
    app->add_option("--lambda3", c.lambda3, "Fixed CLIME level (0: EBIC per grid point)");
}

void add_factor(CLI::App* app, Config& c) {
    app->add_option("--factor-mode", c.factor_mode, "none | constant | time-varying");
    auto* k = app->add_option("--k", c.k, "Number of factors");
    app->add_flag("--auto-k", c.auto_k, "Select the number of factors")->excludes(k);
    app->add_option("--qmax", c.qmax, "Largest candidate factor number for --auto-k");
    app->add_option("--h-star", c.h_star, "Local PCA bandwidth (0: default rule)");
}

void add_input(CLI::App* app, Config& c) {
    app->add_option("--input", c.input, "Panel CSV (rows time, columns variables)");
    app->add_flag("--standardize", c.standardize, "Standardise each column first");
}

// Keys of a --config file become flags appended after the command line, skipping
// any the command line already sets.  Keys may sit at top level or in a section
// named after the subcommand; underscores read as dashes.
std::vector<std::string> with_config_file(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    std::string file, subcommand;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (subcommand.empty() && args[i].rfind("-", 0) != 0) subcommand = args[i];
        if (args[i] == "--config" && i + 1 < args.size()) file = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) file = args[i].substr(9);
    }
    if (file.empty()) return args;

    const auto given = [&](const std::string& flag) {
        return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
            return a == flag || a.rfind(flag + "=", 0) == 0;
        });
    };
    static const std::set<std::string> switches = {"standardize", "auto-order", "auto-k"};
    std::vector<std::string> extra;
    for (const auto& item : CLI::ConfigTOML().from_file(file)) {
        if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == subcommand)) continue;
        std::string key = item.name;
        std::replace(key.begin(), key.end(), '_', '-');
        const std::string flag = "--" + key;
        if (key == "config" || given(flag) || (key == "p" && given("--auto-order")) ||
            (key == "k" && given("--auto-k")))
            continue;
        if (switches.count(key)) {
            if (item.inputs.size() == 1 && (item.inputs[0] == "true" || item.inputs[0] == "1"))
                extra.push_back(flag);
            continue;
        }
        std::string value;
        for (const auto& v : item.inputs) value += (value.empty() ? "" : ",") + v;
        extra.push_back(flag);
        extra.push_back(value);
    }
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-varying Granger and partial-correlation networks"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);
    Config c;

    auto* simulate = app.add_subcommand("simulate", "Simulate one replication of an example");
    add_scenario(simulate, c);
    simulate->add_option("--replication", c.replication, "Replication index (sub-stream)");
    add_out(simulate, c);

    auto* estimate = app.add_subcommand("estimate", "Run the three-stage estimator on a panel");
    add_input(estimate, c);
    add_var(estimate, c);
    add_factor(estimate, c);
    add_out(estimate, c);

    auto* factor = app.add_subcommand("factor-adjust", "Remove an estimated factor component");
    add_input(factor, c);
    add_factor(factor, c);
    add_out(factor, c);

    auto* networks = app.add_subcommand("networks", "Rebuild edge lists from exported paths");
    networks->add_option("--paths", c.paths_dir, "Directory with path_*.bin containers");
    networks->add_option("--precision", c.precision, "Precision path container");
    add_out(networks, c);

    auto* bench = app.add_subcommand("benchmark", "Monte-Carlo comparison on simulated examples");
    add_scenario(bench, c);
    bench->add_option("--reps", c.reps, "Replications");
    bench->add_option("--methods", c.methods,
                      "wglasso oracle full clime infeasible-clime")
        ->delimiter(',');
    add_var(bench, c);
    add_factor(bench, c);
    add_out(bench, c);

    auto* metrics = app.add_subcommand("metrics", "Score estimates against a truth container");
    metrics->add_option("--truth", c.truth, "Truth container from simulate");
    metrics->add_option("--edges", c.edges, "Edge list CSV");
    metrics->add_option("--paths", c.paths_dir, "Directory with path_*.bin containers");
    metrics->add_option("--precision", c.precision, "Precision path container");
    add_out(metrics, c);

    std::vector<std::string> args;
    try {
        args = with_config_file(argc, argv);
    } catch (const CLI::FileError& e) {
        log(std::string("error: ") + e.what());
        return 3;
    } catch (const CLI::ParseError& e) {
        log(std::string("error: ") + e.what());
        return 1;
    }
    std::vector<char*> argp;
    for (auto& a : args) argp.push_back(a.data());
    try {
        app.parse(static_cast<int>(argp.size()), argp.data());
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    const std::string config_file = c.config_file;
    try {
        if (*simulate) return cmd_simulate(c, config_file);
        if (*estimate) return cmd_estimate(c, config_file);
        if (*factor) return cmd_factor_adjust(c, config_file);
        if (*networks) return cmd_networks(c, config_file);
        if (*bench) return cmd_benchmark(c, config_file);
        if (*metrics) return cmd_metrics(c, config_file);
    } catch (const Error& e) {
        log(std::string("error: ") + e.what());
        return exit_code(e.kind());
    } catch (const fs::filesystem_error& e) {
        log(std::string("error: ") + e.what());
        return 3;
    } catch (const std::exception& e) {
        log(std::string("error: ") + e.what());
        return 2;
    }
    return 1;
}
