#ifndef DESVR_TOOLS_CLI_HPP
#define DESVR_TOOLS_CLI_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <desvr/desvr.hpp>

namespace desvr::cli {

enum ExitCode : int { ok = 0, usage = 2, data = 3, solver = 4, io = 5 };

/// Reads a flat JSON object as option defaults for one subcommand. Keys are
/// long option names; underscores and dashes are interchangeable. Command-line
/// flags win.
class JsonConfig : public CLI::Config {
public:
    explicit JsonConfig(std::string section) : section_(std::move(section)) {}

    std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}\n"; }

    std::vector<CLI::ConfigItem> from_config(std::istream& in) const override
    {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        }
        catch (const nlohmann::json::exception& e) {
            throw CLI::ConversionError("config file is not valid JSON: " + std::string(e.what()));
        }
        if (!j.is_object())
            throw CLI::ConversionError("config file must hold a JSON object");
        std::vector<CLI::ConfigItem> items;
        for (const auto& [key, value] : j.items()) {
            CLI::ConfigItem item;
            if (!section_.empty())
                item.parents.push_back(section_);
            item.name = key;
            for (auto& ch : item.name)
                if (ch == '_')
                    ch = '-';
            if (value.is_array())
                for (const auto& v : value)
                    item.inputs.push_back(scalar(v));
            else
                item.inputs.push_back(scalar(value));
            items.push_back(std::move(item));
        }
        return items;
    }

private:
    static std::string scalar(const nlohmann::json& v)
    {
        if (v.is_string())
            return v.get<std::string>();
        if (v.is_boolean())
            return v.get<bool>() ? "true" : "false";
        if (v.is_number_float())
            return text::format_double(v.get<double>());
        if (v.is_number())
            return v.dump();
        throw CLI::ConversionError("config values must be strings, numbers, booleans or arrays of those");
    }

    std::string section_;
};

namespace detail {

struct DataOptions {
    std::string data;
    bool normalize = false;
    double x_low = -1.0;
    double x_up = 1.0;
    std::string fit_scope = "train";
    std::size_t train_n = 500;
    std::size_t test_n = 200;
    std::string out = ".";
};

struct RunOptions {
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string kernel = "rbf";
    int degree = 3;
    double shift = 0.0;
    double kkt_tolerance = 1e-3;
    std::size_t max_passes = 0;
};

inline void add_data_options(CLI::App& app, DataOptions& o)
{
    app.add_option("--data", o.data, "price CSV (date,open,high,low,close,adj_close,volume)")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_flag("--normalize", o.normalize, "min-max normalize features and target");
    app.add_option("--x-low", o.x_low, "lower normalization bound")->capture_default_str();
    app.add_option("--x-up", o.x_up, "upper normalization bound")->capture_default_str();
    app.add_option("--fit-scope", o.fit_scope, "rows the normalizer is fitted on")
        ->check(CLI::IsMember({"train", "full"}))
        ->capture_default_str();
    app.add_option("--train-n", o.train_n, "training rows")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--test-n", o.test_n, "test rows following the training rows")->capture_default_str();
    app.add_option("--out", o.out, "output directory")->capture_default_str();
}

inline void add_run_options(CLI::App& app, RunOptions& o)
{
    app.add_option("--seed", o.seed, "random seed")->capture_default_str();
    app.add_option("--threads", o.threads, "fitness-evaluation threads, 0 = all cores")->capture_default_str();
    app.add_option("--kernel", o.kernel, "kernel kind")
        ->check(CLI::IsMember({"rbf", "linear", "polynomial", "sigmoid"}))
        ->capture_default_str();
    app.add_option("--degree", o.degree, "polynomial degree")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--shift", o.shift, "polynomial/sigmoid shift")->capture_default_str();
    app.add_option("--kkt-tol", o.kkt_tolerance, "solver KKT tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--max-passes", o.max_passes, "solver iteration cap in passes, 0 = 10 n")->capture_default_str();
}

// CLI11 reads config files only on the root app, so the file is attached there
// and its keys are routed to the subcommand named on the command line.
inline void add_config(CLI::App& app, int argc, const char* const* argv)
{
    std::string section;
    for (int i = 1; i < argc && section.empty(); ++i)
        for (const auto* sub : app.get_subcommands({}))
            if (sub->get_name() == argv[i])
                section = argv[i];
    app.set_config("--config", "", "JSON file of option defaults for the subcommand; flags override it");
    app.config_formatter(std::make_shared<JsonConfig>(section));
    for (auto* sub : app.get_subcommands({}))
        sub->fallthrough();
}

inline SolverSettings settings_of(const RunOptions& o)
{
    SolverSettings s;
    s.kkt_tolerance = o.kkt_tolerance;
    s.max_passes = o.max_passes;
    return s;
}

inline KernelSpec kernel_of(const RunOptions& o, double gamma)
{
    KernelSpec k;
    k.kind = kernel_kind_from_string(o.kernel);
    k.gamma = gamma;
    k.degree = o.degree;
    k.shift = o.shift;
    return k;
}

inline std::filesystem::path output_dir(const std::string& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create output directory '" + dir + "': " + ec.message());
    return dir;
}

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    writer(out);
    out.flush();
    if (!out)
        throw IoError("write to '" + path.string() + "' failed");
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j)
{
    write_file(path, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

inline nlohmann::json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    }
    catch (const nlohmann::json::exception& e) {
        throw DataError("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline SupervisedSet load_supervised(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    try {
        return build_supervised(parse_csv(in));
    }
    catch (const Error& e) {
        throw DataError(path + ": " + e.what());
    }
}

inline std::optional<NormalizeOptions> normalize_options(const DataOptions& o)
{
    if (!o.normalize)
        return std::nullopt;
    return NormalizeOptions{o.x_low, o.x_up, o.fit_scope == "full" ? FitScope::full : FitScope::train_only};
}

inline PreparedData load_prepared(const DataOptions& o)
{
    if (o.test_n == 0)
        throw InvalidArgument("--test-n must be positive; test MSE is reported on those rows");
    const auto set = load_supervised(o.data);
    if (o.train_n + o.test_n > set.size())
        throw DataError(o.data + ": " + std::to_string(o.train_n) + " training + " + std::to_string(o.test_n) +
                        " test rows requested but only " + std::to_string(set.size()) + " supervised rows exist");
    return prepare(set, {o.train_n, o.test_n}, normalize_options(o));
}

/// Parses "lo:hi".
inline Interval parse_interval(const std::string& s)
{
    const auto parts = text::split(s, ':');
    std::optional<double> lo, hi;
    if (parts.size() == 2) {
        lo = text::parse_double(parts[0]);
        hi = text::parse_double(parts[1]);
    }
    if (!lo || !hi)
        throw InvalidArgument("bad range '" + s + "' (expected lo:hi)");
    return {*lo, *hi};
}

/// Parses "lo:hi:n" or "lo:hi" (50 points).
inline std::vector<double> parse_grid(const std::string& s)
{
    const auto parts = text::split(s, ':');
    if (parts.size() != 2 && parts.size() != 3)
        throw InvalidArgument("bad grid '" + s + "' (expected lo:hi:n)");
    const auto lo = text::parse_double(parts[0]);
    const auto hi = text::parse_double(parts[1]);
    std::size_t n = 50;
    if (parts.size() == 3) {
        const auto v = text::parse_double(parts[2]);
        if (!v || *v < 1 || *v != std::floor(*v))
            throw InvalidArgument("bad grid point count in '" + s + "'");
        n = static_cast<std::size_t>(*v);
    }
    if (!lo || !hi)
        throw InvalidArgument("bad grid '" + s + "' (expected lo:hi:n)");
    return linear_grid(*lo, *hi, n);
}

inline std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string summary_line(std::string_view label, const SvrParams& p, double train_mse, double test_mse,
                                std::size_t n_sv)
{
    return std::string(label) + "  C=" + fmt(p.c) + " epsilon=" + fmt(p.epsilon) + " gamma=" + fmt(p.kernel.gamma) +
           "  train_mse=" + fmt(train_mse) + " test_mse=" + fmt(test_mse) + " n_sv=" + std::to_string(n_sv);
}

inline void save_normalizer(const std::filesystem::path& dir, const std::optional<NormalizationMap>& map)
{
    if (map)
        write_json(dir / "normalizer.json", *map);
}

// --- subcommands -------------------------------------------------------------------

inline void cmd_ingest(const DataOptions& o, std::ostream& out)
{
    const auto set = load_supervised(o.data);
    const auto dir = output_dir(o.out);
    write_file(dir / "supervised.csv", [&](std::ostream& f) { write_supervised_csv(f, set); });
    out << "supervised rows: " << set.size() << " (" << set.dims() << " features)\n";

    if (o.train_n + o.test_n > set.size()) {
        if (o.normalize)
            throw DataError(o.data + ": cannot fit a normalizer on " + std::to_string(o.train_n) + " + " +
                            std::to_string(o.test_n) + " rows, only " + std::to_string(set.size()) + " exist");
        out << "split " << o.train_n << "/" << o.test_n << " does not fit; train/test files not written\n";
        return;
    }
    auto [train, test] = split(set, {o.train_n, o.test_n});
    write_file(dir / "train.csv", [&](std::ostream& f) { write_supervised_csv(f, train); });
    write_file(dir / "test.csv", [&](std::ostream& f) { write_supervised_csv(f, test); });
    out << "train rows: " << train.size() << ", test rows: " << test.size() << '\n';
    if (const auto norm = normalize_options(o)) {
        const RowRange fit{0, norm->scope == FitScope::full ? o.train_n + o.test_n : o.train_n};
        save_normalizer(dir, fit_normalizer(set, norm->x_low, norm->x_up, fit));
        out << "normalizer fitted on " << fit.size() << " rows\n";
    }
}

struct SweepOptions {
    std::string vary;
    std::string grid;
    std::vector<std::string> fix;
    std::string sv_fraction;
};

inline void cmd_sweep(const DataOptions& d, const RunOptions& r, const SweepOptions& s, std::ostream& out)
{
    const auto prep = load_prepared(d);
    SweepSpec spec;
    spec.varying = svr_param_from_string(s.vary);
    spec.grid = parse_grid(s.grid);
    spec.fixed = {heuristic_c(prep.train.targets), 0.1, kernel_of(r, heuristic_gamma())};
    for (const auto& item : s.fix) {
        const auto eq = item.find('=');
        const auto value = eq == std::string::npos ? std::nullopt : text::parse_double(std::string_view(item).substr(eq + 1));
        if (!value)
            throw InvalidArgument("bad --fix '" + item + "' (expected name=value)");
        spec.fixed = with_value(spec.fixed, svr_param_from_string(item.substr(0, eq)), *value);
    }
    out << "fixed:";
    if (spec.varying != SvrParam::c)
        out << " C=" << fmt(spec.fixed.c);
    if (spec.varying != SvrParam::epsilon)
        out << " epsilon=" << fmt(spec.fixed.epsilon);
    if (spec.varying != SvrParam::gamma)
        out << " gamma=" << fmt(spec.fixed.kernel.gamma);
    out << "; varying " << to_string(spec.varying) << " over " << spec.grid.size() << " points\n";

    const auto rows = sweep(prep.train, prep.test, spec, settings_of(r));
    const auto dir = output_dir(d.out);
    write_file(dir / "sweep.csv", [&](std::ostream& f) { write_sweep_csv(f, rows); });
    save_normalizer(dir, prep.normalizer);
    out << "wrote " << rows.size() << " rows to " << (dir / "sweep.csv").string() << '\n';

    if (!s.sv_fraction.empty()) {
        const auto frac = parse_interval(s.sv_fraction);
        const auto [lo, hi] = select_range_by_sv_fraction(rows, prep.train.size(), frac.lo, frac.hi);
        out << "range with support-vector fraction in [" << fmt(frac.lo) << ", " << fmt(frac.hi) << "]: " << fmt(lo)
            << ":" << fmt(hi) << '\n';
    }
}

struct TuneOptions {
    std::string method;
    std::string preset;
    std::string c_range, epsilon_range, gamma_range;
    std::string fitness = "train_mse";
    DeConfig de;
    std::string strategy = "rand_1_bin";
    PsoConfig pso;
    bool compare = false;
};

inline ParamBox resolve_box(const TuneOptions& t)
{
    const bool explicit_box = !t.c_range.empty() || !t.epsilon_range.empty() || !t.gamma_range.empty();
    if (!t.preset.empty() && explicit_box)
        throw InvalidArgument("give either --preset or explicit --c-range/--epsilon-range/--gamma-range, not both");
    if (!t.preset.empty())
        return preset_box(t.preset);
    if (t.c_range.empty() || t.epsilon_range.empty() || t.gamma_range.empty())
        throw InvalidArgument("a box needs --preset or all of --c-range, --epsilon-range, --gamma-range");
    ParamBox box{parse_interval(t.c_range), parse_interval(t.epsilon_range), parse_interval(t.gamma_range)};
    box.validate();
    return box;
}

inline void cmd_tune(const DataOptions& d, const RunOptions& r, TuneOptions t, std::ostream& out)
{
    const auto box = resolve_box(t);
    const auto fitness = FitnessSpec::parse(t.fitness);
    TuneMethodConfig method;
    if (t.method == "de") {
        t.de.strategy = de_strategy_from_string(t.strategy);
        t.de.seed = r.seed;
        t.de.threads = r.threads;
        method = t.de;
    }
    else {
        t.pso.seed = r.seed;
        t.pso.threads = r.threads;
        method = t.pso;
    }

    const auto prep = load_prepared(d);
    const auto settings = settings_of(r);
    const auto rep = tune(prep.train, prep.test, box, method, fitness, settings, kernel_of(r, 1.0));

    const auto dir = output_dir(d.out);
    write_json(dir / "tune_report.json", report_to_json(rep));
    write_json(dir / "model.json", rep.model);
    write_file(dir / "history.csv", [&](std::ostream& f) { write_history_csv(f, *rep.optimizer_history); });
    write_json(dir / "timing.json", {{"wall_time_seconds", rep.wall_time}});
    save_normalizer(dir, prep.normalizer);
    out << summary_line(to_string(rep.method), rep.optimized, rep.train_mse, rep.test_mse, rep.n_sv) << '\n';

    if (t.compare) {
        auto params = default_svr_params();
        params.kernel = kernel_of(r, params.kernel.gamma);
        const auto base = evaluate_params(prep.train, prep.test, params, settings);
        out << summary_line(to_string(base.method), base.optimized, base.train_mse, base.test_mse, base.n_sv) << '\n';
        const auto table = compare_report({&base, &rep}, prep.normalizer, prep.test);
        write_file(dir / "comparison.csv", [&](std::ostream& f) { write_comparison_csv(f, table); });
        write_file(dir / "comparison_predictions.csv",
                   [&](std::ostream& f) { write_comparison_predictions_csv(f, table); });
    }
}

struct TrainOptions {
    double c = 1.0;
    double epsilon = 0.1;
    double gamma = 0.2;
};

inline void cmd_train(const DataOptions& d, const RunOptions& r, const TrainOptions& t, std::ostream& out)
{
    const auto prep = load_prepared(d);
    const SvrParams params{t.c, t.epsilon, kernel_of(r, t.gamma)};
    params.validate();
    const auto rep = evaluate_params(prep.train, prep.test, params, settings_of(r));
    const auto dir = output_dir(d.out);
    write_json(dir / "model.json", rep.model);
    write_json(dir / "train_report.json", report_to_json(rep));
    save_normalizer(dir, prep.normalizer);
    out << summary_line("svm", rep.optimized, rep.train_mse, rep.test_mse, rep.n_sv) << '\n';
}

struct PredictOptions {
    std::string model;
    std::string features;
    std::string normalizer;
    std::string out = ".";
};

inline void cmd_predict(const PredictOptions& p, std::ostream& out)
{
    SvrModel model;
    try {
        model = read_json(p.model).get<SvrModel>();
    }
    catch (const nlohmann::json::exception& e) {
        throw DataError("'" + p.model + "' is not a model file: " + e.what());
    }

    FeatureTable table;
    {
        std::ifstream in(p.features);
        if (!in)
            throw IoError("cannot open '" + p.features + "'");
        try {
            table = read_supervised_csv(in);
        }
        catch (const Error& e) {
            throw DataError(p.features + ": " + e.what());
        }
    }
    if (table.features.cols() != model.dims)
        throw DataError("model expects " + std::to_string(model.dims) + " features, '" + p.features + "' has " +
                        std::to_string(table.features.cols()));

    std::optional<NormalizationMap> map;
    if (!p.normalizer.empty()) {
        try {
            map = read_json(p.normalizer).get<NormalizationMap>();
        }
        catch (const nlohmann::json::exception& e) {
            throw DataError("'" + p.normalizer + "' is not a normalizer file: " + e.what());
        }
        if (map->features.size() != table.features.cols())
            throw DataError("normalizer has " + std::to_string(map->features.size()) + " feature columns, '" +
                            p.features + "' has " + std::to_string(table.features.cols()));
        for (std::size_t c = 0; c < table.features.cols(); ++c) {
            const auto& range = map->column(table.column_names[c]);
            for (std::size_t i = 0; i < table.features.rows(); ++i)
                table.features(i, c) = map->apply(range, table.features(i, c));
        }
    }

    auto predicted = predict(model, table.features);
    if (map)
        for (auto& v : predicted)
            v = map->invert(map->target, v);

    const auto dir = output_dir(p.out);
    write_file(dir / "predictions.csv", [&](std::ostream& f) {
        const bool dates = !table.dates.empty();
        if (dates)
            f << "date,";
        if (table.targets)
            f << "actual,";
        f << "predicted\n";
        for (std::size_t i = 0; i < predicted.size(); ++i) {
            if (dates)
                f << format_iso_date(table.dates[i]) << ',';
            if (table.targets)
                f << text::format_double((*table.targets)[i]) << ',';
            f << text::format_double(predicted[i]) << '\n';
        }
    });
    out << "wrote " << predicted.size() << " predictions to " << (dir / "predictions.csv").string() << '\n';
    if (table.targets)
        out << "mse=" << fmt(mse(*table.targets, predicted)) << '\n';
}

} // namespace detail

/// Runs the command line and returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    using namespace detail;
    CLI::App app{"SVR hyperparameter tuning with differential evolution and particle swarm search", "desvr"};
    app.require_subcommand(1);

    DataOptions data;
    RunOptions run_opts;

    auto* ingest = app.add_subcommand("ingest", "build the supervised set and train/test files");
    add_data_options(*ingest, data);

    SweepOptions sweep_opts;
    auto* sweep_cmd = app.add_subcommand("sweep", "vary one SVR parameter over a grid");
    add_data_options(*sweep_cmd, data);
    add_run_options(*sweep_cmd, run_opts);
    sweep_cmd->add_option("--vary", sweep_opts.vary, "parameter to vary")
        ->required()
        ->check(CLI::IsMember({"c", "epsilon", "gamma"}));
    sweep_cmd->add_option("--grid", sweep_opts.grid, "grid as lo:hi:n")->required();
    sweep_cmd->add_option("--fix", sweep_opts.fix, "fixed values as name=value (default C heuristic, epsilon 0.1, gamma 0.0625)")
        ->delimiter(',');
    sweep_cmd->add_option("--sv-fraction", sweep_opts.sv_fraction,
                          "report the grid range whose support-vector fraction lies in lo:hi");

    TuneOptions tune_opts;
    auto* tune_cmd = app.add_subcommand("tune", "search (C, epsilon, gamma) with DE or PSO");
    add_data_options(*tune_cmd, data);
    add_run_options(*tune_cmd, run_opts);
    tune_cmd->add_option("--method", tune_opts.method, "optimizer")->required()->check(CLI::IsMember({"de", "pso"}));
    std::vector<std::string> preset_names;
    for (const auto& [name, box] : preset_boxes())
        preset_names.push_back(name);
    tune_cmd->add_option("--preset", tune_opts.preset, "named parameter box")->check(CLI::IsMember(preset_names));
    tune_cmd->add_option("--c-range", tune_opts.c_range, "C range lo:hi");
    tune_cmd->add_option("--epsilon-range", tune_opts.epsilon_range, "epsilon range lo:hi");
    tune_cmd->add_option("--gamma-range", tune_opts.gamma_range, "gamma range lo:hi");
    tune_cmd->add_option("--fitness", tune_opts.fitness, "train_mse, holdout:F or kfold:K")->capture_default_str();
    tune_cmd->add_option("--np", tune_opts.de.np, "DE population size")->capture_default_str();
    tune_cmd->add_option("--gmax", tune_opts.de.g_max, "DE generations")->capture_default_str();
    tune_cmd->add_option("--cr", tune_opts.de.cr, "DE crossover rate")->capture_default_str();
    tune_cmd->add_option("--f", tune_opts.de.f, "DE scale factor")->capture_default_str();
    tune_cmd->add_option("--strategy", tune_opts.strategy, "DE strategy")
        ->check(CLI::IsMember({"rand_1_bin", "local_to_best_1_bin"}))
        ->capture_default_str();
    tune_cmd->add_option("--swarm", tune_opts.pso.swarm, "PSO swarm size")->capture_default_str();
    tune_cmd->add_option("--iters", tune_opts.pso.iters, "PSO iterations")->capture_default_str();
    tune_cmd->add_option("--w", tune_opts.pso.w, "PSO inertia weight")->capture_default_str();
    tune_cmd->add_option("--c1", tune_opts.pso.c1, "PSO cognitive coefficient")->capture_default_str();
    tune_cmd->add_option("--c2", tune_opts.pso.c2, "PSO social coefficient")->capture_default_str();
    tune_cmd->add_option("--vmax", tune_opts.pso.v_max_fraction, "PSO velocity clamp as a fraction of each range")
        ->capture_default_str();
    tune_cmd->add_flag("--compare", tune_opts.compare, "also evaluate the default SVM and write comparison tables");

    TrainOptions train_opts;
    auto* train_cmd = app.add_subcommand("train", "train one SVR at a fixed (C, epsilon, gamma)");
    add_data_options(*train_cmd, data);
    add_run_options(*train_cmd, run_opts);
    train_cmd->add_option("--c", train_opts.c, "penalty C")->check(CLI::PositiveNumber)->capture_default_str();
    train_cmd->add_option("--epsilon", train_opts.epsilon, "tube half-width")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    train_cmd->add_option("--gamma", train_opts.gamma, "RBF width, k = exp(-|x-z|^2 / gamma)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    PredictOptions predict_opts;
    auto* predict_cmd = app.add_subcommand("predict", "apply a saved model to a supervised-set file");
    predict_cmd->add_option("--model", predict_opts.model, "model JSON")->required()->check(CLI::ExistingFile);
    predict_cmd->add_option("--features", predict_opts.features, "supervised-set CSV")
        ->required()
        ->check(CLI::ExistingFile);
    predict_cmd->add_option("--normalizer", predict_opts.normalizer, "normalizer JSON; inputs are raw, output in price units")
        ->check(CLI::ExistingFile);
    predict_cmd->add_option("--out", predict_opts.out, "output directory")->capture_default_str();

    add_config(app, argc, argv);

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    }
    catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return ExitCode::usage;
    }

    try {
        if (ingest->parsed())
            cmd_ingest(data, out);
        else if (sweep_cmd->parsed())
            cmd_sweep(data, run_opts, sweep_opts, out);
        else if (tune_cmd->parsed())
            cmd_tune(data, run_opts, tune_opts, out);
        else if (train_cmd->parsed())
            cmd_train(data, run_opts, train_opts, out);
        else
            cmd_predict(predict_opts, out);
    }
    catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return ExitCode::usage;
    }
    catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return ExitCode::data;
    }
    catch (const SolverError& e) {
        err << "solver error: " << e.what() << '\n';
        return ExitCode::solver;
    }
    catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return ExitCode::io;
    }
    return ExitCode::ok;
}

} // namespace desvr::cli

#endif
