#ifndef DESVR_TUNING_HPP
#define DESVR_TUNING_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dataset.hpp"
#include "error.hpp"
#include "optim.hpp"
#include "svr.hpp"
#include "text.hpp"

namespace desvr {

// --- parameter boxes -------------------------------------------------------------

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double v) const { return v >= lo && v <= hi; }
    bool operator==(const Interval&) const = default;
};

/// Search ranges for (C, epsilon, gamma).
struct ParamBox {
    Interval c;
    Interval epsilon;
    Interval gamma;

    void validate() const
    {
        detail::require(c.lo > 0.0 && c.hi > c.lo, "ParamBox: C range needs 0 < lo < hi");
        detail::require(epsilon.lo >= 0.0 && epsilon.hi > epsilon.lo, "ParamBox: epsilon range needs 0 <= lo < hi");
        detail::require(gamma.lo > 0.0 && gamma.hi > gamma.lo, "ParamBox: gamma range needs 0 < lo < hi");
    }

    SearchSpace space() const
    {
        validate();
        return SearchSpace({{"c", c.lo, c.hi}, {"epsilon", epsilon.lo, epsilon.hi}, {"gamma", gamma.lo, gamma.hi}});
    }

    bool contains(const SvrParams& p) const
    {
        return c.contains(p.c) && epsilon.contains(p.epsilon) && gamma.contains(p.kernel.gamma);
    }

    bool operator==(const ParamBox&) const = default;
};

inline const std::vector<std::pair<std::string, ParamBox>>& preset_boxes()
{
    static const std::vector<std::pair<std::string, ParamBox>> presets{
        {"apple-normalized", {{1.0, 550.0}, {0.033, 0.052}, {0.01, 0.11}}},
        {"apple-raw", {{1.0, 300.0}, {0.033, 0.052}, {0.01, 0.1}}},
        {"honeywell-normalized", {{1.0, 440.0}, {0.08, 0.15}, {0.02, 0.08}}},
        {"honeywell-raw", {{1.0, 60.0}, {0.05, 0.07}, {0.01, 0.1}}},
    };
    return presets;
}

inline ParamBox preset_box(std::string_view name)
{
    for (const auto& [key, box] : preset_boxes())
        if (key == name)
            return box;
    std::string known;
    for (const auto& [key, box] : preset_boxes())
        known += (known.empty() ? "" : ", ") + key;
    throw InvalidArgument("unknown preset box '" + std::string(name) + "' (known: " + known + ")");
}

// --- heuristics ------------------------------------------------------------------

/// C = max(|mean + 3 sd|, |mean - 3 sd|) of the training targets, with the
/// sample (n - 1) standard deviation.
inline double heuristic_c(std::span<const double> train_targets)
{
    if (train_targets.size() < 2)
        throw InvalidArgument("heuristic_c: need at least 2 targets");
    const double n = static_cast<double>(train_targets.size());
    double mean = 0.0;
    for (double y : train_targets)
        mean += y;
    mean /= n;
    double ss = 0.0;
    for (double y : train_targets)
        ss += (y - mean) * (y - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    return std::max(std::abs(mean + 3.0 * sd), std::abs(mean - 3.0 * sd));
}

/// Fixed pre-sweep RBF width, gamma = 2 sigma^2 = 0.0625.
constexpr double heuristic_gamma() { return 0.0625; }

// --- sweeps ----------------------------------------------------------------------

enum class SvrParam { c, epsilon, gamma };

inline const char* to_string(SvrParam p)
{
    switch (p) {
    case SvrParam::c: return "c";
    case SvrParam::epsilon: return "epsilon";
    case SvrParam::gamma: return "gamma";
    }
    return "?";
}

inline SvrParam svr_param_from_string(std::string_view s)
{
    if (s == "c" || s == "C") return SvrParam::c;
    if (s == "epsilon" || s == "eps") return SvrParam::epsilon;
    if (s == "gamma") return SvrParam::gamma;
    throw InvalidArgument("unknown SVR parameter '" + std::string(s) + "'");
}

inline SvrParams with_value(SvrParams p, SvrParam which, double value)
{
    switch (which) {
    case SvrParam::c: p.c = value; break;
    case SvrParam::epsilon: p.epsilon = value; break;
    case SvrParam::gamma: p.kernel.gamma = value; break;
    }
    return p;
}

/// `count` evenly spaced points from lo to hi inclusive; a single point is lo.
inline std::vector<double> linear_grid(double lo, double hi, std::size_t count)
{
    detail::require(count >= 1, "grid needs at least one point");
    if (count == 1)
        return {lo};
    detail::require(hi > lo, "grid needs hi > lo");
    std::vector<double> grid(count);
    for (std::size_t k = 0; k < count; ++k)
        grid[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
    grid.back() = hi;
    return grid;
}

/// One-at-a-time exploration: `varying` takes each grid value while the
/// other two parameters stay as in `fixed`.
struct SweepSpec {
    SvrParam varying = SvrParam::epsilon;
    SvrParams fixed;
    std::vector<double> grid;

    void validate() const
    {
        detail::require(!grid.empty(), "sweep grid is empty");
        for (std::size_t k = 1; k < grid.size(); ++k)
            detail::require(grid[k] > grid[k - 1], "sweep grid must be strictly increasing");
        fixed.kernel.validate();
    }
};

struct SweepRow {
    double value = 0.0;
    double train_mse = 0.0;
    double test_mse = 0.0;
    std::size_t n_sv = 0;

    bool operator==(const SweepRow&) const = default;
};

inline std::vector<SweepRow> sweep(const SupervisedSet& train, const SupervisedSet& test, const SweepSpec& spec,
                                   const SolverSettings& settings = {})
{
    spec.validate();
    detail::require(train.size() > 0, "sweep: empty training set");
    detail::require(test.size() > 0, "sweep: empty test set");

    const PairwiseTable table(train.features, spec.fixed.kernel.kind);
    std::vector<SweepRow> rows;
    rows.reserve(spec.grid.size());
    for (double value : spec.grid) {
        const auto params = with_value(spec.fixed, spec.varying, value);
        try {
            const auto model = train_svr_with_gram(table.gram(params.kernel), train.features, train.targets, params,
                                                   settings);
            rows.push_back({value, mse(train.targets, predict(model, train.features)),
                            mse(test.targets, predict(model, test.features)), model.n_sv});
        }
        catch (const Error& e) {
            throw SolverError(std::string("sweep failed at ") + to_string(spec.varying) + " = " +
                              text::format_double(value) + ": " + e.what());
        }
    }
    return rows;
}

inline void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows)
{
    out << "value,train_mse,test_mse,n_sv\n";
    for (const auto& r : rows)
        out << text::format_double(r.value) << ',' << text::format_double(r.train_mse) << ','
            << text::format_double(r.test_mse) << ',' << r.n_sv << '\n';
}

/// Smallest and largest grid values whose support-vector fraction
/// n_sv / train_size lies in [lo_frac, hi_frac].
inline std::pair<double, double> select_range_by_sv_fraction(std::span<const SweepRow> rows, std::size_t train_size,
                                                             double lo_frac, double hi_frac)
{
    detail::require(!rows.empty(), "select_range_by_sv_fraction: no rows");
    detail::require(train_size > 0, "select_range_by_sv_fraction: train_size must be positive");
    detail::require(lo_frac >= 0.0 && lo_frac < hi_frac && hi_frac <= 1.0,
                    "select_range_by_sv_fraction: need 0 <= lo_frac < hi_frac <= 1");
    std::optional<double> lo, hi;
    for (const auto& r : rows) {
        const double frac = static_cast<double>(r.n_sv) / static_cast<double>(train_size);
        if (frac < lo_frac || frac > hi_frac)
            continue;
        lo = lo ? std::min(*lo, r.value) : r.value;
        hi = hi ? std::max(*hi, r.value) : r.value;
    }
    if (!lo)
        throw DataError("select_range_by_sv_fraction: no grid value has a support-vector fraction in [" +
                        text::format_double(lo_frac) + ", " + text::format_double(hi_frac) + "]");
    return {*lo, *hi};
}

// --- fitness -----------------------------------------------------------------------

enum class FitnessKind { train_mse, holdout, kfold };

/// What the optimizer minimizes. The test set is never part of it.
struct FitnessSpec {
    FitnessKind kind = FitnessKind::train_mse;
    /// Trailing fraction of the training rows held out (holdout only).
    double fraction = 0.2;
    /// Number of contiguous folds (kfold only).
    std::size_t k = 5;

    void validate() const
    {
        if (kind == FitnessKind::holdout)
            detail::require(fraction > 0.0 && fraction < 1.0, "holdout fraction must lie in (0, 1)");
        if (kind == FitnessKind::kfold)
            detail::require(k >= 2, "kfold needs k >= 2");
    }

    std::string to_string() const
    {
        switch (kind) {
        case FitnessKind::train_mse: return "train_mse";
        case FitnessKind::holdout: return "holdout:" + text::format_double(fraction);
        case FitnessKind::kfold: return "kfold:" + std::to_string(k);
        }
        return "?";
    }

    /// Parses "train_mse", "holdout:<fraction>" or "kfold:<k>".
    static FitnessSpec parse(std::string_view s)
    {
        FitnessSpec spec;
        const auto colon = s.find(':');
        const auto head = s.substr(0, colon);
        const auto arg = colon == std::string_view::npos ? std::string_view{} : s.substr(colon + 1);
        if (head == "train_mse" && arg.empty())
            spec.kind = FitnessKind::train_mse;
        else if (head == "holdout") {
            spec.kind = FitnessKind::holdout;
            if (!arg.empty()) {
                const auto v = text::parse_double(arg);
                detail::require(v.has_value(), "bad holdout fraction '" + std::string(arg) + "'");
                spec.fraction = *v;
            }
        }
        else if (head == "kfold") {
            spec.kind = FitnessKind::kfold;
            if (!arg.empty()) {
                const auto v = text::parse_double(arg);
                detail::require(v.has_value() && *v >= 2 && *v == std::floor(*v), "bad fold count '" + std::string(arg) + "'");
                spec.k = static_cast<std::size_t>(*v);
            }
        }
        else
            throw InvalidArgument("unknown fitness '" + std::string(s) + "' (use train_mse, holdout:F or kfold:K)");
        spec.validate();
        return spec;
    }
};

/// Contiguous chronological blocks; the first n % k blocks get one extra row.
inline std::vector<RowRange> kfold_blocks(std::size_t n, std::size_t k)
{
    detail::require(k >= 2 && k <= n, "kfold_blocks: need 2 <= k <= n");
    std::vector<RowRange> blocks;
    std::size_t start = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t len = n / k + (f < n % k ? 1 : 0);
        blocks.push_back({start, start + len});
        start += len;
    }
    return blocks;
}

/// Training rows used by the optimizer's objective, split into
/// (fit rows, scored rows) pairs according to a FitnessSpec.
class Fitness {
public:
    Fitness(const SupervisedSet& train, const FitnessSpec& spec, const KernelSpec& kernel,
            const SolverSettings& settings)
    {
        spec.validate();
        kernel.validate();
        settings.validate();
        detail::require(train.size() > 0, "make_fitness: empty training set");
        auto state = std::make_shared<State>();
        auto& st = *state;
        st.kernel = kernel;
        st.settings = settings;
        st.features = train.features;
        st.targets = train.targets;
        st.table = PairwiseTable(train.features, kernel.kind);

        const std::size_t n = train.size();
        auto all = [](std::size_t lo, std::size_t hi) {
            std::vector<std::size_t> v;
            for (std::size_t i = lo; i < hi; ++i)
                v.push_back(i);
            return v;
        };
        switch (spec.kind) {
        case FitnessKind::train_mse: st.plans.push_back({all(0, n), all(0, n), {}}); break;
        case FitnessKind::holdout: {
            detail::require(n >= 2, "holdout fitness needs at least 2 training rows");
            auto held = static_cast<std::size_t>(std::llround(spec.fraction * static_cast<double>(n)));
            held = std::clamp<std::size_t>(held, 1, n - 1);
            st.plans.push_back({all(0, n - held), all(n - held, n), {}});
            break;
        }
        case FitnessKind::kfold:
            for (const auto& block : kfold_blocks(n, spec.k)) {
                auto fit = all(0, block.begin);
                const auto tail = all(block.end, n);
                fit.insert(fit.end(), tail.begin(), tail.end());
                st.plans.push_back({std::move(fit), all(block.begin, block.end), {}});
            }
            break;
        }
        for (auto& plan : st.plans) {
            plan.fit_features = Matrix(0, st.features.cols());
            for (auto i : plan.fit)
                plan.fit_features.append_row(st.features.row(i));
        }
        _state = std::move(state);
    }

    /// Objective at (C, epsilon, gamma): mean over plans of the scored-row MSE.
    double operator()(std::span<const double> triple) const
    {
        detail::require(triple.size() == 3, "fitness expects (C, epsilon, gamma)");
        const auto& st = *_state;
        const SvrParams params = to_params(triple);
        double total = 0.0;
        for (const auto& plan : st.plans) {
            std::vector<double> y(plan.fit.size());
            for (std::size_t k = 0; k < plan.fit.size(); ++k)
                y[k] = st.targets[plan.fit[k]];
            const auto model =
                train_svr_with_gram(st.table.gram(params.kernel, plan.fit), plan.fit_features, y, params, st.settings);
            double s = 0.0;
            for (auto i : plan.scored) {
                const double r = st.targets[i] - predict(model, st.features.row(i));
                s += r * r;
            }
            total += s / static_cast<double>(plan.scored.size());
        }
        const double value = total / static_cast<double>(st.plans.size());
        if (!std::isfinite(value))
            throw SolverError("fitness is non-finite at C=" + text::format_double(params.c) +
                              ", epsilon=" + text::format_double(params.epsilon) +
                              ", gamma=" + text::format_double(params.kernel.gamma));
        return value;
    }

    SvrParams to_params(std::span<const double> triple) const
    {
        SvrParams p;
        p.c = triple[0];
        p.epsilon = triple[1];
        p.kernel = _state->kernel;
        p.kernel.gamma = triple[2];
        return p;
    }

    std::size_t plan_count() const { return _state->plans.size(); }
    std::pair<std::vector<std::size_t>, std::vector<std::size_t>> plan(std::size_t k) const
    {
        return {_state->plans.at(k).fit, _state->plans.at(k).scored};
    }

private:
    struct Plan {
        std::vector<std::size_t> fit;
        std::vector<std::size_t> scored;
        Matrix fit_features;
    };
    struct State {
        KernelSpec kernel;
        SolverSettings settings;
        Matrix features;
        std::vector<double> targets;
        PairwiseTable table;
        std::vector<Plan> plans;
    };
    std::shared_ptr<const State> _state;
};

/// Pure, re-entrant objective over (C, epsilon, gamma) built from training
/// data only. `kernel` supplies the kernel kind and any parameters that are
/// not tuned.
inline Fitness make_fitness(const SupervisedSet& train, const FitnessSpec& spec, const KernelSpec& kernel,
                            const SolverSettings& settings = {})
{
    return Fitness(train, spec, kernel, settings);
}

// --- tuning ------------------------------------------------------------------------

enum class TuneMethod { svm_default, de_svm, pso_svm };

inline const char* to_string(TuneMethod m)
{
    switch (m) {
    case TuneMethod::svm_default: return "svm_default";
    case TuneMethod::de_svm: return "de_svm";
    case TuneMethod::pso_svm: return "pso_svm";
    }
    return "?";
}

/// FNV-1a over the exact bit patterns of a set's features and targets.
inline std::uint64_t fingerprint(const SupervisedSet& set)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&](double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xffu;
            h *= 0x100000001b3ULL;
        }
    };
    for (double v : set.features.data())
        feed(v);
    for (double v : set.targets)
        feed(v);
    return h;
}

struct TuneReport {
    TuneMethod method = TuneMethod::svm_default;
    SvrParams optimized;
    double train_mse = 0.0;
    double test_mse = 0.0;
    std::size_t n_sv = 0;
    /// Seconds spent; kept out of the JSON report so reruns are byte-identical.
    double wall_time = 0.0;
    std::optional<ParamBox> box;
    std::optional<FitnessSpec> fitness;
    nlohmann::json optimizer_config;
    std::optional<OptResult> optimizer_history;
    SvrModel model;
    std::uint64_t train_fingerprint = 0;
    std::uint64_t test_fingerprint = 0;
};

/// Trains at fixed parameters and scores on both sets.
inline TuneReport evaluate_params(const SupervisedSet& train, const SupervisedSet& test, const SvrParams& params,
                                  const SolverSettings& settings = {}, TuneMethod method = TuneMethod::svm_default)
{
    const auto start = std::chrono::steady_clock::now();
    TuneReport rep;
    rep.method = method;
    rep.optimized = params;
    rep.model = train_svr(train.features, train.targets, params, settings);
    rep.train_mse = mse(train.targets, predict(rep.model, train.features));
    rep.test_mse = test.size() > 0 ? mse(test.targets, predict(rep.model, test.features)) : 0.0;
    rep.n_sv = rep.model.n_sv;
    rep.train_fingerprint = fingerprint(train);
    rep.test_fingerprint = fingerprint(test);
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

using TuneMethodConfig = std::variant<DeConfig, PsoConfig>;

/// Searches the box with DE or PSO on the fitness built from `train`, then
/// retrains at the best triple. `test` is used for the reported test MSE
/// only.
inline TuneReport tune(const SupervisedSet& train, const SupervisedSet& test, const ParamBox& box,
                       const TuneMethodConfig& method, const FitnessSpec& fitness_spec,
                       const SolverSettings& settings = {}, const KernelSpec& kernel = KernelSpec::rbf(1.0))
{
    const auto start = std::chrono::steady_clock::now();
    const auto space = box.space();
    const auto fitness = make_fitness(train, fitness_spec, kernel, settings);

    OptResult opt;
    nlohmann::json config;
    TuneMethod which;
    if (const auto* de = std::get_if<DeConfig>(&method)) {
        opt = de_optimize(fitness, space, *de);
        config = *de;
        which = TuneMethod::de_svm;
    }
    else {
        const auto& pso = std::get<PsoConfig>(method);
        opt = pso_optimize(fitness, space, pso);
        config = pso;
        which = TuneMethod::pso_svm;
    }

    auto rep = evaluate_params(train, test, fitness.to_params(opt.best_x), settings, which);
    rep.box = box;
    rep.fitness = fitness_spec;
    rep.optimizer_config = std::move(config);
    rep.optimizer_history = std::move(opt);
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

inline std::string hex64(std::uint64_t v)
{
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Report JSON. Wall time and the trained model are written separately.
inline nlohmann::json report_to_json(const TuneReport& r)
{
    nlohmann::json j = {{"method", to_string(r.method)},
                        {"optimized", {{"c", r.optimized.c},
                                       {"epsilon", r.optimized.epsilon},
                                       {"gamma", r.optimized.kernel.gamma}}},
                        {"kernel", r.optimized.kernel},
                        {"train_mse", r.train_mse},
                        {"test_mse", r.test_mse},
                        {"n_sv", r.n_sv},
                        {"train_fingerprint", hex64(r.train_fingerprint)},
                        {"test_fingerprint", hex64(r.test_fingerprint)}};
    if (r.box)
        j["box"] = {{"c", {r.box->c.lo, r.box->c.hi}},
                    {"epsilon", {r.box->epsilon.lo, r.box->epsilon.hi}},
                    {"gamma", {r.box->gamma.lo, r.box->gamma.hi}}};
    if (r.fitness)
        j["fitness"] = r.fitness->to_string();
    if (!r.optimizer_config.is_null())
        j["optimizer"] = r.optimizer_config;
    if (r.optimizer_history)
        j["optimizer_result"] = *r.optimizer_history;
    return j;
}

// --- comparison ----------------------------------------------------------------------

struct ComparisonRow {
    TuneMethod method;
    SvrParams params;
    double train_mse = 0.0;
    double test_mse = 0.0;
    std::size_t n_sv = 0;
};

/// One summary row per method (baseline, DE, PSO order) and a per-test-row
/// prediction table, in original units when a normalizer is given.
struct ComparisonTable {
    std::vector<ComparisonRow> rows;
    std::vector<double> actual;
    /// predicted[m][i] belongs to rows[m] and test row i.
    std::vector<std::vector<double>> predicted;
};

inline ComparisonTable compare_report(std::vector<const TuneReport*> reports, const std::optional<NormalizationMap>& normalizer,
                                      const SupervisedSet& test)
{
    detail::require(!reports.empty(), "compare_report: no reports");
    const auto test_fp = fingerprint(test);
    for (const auto* r : reports)
        if (r->train_fingerprint != reports.front()->train_fingerprint || r->test_fingerprint != test_fp)
            throw DataError("compare_report: reports were produced on different datasets");

    std::stable_sort(reports.begin(), reports.end(),
                     [](const TuneReport* a, const TuneReport* b) { return a->method < b->method; });

    auto to_units = [&](double v) { return normalizer ? normalizer->invert(normalizer->target, v) : v; };
    ComparisonTable table;
    for (double y : test.targets)
        table.actual.push_back(to_units(y));
    for (const auto* r : reports) {
        table.rows.push_back({r->method, r->optimized, r->train_mse, r->test_mse, r->n_sv});
        auto preds = predict(r->model, test.features);
        for (auto& p : preds)
            p = to_units(p);
        table.predicted.push_back(std::move(preds));
    }
    return table;
}

inline void write_comparison_csv(std::ostream& out, const ComparisonTable& table)
{
    out << "method,c,epsilon,gamma,train_mse,test_mse,n_sv\n";
    for (const auto& r : table.rows)
        out << to_string(r.method) << ',' << text::format_double(r.params.c) << ','
            << text::format_double(r.params.epsilon) << ',' << text::format_double(r.params.kernel.gamma) << ','
            << text::format_double(r.train_mse) << ',' << text::format_double(r.test_mse) << ',' << r.n_sv << '\n';
}

inline void write_comparison_predictions_csv(std::ostream& out, const ComparisonTable& table)
{
    out << "actual";
    for (const auto& r : table.rows)
        out << ',' << to_string(r.method);
    out << '\n';
    for (std::size_t i = 0; i < table.actual.size(); ++i) {
        out << text::format_double(table.actual[i]);
        for (const auto& col : table.predicted)
            out << ',' << text::format_double(col[i]);
        out << '\n';
    }
}

} // namespace desvr

#endif
