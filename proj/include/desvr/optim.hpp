#ifndef DESVR_OPTIM_HPP
#define DESVR_OPTIM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "matrix.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "text.hpp"

namespace desvr {

struct Dimension {
    std::string name;
    double lo = 0.0;
    double hi = 1.0;

    bool operator==(const Dimension&) const = default;
};

/// Axis-aligned box to search in.
class SearchSpace {
public:
    SearchSpace() = default;

    explicit SearchSpace(std::vector<Dimension> dims) : _dims(std::move(dims))
    {
        detail::require(!_dims.empty(), "SearchSpace: at least one dimension required");
        for (const auto& d : _dims)
            detail::require(std::isfinite(d.lo) && std::isfinite(d.hi) && d.hi > d.lo,
                            "SearchSpace: dimension '" + d.name + "' needs finite bounds with hi > lo");
    }

    std::size_t size() const { return _dims.size(); }
    const std::vector<Dimension>& dims() const { return _dims; }
    const Dimension& operator[](std::size_t j) const { return _dims[j]; }

    void clamp(std::span<double> x) const
    {
        for (std::size_t j = 0; j < x.size(); ++j)
            x[j] = std::clamp(x[j], _dims[j].lo, _dims[j].hi);
    }

    bool contains(std::span<const double> x) const
    {
        for (std::size_t j = 0; j < x.size(); ++j)
            if (!(x[j] >= _dims[j].lo && x[j] <= _dims[j].hi))
                return false;
        return x.size() == _dims.size();
    }

private:
    std::vector<Dimension> _dims;
};

enum class DeStrategy { rand_1_bin, local_to_best_1_bin };

inline const char* to_string(DeStrategy s)
{
    return s == DeStrategy::rand_1_bin ? "rand_1_bin" : "local_to_best_1_bin";
}

inline DeStrategy de_strategy_from_string(std::string_view s)
{
    if (s == "rand_1_bin" || s == "rand/1/bin")
        return DeStrategy::rand_1_bin;
    if (s == "local_to_best_1_bin" || s == "local-to-best/1/bin")
        return DeStrategy::local_to_best_1_bin;
    throw InvalidArgument("unknown DE strategy '" + std::string(s) + "'");
}

struct DeConfig {
    std::size_t np = 30;
    double f = 0.5;
    double cr = 0.9;
    DeStrategy strategy = DeStrategy::rand_1_bin;
    std::size_t g_max = 200;
    std::uint64_t seed = 0;
    /// Fitness-evaluation workers; 0 means all cores. Never affects results.
    unsigned threads = 1;

    void validate() const
    {
        detail::require(np >= 4, "DE population size must be >= 4");
        detail::require(std::isfinite(f) && f >= 0.0, "DE scale factor F must be finite and >= 0");
        detail::require(cr >= 0.0 && cr <= 1.0, "DE crossover rate CR must lie in [0, 1]");
        detail::require(g_max >= 1, "DE generation cap must be >= 1");
    }
};

/// Global-best PSO settings. Defaults are the constriction-equivalent
/// coefficients w = 0.729, c1 = c2 = 1.494.
struct PsoConfig {
    std::size_t swarm = 30;
    double w = 0.729;
    double c1 = 1.494;
    double c2 = 1.494;
    std::size_t iters = 200;
    /// Velocity clamp per dimension, as a fraction of the dimension's span.
    double v_max_fraction = 0.5;
    std::uint64_t seed = 0;
    unsigned threads = 1;

    void validate() const
    {
        detail::require(swarm >= 2, "PSO swarm size must be >= 2");
        detail::require(iters >= 1, "PSO iteration count must be >= 1");
        detail::require(std::isfinite(w), "PSO inertia weight must be finite");
        detail::require(c1 >= 0.0 && c2 >= 0.0, "PSO acceleration coefficients must be >= 0");
        detail::require(v_max_fraction > 0.0 && v_max_fraction <= 1.0, "PSO v_max_fraction must lie in (0, 1]");
    }
};

/// One row per member; fitness is filled in once members are evaluated.
struct Population {
    Matrix members;
    std::vector<double> fitness;
    std::size_t generation = 0;

    std::size_t size() const { return members.rows(); }
};

struct HistoryEntry {
    std::size_t generation = 0;
    double best_f = 0.0;
    double mean_f = 0.0;

    bool operator==(const HistoryEntry&) const = default;
};

struct OptResult {
    std::vector<double> best_x;
    double best_f = std::numeric_limits<double>::infinity();
    /// Entry 0 describes the initial population.
    std::vector<HistoryEntry> history;
    std::size_t evaluations = 0;

    bool operator==(const OptResult&) const = default;
};

namespace detail {

inline Matrix random_positions(const SearchSpace& space, std::size_t count, std::uint64_t seed)
{
    Matrix m(count, space.size());
    for (std::size_t i = 0; i < count; ++i) {
        auto rng = Rng::substream(seed, 0, i);
        for (std::size_t j = 0; j < space.size(); ++j)
            m(i, j) = std::min(rng.uniform(space[j].lo, space[j].hi), space[j].hi);
    }
    return m;
}

/// Evaluates every row of `points`; a non-finite value aborts with the
/// offending point in the message.
template <typename Objective>
std::vector<double> evaluate_all(const Objective& objective, const Matrix& points, unsigned threads)
{
    std::vector<double> out(points.rows());
    parallel_for(points.rows(), threads, [&](std::size_t i) {
        const double v = objective(points.row(i));
        if (!std::isfinite(v)) {
            std::string where;
            for (double x : points.row(i))
                where += (where.empty() ? "" : ", ") + text::format_double(x);
            throw SolverError("objective returned a non-finite value at (" + where + ")");
        }
        out[i] = v;
    });
    return out;
}

inline HistoryEntry summarize(std::size_t generation, double best, std::span<const double> fitness)
{
    double sum = 0.0;
    for (double v : fitness)
        sum += v;
    return {generation, best, sum / static_cast<double>(fitness.size())};
}

/// Draws an index in [0, n) different from every entry of `excluded`.
inline std::size_t draw_excluding(Rng& rng, std::size_t n, std::initializer_list<std::size_t> excluded)
{
    for (;;) {
        const auto r = static_cast<std::size_t>(rng.below(n));
        if (std::find(excluded.begin(), excluded.end(), r) == excluded.end())
            return r;
    }
}

} // namespace detail

/// Uniform random population inside the box. Member i is drawn from its own
/// substream, so the result depends only on (space, np, seed).
inline Population init_population(const SearchSpace& space, std::size_t np, std::uint64_t seed)
{
    detail::require(np >= 4, "init_population: population size must be >= 4");
    return {detail::random_positions(space, np, seed), {}, 0};
}

/// Mutant vector for member `target`.
///   rand/1:          v = x_r0 + F (x_r1 - x_r2),            r0, r1, r2 distinct, != target
///   local-to-best/1: v = x_i + F (x_best - x_i) + F (x_r1 - x_r2),  r1, r2 distinct, != target
inline std::vector<double> de_mutate(const Population& pop, std::size_t target, const DeConfig& config,
                                     std::size_t best, Rng& rng)
{
    const std::size_t np = pop.size();
    detail::require(np >= 4, "de_mutate: population too small to draw distinct indices");
    detail::require(target < np && best < np, "de_mutate: index out of range");

    const std::size_t d = pop.members.cols();
    std::vector<double> v(d);
    const auto x = [&](std::size_t r) { return pop.members.row(r); };
    if (config.strategy == DeStrategy::rand_1_bin) {
        const auto r0 = detail::draw_excluding(rng, np, {target});
        const auto r1 = detail::draw_excluding(rng, np, {target, r0});
        const auto r2 = detail::draw_excluding(rng, np, {target, r0, r1});
        for (std::size_t j = 0; j < d; ++j)
            v[j] = x(r0)[j] + config.f * (x(r1)[j] - x(r2)[j]);
    }
    else {
        const auto r1 = detail::draw_excluding(rng, np, {target});
        const auto r2 = detail::draw_excluding(rng, np, {target, r1});
        for (std::size_t j = 0; j < d; ++j)
            v[j] = x(target)[j] + config.f * (x(best)[j] - x(target)[j]) + config.f * (x(r1)[j] - x(r2)[j]);
    }
    return v;
}

/// Binomial crossover. Component j comes from the mutant when u_j <= cr
/// (u_j uniform in [0, 1)) or j is the forced index j_rand.
inline std::vector<double> de_crossover(std::span<const double> target, std::span<const double> mutant, double cr,
                                        Rng& rng)
{
    if (target.size() != mutant.size())
        throw InvalidArgument("de_crossover: dimension mismatch");
    const auto j_rand = static_cast<std::size_t>(rng.below(target.size()));
    std::vector<double> trial(target.begin(), target.end());
    for (std::size_t j = 0; j < target.size(); ++j)
        if (rng.uniform() <= cr || j == j_rand)
            trial[j] = mutant[j];
    return trial;
}

/// Differential Evolution with one-to-one greedy selection.
///
/// Each generation builds every trial vector from the current population
/// (mutate, crossover, clamp to the box), evaluates the trials, and then
/// replaces member i by its trial when the trial is no worse. All random
/// draws for member i in generation g come from substream (seed, g, i), and
/// selection runs in index order after all evaluations finish, so the
/// result does not depend on config.threads.
template <typename Objective>
OptResult de_optimize(const Objective& objective, const SearchSpace& space, const DeConfig& config)
{
    config.validate();
    Population pop = init_population(space, config.np, config.seed);
    pop.fitness = detail::evaluate_all(objective, pop.members, config.threads);

    OptResult result;
    result.evaluations = config.np;
    auto best_index = [&] {
        return static_cast<std::size_t>(std::min_element(pop.fitness.begin(), pop.fitness.end()) - pop.fitness.begin());
    };
    result.history.push_back(detail::summarize(0, pop.fitness[best_index()], pop.fitness));

    Matrix trials(config.np, space.size());
    for (std::size_t g = 1; g <= config.g_max; ++g) {
        const std::size_t best = best_index();
        for (std::size_t i = 0; i < config.np; ++i) {
            auto rng = Rng::substream(config.seed, g, i);
            const auto mutant = de_mutate(pop, i, config, best, rng);
            auto trial = de_crossover(pop.members.row(i), mutant, config.cr, rng);
            space.clamp(trial);
            std::copy(trial.begin(), trial.end(), trials.row(i).begin());
        }
        const auto trial_fitness = detail::evaluate_all(objective, trials, config.threads);
        result.evaluations += config.np;

        for (std::size_t i = 0; i < config.np; ++i)
            if (trial_fitness[i] <= pop.fitness[i]) {
                std::copy(trials.row(i).begin(), trials.row(i).end(), pop.members.row(i).begin());
                pop.fitness[i] = trial_fitness[i];
            }
        pop.generation = g;
        result.history.push_back(detail::summarize(g, pop.fitness[best_index()], pop.fitness));
    }

    const std::size_t best = best_index();
    result.best_f = pop.fitness[best];
    result.best_x.assign(pop.members.row(best).begin(), pop.members.row(best).end());
    return result;
}

/// Global-best particle swarm.
///
///   v <- w v + c1 r1 (pbest - x) + c2 r2 (gbest - x)
///   x <- x + v
///
/// r1, r2 are fresh per component and step. Velocities are clamped to
/// +-v_max_fraction * span and positions to the box. Personal and global
/// bests change only on strict improvement and are updated in index order
/// after the whole swarm has been evaluated.
template <typename Objective>
OptResult pso_optimize(const Objective& objective, const SearchSpace& space, const PsoConfig& config)
{
    config.validate();
    const std::size_t n = config.swarm, d = space.size();

    std::vector<double> v_max(d);
    for (std::size_t j = 0; j < d; ++j)
        v_max[j] = config.v_max_fraction * (space[j].hi - space[j].lo);

    // Generation indices start at 0, so the all-ones key never collides.
    constexpr std::uint64_t velocity_stream = ~std::uint64_t{0};
    Matrix x = detail::random_positions(space, n, config.seed);
    Matrix v(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        auto rng = Rng::substream(config.seed, velocity_stream, i);
        for (std::size_t j = 0; j < d; ++j)
            v(i, j) = rng.uniform(-v_max[j], v_max[j]);
    }

    auto fitness = detail::evaluate_all(objective, x, config.threads);
    Matrix pbest = x;
    std::vector<double> pbest_f = fitness;
    std::size_t gbest = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (pbest_f[i] < pbest_f[gbest])
            gbest = i;
    std::vector<double> gbest_x(pbest.row(gbest).begin(), pbest.row(gbest).end());
    double gbest_f = pbest_f[gbest];

    OptResult result;
    result.evaluations = n;
    result.history.push_back(detail::summarize(0, gbest_f, fitness));

    for (std::size_t t = 1; t <= config.iters; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            auto rng = Rng::substream(config.seed, t, i);
            for (std::size_t j = 0; j < d; ++j) {
                const double r1 = rng.uniform(), r2 = rng.uniform();
                double vel = config.w * v(i, j) + config.c1 * r1 * (pbest(i, j) - x(i, j)) +
                             config.c2 * r2 * (gbest_x[j] - x(i, j));
                vel = std::clamp(vel, -v_max[j], v_max[j]);
                v(i, j) = vel;
                x(i, j) = std::clamp(x(i, j) + vel, space[j].lo, space[j].hi);
            }
        }
        fitness = detail::evaluate_all(objective, x, config.threads);
        result.evaluations += n;

        for (std::size_t i = 0; i < n; ++i)
            if (fitness[i] < pbest_f[i]) {
                pbest_f[i] = fitness[i];
                std::copy(x.row(i).begin(), x.row(i).end(), pbest.row(i).begin());
            }
        for (std::size_t i = 0; i < n; ++i)
            if (pbest_f[i] < gbest_f) {
                gbest_f = pbest_f[i];
                gbest_x.assign(pbest.row(i).begin(), pbest.row(i).end());
            }
        result.history.push_back(detail::summarize(t, gbest_f, fitness));
    }

    result.best_f = gbest_f;
    result.best_x = std::move(gbest_x);
    return result;
}

inline void write_history_csv(std::ostream& out, const OptResult& result)
{
    out << "generation,best_f,mean_f\n";
    for (const auto& h : result.history)
        out << h.generation << ',' << text::format_double(h.best_f) << ',' << text::format_double(h.mean_f) << '\n';
}

inline void to_json(nlohmann::json& j, const OptResult& r)
{
    auto history = nlohmann::json::array();
    for (const auto& h : r.history)
        history.push_back({{"generation", h.generation}, {"best_f", h.best_f}, {"mean_f", h.mean_f}});
    j = {{"best_x", r.best_x}, {"best_f", r.best_f}, {"evaluations", r.evaluations}, {"history", history}};
}

inline void to_json(nlohmann::json& j, const DeConfig& c)
{
    j = {{"np", c.np}, {"f", c.f}, {"cr", c.cr}, {"strategy", to_string(c.strategy)}, {"g_max", c.g_max},
         {"seed", c.seed}};
}

inline void to_json(nlohmann::json& j, const PsoConfig& c)
{
    j = {{"swarm", c.swarm}, {"w", c.w},         {"c1", c.c1}, {"c2", c.c2}, {"iters", c.iters},
         {"v_max_fraction", c.v_max_fraction}, {"topology", "gbest"}, {"seed", c.seed}};
}

} // namespace desvr

#endif
