#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>

#include <gtest/gtest.h>

#include <desvr/optim.hpp>

using namespace desvr;

namespace {

double sphere(std::span<const double> x)
{
    double s = 0.0;
    for (double v : x)
        s += v * v;
    return s;
}

double rosenbrock(std::span<const double> x)
{
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < x.size(); ++j)
        s += 100.0 * (x[j + 1] - x[j] * x[j]) * (x[j + 1] - x[j] * x[j]) + (1.0 - x[j]) * (1.0 - x[j]);
    return s;
}

SearchSpace cube(std::size_t d, double lo, double hi)
{
    std::vector<Dimension> dims;
    for (std::size_t j = 0; j < d; ++j)
        dims.push_back({"x" + std::to_string(j), lo, hi});
    return SearchSpace(dims);
}

Population fixed_population(std::vector<std::vector<double>> rows)
{
    Population p;
    p.members = Matrix(0, rows.front().size());
    for (const auto& r : rows)
        p.members.append_row(r);
    return p;
}

bool non_increasing(const OptResult& r)
{
    for (std::size_t g = 1; g < r.history.size(); ++g)
        if (r.history[g].best_f > r.history[g - 1].best_f)
            return false;
    return true;
}

} // namespace

TEST(SearchSpace, RejectsDegenerate)
{
    EXPECT_THROW(SearchSpace({{"a", 1.0, 1.0}}), InvalidArgument);
    EXPECT_THROW(SearchSpace({{"a", 2.0, 1.0}}), InvalidArgument);
    EXPECT_THROW(SearchSpace(std::vector<Dimension>{}), InvalidArgument);
    EXPECT_THROW(SearchSpace({{"a", 0.0, std::numeric_limits<double>::infinity()}}), InvalidArgument);
}

TEST(SearchSpace, ClampAndContains)
{
    const SearchSpace s({{"a", 0, 1}, {"b", -2, 2}});
    std::vector<double> x{1.5, -3};
    EXPECT_FALSE(s.contains(x));
    s.clamp(x);
    EXPECT_EQ(x, (std::vector<double>{1.0, -2.0}));
    EXPECT_TRUE(s.contains(x));
}

TEST(InitPopulation, InsideBoundsAndSeeded)
{
    const SearchSpace s({{"a", 0, 1}});
    const auto p = init_population(s, 4, 3);
    ASSERT_EQ(p.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_GE(p.members(i, 0), 0.0);
        EXPECT_LE(p.members(i, 0), 1.0);
    }
    EXPECT_EQ(init_population(s, 4, 3).members, p.members);
    EXPECT_NE(init_population(s, 4, 4).members, p.members);
    EXPECT_THROW(init_population(s, 3, 3), InvalidArgument);
}

TEST(InitPopulation, LargeBoxStaysInside)
{
    const auto s = cube(3, -1e6, 1e6);
    const auto p = init_population(s, 200, 1);
    for (std::size_t i = 0; i < p.size(); ++i)
        EXPECT_TRUE(s.contains(p.members.row(i)));
}

TEST(DeMutate, ZeroScaleRand)
{
    const auto pop = fixed_population({{0, 0}, {1, 10}, {2, 20}, {3, 30}, {4, 40}});
    DeConfig cfg;
    cfg.f = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        Rng rng(s);
        const auto v = de_mutate(pop, 2, cfg, 0, rng);
        // v must be one of the other members exactly.
        EXPECT_NE(v[0], 2.0);
        EXPECT_EQ(v[1], 10.0 * v[0]);
        EXPECT_EQ(v[0], std::floor(v[0]));
    }
}

TEST(DeMutate, ZeroScaleLocalToBest)
{
    const auto pop = fixed_population({{0, 0}, {1, 10}, {2, 20}, {3, 30}});
    DeConfig cfg;
    cfg.f = 0.0;
    cfg.strategy = DeStrategy::local_to_best_1_bin;
    Rng rng(1);
    EXPECT_EQ(de_mutate(pop, 3, cfg, 0, rng), (std::vector<double>{3, 30}));
}

TEST(DeMutate, IdenticalMembers)
{
    const auto pop = fixed_population({{1.5, -2}, {1.5, -2}, {1.5, -2}, {1.5, -2}});
    for (auto strategy : {DeStrategy::rand_1_bin, DeStrategy::local_to_best_1_bin}) {
        DeConfig cfg;
        cfg.f = 0.9;
        cfg.strategy = strategy;
        Rng rng(2);
        EXPECT_EQ(de_mutate(pop, 1, cfg, 0, rng), (std::vector<double>{1.5, -2}));
    }
}

TEST(DeMutate, Formulas)
{
    // Fixed draws: replay the generator to recover the indices the operator used.
    const auto pop = fixed_population({{0.0}, {1.0}, {4.0}, {9.0}, {16.0}, {25.0}});
    DeConfig cfg;
    cfg.f = 0.5;
    for (std::uint64_t s = 0; s < 30; ++s) {
        Rng rng(s), replay(s);
        const auto v = de_mutate(pop, 1, cfg, 0, rng);
        const auto r0 = detail::draw_excluding(replay, 6, {1});
        const auto r1 = detail::draw_excluding(replay, 6, {1, r0});
        const auto r2 = detail::draw_excluding(replay, 6, {1, r0, r1});
        EXPECT_NE(r0, r1);
        EXPECT_NE(r1, r2);
        EXPECT_NE(r0, r2);
        const double xr0 = double(r0 * r0), xr1 = double(r1 * r1), xr2 = double(r2 * r2);
        EXPECT_DOUBLE_EQ(v[0], xr0 + 0.5 * (xr1 - xr2));
    }
    cfg.strategy = DeStrategy::local_to_best_1_bin;
    for (std::uint64_t s = 0; s < 30; ++s) {
        Rng rng(s), replay(s);
        const auto v = de_mutate(pop, 3, cfg, 5, rng);
        const auto r1 = detail::draw_excluding(replay, 6, {3});
        const auto r2 = detail::draw_excluding(replay, 6, {3, r1});
        EXPECT_DOUBLE_EQ(v[0], 9.0 + 0.5 * (25.0 - 9.0) + 0.5 * double(r1 * r1) - 0.5 * double(r2 * r2));
    }
}

TEST(DeCrossover, RateOneTakesMutant)
{
    const std::vector<double> t{1, 2, 3, 4}, m{5, 6, 7, 8};
    for (std::uint64_t s = 0; s < 10; ++s) {
        Rng rng(s);
        EXPECT_EQ(de_crossover(t, m, 1.0, rng), m);
    }
}

TEST(DeCrossover, RateZeroTakesOneForcedComponent)
{
    const std::vector<double> t{1, 2, 3, 4}, m{5, 6, 7, 8};
    std::vector<int> hits(4, 0);
    for (std::uint64_t s = 0; s < 200; ++s) {
        Rng rng(s);
        const auto trial = de_crossover(t, m, 0.0, rng);
        int from_mutant = 0;
        for (std::size_t j = 0; j < 4; ++j)
            if (trial[j] == m[j]) {
                ++from_mutant;
                ++hits[j];
            }
            else
                EXPECT_EQ(trial[j], t[j]);
        EXPECT_EQ(from_mutant, 1);
    }
    for (int h : hits)
        EXPECT_GT(h, 20);
}

TEST(DeCrossover, SameSources)
{
    const std::vector<double> t{1, 2, 3};
    Rng rng(0);
    EXPECT_EQ(de_crossover(t, t, 0.5, rng), t);
    EXPECT_THROW(de_crossover(t, std::vector<double>{1}, 0.5, rng), InvalidArgument);
}

TEST(DeOptimize, ConstantObjective)
{
    DeConfig cfg;
    cfg.np = 8;
    cfg.g_max = 10;
    const auto r = de_optimize([](std::span<const double>) { return 4.0; }, cube(2, -1, 1), cfg);
    EXPECT_EQ(r.best_f, 4.0);
    ASSERT_EQ(r.history.size(), 11u);
    for (const auto& h : r.history) {
        EXPECT_EQ(h.best_f, 4.0);
        EXPECT_EQ(h.mean_f, 4.0);
    }
    EXPECT_EQ(r.evaluations, 8u * 11u);
}

TEST(DeOptimize, SphereConverges)
{
    DeConfig cfg;
    cfg.seed = 1;
    const auto r = de_optimize(sphere, cube(5, -5, 5), cfg);
    EXPECT_LE(r.best_f, 1e-6);
    EXPECT_TRUE(non_increasing(r));
    EXPECT_EQ(r.evaluations, 30u * 201u);
    EXPECT_EQ(r.best_f, sphere(r.best_x));
}

TEST(DeOptimize, RosenbrockLocalToBest)
{
    DeConfig cfg;
    cfg.seed = 2;
    cfg.np = 40;
    cfg.g_max = 600;
    cfg.cr = 0.7;
    cfg.f = 0.9;
    cfg.strategy = DeStrategy::local_to_best_1_bin;
    const auto r = de_optimize(rosenbrock, cube(3, -2, 2), cfg);
    EXPECT_LE(r.best_f, 1e-4);
    EXPECT_TRUE(non_increasing(r));
}

TEST(DeOptimize, StaysInBounds)
{
    const auto space = cube(2, 3, 4);
    std::mutex mu;
    bool inside = true;
    DeConfig cfg;
    cfg.np = 10;
    cfg.g_max = 30;
    cfg.f = 2.0;
    de_optimize(
        [&](std::span<const double> x) {
            std::lock_guard lock(mu);
            inside = inside && space.contains(x);
            return sphere(x);
        },
        space, cfg);
    EXPECT_TRUE(inside);
}

TEST(DeOptimize, ThreadCountDoesNotChangeResult)
{
    DeConfig cfg;
    cfg.seed = 9;
    cfg.g_max = 40;
    const auto one = de_optimize(rosenbrock, cube(4, -3, 3), cfg);
    cfg.threads = 4;
    EXPECT_EQ(de_optimize(rosenbrock, cube(4, -3, 3), cfg), one);
    cfg.threads = 0;
    EXPECT_EQ(de_optimize(rosenbrock, cube(4, -3, 3), cfg), one);
}

TEST(DeOptimize, TrialWinsTies)
{
    // On a flat objective every trial replaces its target, so the
    // population moves even though fitness never improves.
    std::vector<std::vector<double>> seen;
    DeConfig cfg;
    cfg.np = 4;
    cfg.g_max = 2;
    cfg.cr = 1.0;
    de_optimize(
        [&](std::span<const double> x) {
            seen.emplace_back(x.begin(), x.end());
            return 1.0;
        },
        cube(1, 0, 1), cfg);
    ASSERT_EQ(seen.size(), 12u);
    // Generation-2 trials are built from generation-1 trials, not the
    // initial members: replay the operators to confirm.
    Population pop = init_population(cube(1, 0, 1), 4, 0);
    for (std::size_t g = 1; g <= 2; ++g) {
        Matrix next(4, 1);
        for (std::size_t i = 0; i < 4; ++i) {
            auto rng = Rng::substream(0, g, i);
            auto trial = de_crossover(pop.members.row(i), de_mutate(pop, i, cfg, 0, rng), 1.0, rng);
            cube(1, 0, 1).clamp(trial);
            next(i, 0) = trial[0];
            EXPECT_EQ(seen[4 * g + i][0], trial[0]);
        }
        pop.members = next;
    }
}

TEST(DeOptimize, NonFiniteObjectiveAborts)
{
    DeConfig cfg;
    cfg.np = 5;
    try {
        de_optimize([](std::span<const double> x) { return x[0] > 0.5 ? std::nan("") : 0.0; }, cube(1, 0, 1), cfg);
        FAIL();
    }
    catch (const SolverError& e) {
        EXPECT_NE(std::string(e.what()).find("non-finite"), std::string::npos);
    }
}

TEST(DeOptimize, ObjectiveExceptionsPropagate)
{
    DeConfig cfg;
    cfg.np = 6;
    cfg.threads = 3;
    EXPECT_THROW(de_optimize([](std::span<const double>) -> double { throw DataError("boom"); }, cube(1, 0, 1), cfg),
                 DataError);
}

TEST(DeConfig, Validation)
{
    DeConfig cfg;
    cfg.np = 3;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    cfg = {};
    cfg.cr = 1.5;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    cfg = {};
    cfg.f = -0.1;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    cfg = {};
    cfg.g_max = 0;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    EXPECT_EQ(de_strategy_from_string("local_to_best_1_bin"), DeStrategy::local_to_best_1_bin);
    EXPECT_THROW(de_strategy_from_string("best_2_exp"), InvalidArgument);
}

TEST(PsoOptimize, SphereConverges)
{
    PsoConfig cfg;
    cfg.seed = 1;
    const auto r = pso_optimize(sphere, cube(5, -5, 5), cfg);
    EXPECT_LE(r.best_f, 1e-3);
    EXPECT_TRUE(non_increasing(r));
    EXPECT_EQ(r.evaluations, 30u * 201u);
}

TEST(PsoOptimize, ZeroCoefficientsFreezeSwarm)
{
    PsoConfig cfg;
    cfg.swarm = 5;
    cfg.iters = 4;
    cfg.w = 0.0;
    cfg.c1 = 0.0;
    cfg.c2 = 0.0;
    std::vector<std::vector<double>> seen;
    pso_optimize(
        [&](std::span<const double> x) {
            seen.emplace_back(x.begin(), x.end());
            return sphere(x);
        },
        cube(2, -1, 1), cfg);
    ASSERT_EQ(seen.size(), 25u);
    for (std::size_t t = 2; t <= 4; ++t)
        for (std::size_t i = 0; i < 5; ++i)
            EXPECT_EQ(seen[5 * t + i], seen[5 + i]);
    // Initial positions are the DE initial population for the same seed.
    const auto init = init_population(cube(2, -1, 1), 5, 0);
    for (std::size_t i = 0; i < 5; ++i)
        EXPECT_EQ(seen[i], std::vector<double>(init.members.row(i).begin(), init.members.row(i).end()));
}

TEST(PsoOptimize, OptimumAtStart)
{
    // A box of width 2e-9 around the origin: every particle starts at the optimum up to rounding.
    PsoConfig cfg;
    cfg.swarm = 6;
    cfg.iters = 20;
    const auto r = pso_optimize(sphere, cube(3, -1e-9, 1e-9), cfg);
    EXPECT_LE(r.history.front().best_f, 3e-18);
    EXPECT_TRUE(non_increasing(r));
}

TEST(PsoOptimize, StaysInBoundsAndDeterministic)
{
    const auto space = cube(3, 1, 2);
    std::mutex mu;
    bool inside = true;
    PsoConfig cfg;
    cfg.swarm = 8;
    cfg.iters = 30;
    cfg.threads = 3;
    auto objective = [&](std::span<const double> x) {
        std::lock_guard lock(mu);
        inside = inside && space.contains(x);
        return rosenbrock(x);
    };
    const auto a = pso_optimize(objective, space, cfg);
    cfg.threads = 1;
    const auto b = pso_optimize(objective, space, cfg);
    EXPECT_TRUE(inside);
    EXPECT_EQ(a, b);
}

TEST(PsoConfig, Validation)
{
    PsoConfig cfg;
    cfg.swarm = 1;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    cfg = {};
    cfg.v_max_fraction = 0.0;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    cfg = {};
    cfg.c1 = -1;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
}

TEST(History, CsvAndJson)
{
    DeConfig cfg;
    cfg.np = 4;
    cfg.g_max = 2;
    const auto r = de_optimize(sphere, cube(2, -1, 1), cfg);
    std::ostringstream out;
    write_history_csv(out, r);
    const auto text = out.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "generation,best_f,mean_f");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
    const nlohmann::json j = r;
    EXPECT_EQ(j.at("history").size(), 3u);
    EXPECT_EQ(j.at("evaluations"), 12);
    const nlohmann::json c = cfg;
    EXPECT_EQ(c.at("strategy"), "rand_1_bin");
}

TEST(Rng, Reproducible)
{
    Rng a(5), b(5), c(6);
    for (int k = 0; k < 10; ++k) {
        const auto x = a.next();
        EXPECT_EQ(x, b.next());
        EXPECT_NE(x, c.next());
    }
    Rng u(1);
    for (int k = 0; k < 1000; ++k) {
        const double v = u.uniform();
        EXPECT_GE(v, 0.0);
        EXPECT_LT(v, 1.0);
        EXPECT_LT(u.below(7), 7u);
    }
    EXPECT_EQ(Rng::substream(1, 2, 3).next(), Rng::substream(1, 2, 3).next());
    EXPECT_NE(Rng::substream(1, 2, 3).next(), Rng::substream(1, 3, 2).next());
}
