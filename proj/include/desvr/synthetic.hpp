#ifndef DESVR_SYNTHETIC_HPP
#define DESVR_SYNTHETIC_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>

#include "dataset.hpp"
#include "random.hpp"

namespace desvr::synthetic {

struct RandomWalkOptions {
    double start_price = 100.0;
    /// Daily log-return drift and volatility.
    double drift = 0.0005;
    double volatility = 0.015;
    double mean_volume = 2.0e7;
    Date first_day = Date{std::chrono::year{2009} / 7 / 17};
};

/// Daily OHLCV series following a geometric random walk, on consecutive
/// weekdays. Every row satisfies the RawSeries invariants.
inline RawSeries random_walk_series(std::size_t days, std::uint64_t seed, const RandomWalkOptions& opt = {})
{
    Rng rng(seed);
    std::vector<PriceBar> rows;
    rows.reserve(days);
    Date day = opt.first_day;
    double prev_close = opt.start_price;
    for (std::size_t t = 0; t < days; ++t) {
        while (std::chrono::weekday{day} == std::chrono::Saturday || std::chrono::weekday{day} == std::chrono::Sunday)
            day += std::chrono::days{1};
        PriceBar bar;
        bar.date = day;
        bar.open = prev_close * std::exp(0.3 * opt.volatility * rng.normal());
        bar.close = bar.open * std::exp(opt.drift + opt.volatility * rng.normal());
        bar.high = std::max(bar.open, bar.close) * (1.0 + 0.4 * opt.volatility * std::abs(rng.normal()));
        bar.low = std::min(bar.open, bar.close) * (1.0 - 0.4 * opt.volatility * std::abs(rng.normal()));
        bar.adj_close = bar.close;
        bar.volume = std::round(opt.mean_volume * std::exp(0.3 * rng.normal()));
        rows.push_back(bar);
        prev_close = bar.close;
        day += std::chrono::days{1};
    }
    return make_series(std::move(rows));
}

/// y = sin(x) + noise on n evenly spaced points of [0, 2 pi].
inline SupervisedSet noisy_sine(std::size_t n, double noise, std::uint64_t seed)
{
    Rng rng(seed);
    SupervisedSet set;
    set.column_names = {"x"};
    set.target_name = "y";
    set.features = Matrix(n, 1);
    set.targets.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = n > 1 ? 6.283185307179586 * static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
        set.features(i, 0) = x;
        set.targets[i] = std::sin(x) + noise * rng.normal();
    }
    return set;
}

} // namespace desvr::synthetic

#endif
