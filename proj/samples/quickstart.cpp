// Tunes an SVR next-day price model on a synthetic price series and compares
// it with the untuned default model.

#include <cstdio>

#include <desvr/desvr.hpp>

int main()
{
    using namespace desvr;

    const auto series = synthetic::random_walk_series(701, 7);
    const auto set = build_supervised(series);
    const auto data = prepare(set, {500, 200}, NormalizeOptions{});

    const auto baseline = evaluate_params(data.train, data.test, default_svr_params());

    DeConfig de;
    de.np = 12;
    de.g_max = 20;
    de.cr = 0.7;
    de.f = 0.9;
    de.strategy = DeStrategy::local_to_best_1_bin;
    de.seed = 7;
    const ParamBox box{{0.1, 100.0}, {0.001, 0.2}, {0.01, 2.0}};
    const auto tuned = tune(data.train, data.test, box, de, FitnessSpec::parse("holdout:0.2"));

    for (const auto* r : {&baseline, &tuned})
        std::printf("%-12s C=%-9.4g epsilon=%-9.4g gamma=%-9.4g test_mse=%.5g n_sv=%zu\n", to_string(r->method),
                    r->optimized.c, r->optimized.epsilon, r->optimized.kernel.gamma, r->test_mse, r->n_sv);

    // Predictions come out normalized; the target record maps them back to prices.
    const auto& map = *data.normalizer;
    const double first = predict(tuned.model, data.test.features.row(0));
    std::printf("first test day: actual %.2f, predicted %.2f\n", map.invert(map.target, data.test.targets[0]),
                map.invert(map.target, first));
}
