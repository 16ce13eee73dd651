#include <benchmark/benchmark.h>

#include "tcasim/config.hpp"

namespace {

using namespace tcasim;

void bench_compute_netc(benchmark::State& state) {
    const Config cfg = default_config();
    Rng rng(7);
    QosSample s = sample_profile(cfg.medium, std::nullopt, rng);
    const NormalizedQos q = normalize(s, cfg.bounds);
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_netc(q, cfg.weights));
    }
}
BENCHMARK(bench_compute_netc);

void bench_trust_step(benchmark::State& state) {
    const Config cfg = default_config();
    Rng rng(7);
    TrustState t{5};
    for (auto _ : state) {
        const TransitionProbs p = transition_probs(0.85, 0.4, 1.1, cfg.trust);
        t = step_trust(t, p, rng);
        benchmark::DoNotOptimize(t);
    }
}
BENCHMARK(bench_trust_step);

void bench_forest_predict(benchmark::State& state) {
    const Config cfg = default_config();
    DatasetParams dp;
    dp.n_examples = 600;
    const auto ds = generate_dataset(cfg.context(), dp, 11);
    ForestHyperparams hp = cfg.forest;
    hp.n_trees = 20;
    const Forest forest = train_forest(ds, hp, 11);
    const FeatureVector f = ds.front().features;
    for (auto _ : state) {
        benchmark::DoNotOptimize(predict(forest, f));
    }
}
BENCHMARK(bench_forest_predict);

void bench_forest_train(benchmark::State& state) {
    const Config cfg = default_config();
    DatasetParams dp;
    dp.n_examples = static_cast<int>(state.range(0));
    const auto ds = generate_dataset(cfg.context(), dp, 11);
    ForestHyperparams hp = cfg.forest;
    hp.n_trees = 10;
    for (auto _ : state) {
        benchmark::DoNotOptimize(train_forest(ds, hp, 11));
    }
}
BENCHMARK(bench_forest_train)->Arg(500)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

void bench_run_simulation(benchmark::State& state) {
    Config cfg = default_config();
    cfg.sim.n_nodes = static_cast<int>(state.range(0));
    const SimContext ctx = cfg.context();
    const Predictor pred;
    std::uint64_t seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_simulation(ctx, Mode::Tca, pred, seed++));
    }
}
BENCHMARK(bench_run_simulation)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
