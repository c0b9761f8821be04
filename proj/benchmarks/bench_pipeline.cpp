#include <benchmark/benchmark.h>

#include <vector>

#include "pimu/features.hpp"
#include "pimu/stream.hpp"
#include "pimu/synth.hpp"
#include "pimu/tsf.hpp"

namespace {

using namespace pimu;

const labeled_sequence& bench_sequence() {
    static const labeled_sequence seq = [] {
        synth_params p;
        p.seed = 42;
        return generate_sequence(p, 60.0, 60.0);
    }();
    return seq;
}

const std::vector<labeled_window>& bench_corpus() {
    static const std::vector<labeled_window> corpus = [] {
        dataset_grid grid;
        grid.mode = feature_mode::combined;
        return generate_dataset(grid, 100, 7);
    }();
    return corpus;
}

const forest& bench_forest(std::size_t n_trees) {
    static forest f50 = [] {
        forest_params params;
        params.n_trees = 50;
        params.seed = 1;
        return forest::train(bench_corpus(), feature_mode::combined, params);
    }();
    static forest f500 = [] {
        forest_params params;
        params.n_trees = 500;
        params.seed = 1;
        return forest::train(bench_corpus(), feature_mode::combined, params);
    }();
    return n_trees == 500 ? f500 : f50;
}

void BM_central_second_difference(benchmark::State& state) {
    std::vector<double> series(52);
    for (std::size_t i = 0; i < series.size(); ++i) series[i] = std::sin(0.3 * (double)i);
    for (auto _ : state) {
        benchmark::DoNotOptimize(central_second_difference(series, 0.1));
    }
}
BENCHMARK(BM_central_second_difference);

void BM_extract_features(benchmark::State& state) {
    const auto mode = static_cast<feature_mode>(state.range(0));
    const auto window =
        std::span<const pose_frame>(bench_sequence().sequence.frames).subspan(0, 52);
    for (auto _ : state) {
        benchmark::DoNotOptimize(extract_features(window, mode));
    }
}
BENCHMARK(BM_extract_features)->Arg(0)->Arg(1)->Arg(2);

void BM_forest_predict(benchmark::State& state) {
    const forest& model = bench_forest(static_cast<std::size_t>(state.range(0)));
    const feature_matrix& window = bench_corpus().front().features;
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.classify(window));
    }
}
BENCHMARK(BM_forest_predict)->Arg(50)->Arg(500);

void BM_forest_train(benchmark::State& state) {
    forest_params params;
    params.n_trees = static_cast<std::size_t>(state.range(0));
    params.seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(forest::train(bench_corpus(), feature_mode::combined, params));
    }
}
BENCHMARK(BM_forest_train)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

// Whole per-frame pipeline cost in steady state: window update, feature
// extraction, 500-tree vote, consistency check.
void BM_stream_push_frame(benchmark::State& state) {
    const forest& model = bench_forest(500);
    stream_driver driver(model, model.layout(), {}, {});
    const auto& frames = bench_sequence().sequence.frames;
    std::size_t i = 0;
    for (const pose_frame& f : frames) {  // prefill the window
        driver.push_frame(f);
        if (++i == 60) break;
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(driver.push_frame(frames[i]));
        if (++i == frames.size()) i = 60;
    }
}
BENCHMARK(BM_stream_push_frame);

}  // namespace

BENCHMARK_MAIN();
