#include <benchmark/benchmark.h>

#include "motifcrf/crf.hpp"
#include "motifcrf/graph.hpp"
#include "motifcrf/inference.hpp"
#include "motifcrf/rng.hpp"
#include "motifcrf/simulate.hpp"

using namespace motifcrf;

namespace {

SyntheticData make_data(int n_segments, int per, int q, int p, std::uint64_t seed) {
    SimConfig sim;
    sim.n_segments = n_segments;
    sim.instances_min = sim.instances_max = per;
    sim.q = q;
    sim.p = p;
    sim.seed = seed;
    sim.burn_in = 50;
    const CrfParams truth = random_params(p, q, 0.8, seed);
    sim.true_alpha = truth.alpha;
    sim.true_beta = truth.beta;
    return synthesize_corpus(sim);
}

}  // namespace

static void BM_AdjacencyBuild(benchmark::State& state) {
    const std::vector<int> sizes(static_cast<std::size_t>(state.range(0)), 12);
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_adjacency(sizes, GraphConfig{}));
    }
}
BENCHMARK(BM_AdjacencyBuild)->Arg(64)->Arg(256);

static void BM_ObjectiveGradient(benchmark::State& state) {
    const auto data = make_data(static_cast<int>(state.range(0)), 8, 8, 10, 42);
    const PseudoLikelihood pl(data.X, data.Y, neighbor_config(data.adjacency, data.Y),
                              ModelSpec::full());
    const Eigen::VectorXd theta = Eigen::VectorXd::Constant(pl.n_params(), 0.05);
    Eigen::VectorXd grad;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pl.value_and_gradient(theta, grad, PlConfig{}));
    }
}
BENCHMARK(BM_ObjectiveGradient)->Arg(50)->Arg(200);

static void BM_FullFit(benchmark::State& state) {
    const auto data = make_data(static_cast<int>(state.range(0)), 8, 3, 3, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            fit_crf(data.X, data.Y, data.adjacency, ModelSpec::full(), FitConfig{}));
    }
}
BENCHMARK(BM_FullFit)->Arg(50)->Arg(300)->Unit(benchmark::kMillisecond);

static void BM_GibbsSweep(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Eigen::MatrixXd X(n, 4);
    Rng rng(3, 0);
    X.col(0).setOnes();
    for (int i = 0; i < n; ++i)
        for (int j = 1; j < 4; ++j) X(i, j) = rng.normal();
    const CrfParams params = random_params(3, 8, 0.8, 3);
    const BlockDiagonal A = build_adjacency({n}, GraphConfig{});
    GibbsSampler sampler(X, A.blocks[0].W, params, Rng(3, 1));
    for (auto _ : state) {
        sampler.sweep();
        benchmark::DoNotOptimize(sampler.state());
    }
}
BENCHMARK(BM_GibbsSweep)->Arg(8)->Arg(32);

static void BM_BhAdjust(benchmark::State& state) {
    Rng rng(9, 0);
    std::vector<double> p(static_cast<std::size_t>(state.range(0)));
    for (auto& x : p) x = rng.uniform01();
    for (auto _ : state) {
        benchmark::DoNotOptimize(bh_adjust(p));
    }
}
BENCHMARK(BM_BhAdjust)->Arg(100)->Arg(10000);

static void BM_SandwichCovariance(benchmark::State& state) {
    const auto data = make_data(100, 8, 3, 3, 11);
    const FitResult fit =
        fit_crf(data.X, data.Y, data.adjacency, ModelSpec::full(), FitConfig{});
    for (auto _ : state) {
        benchmark::DoNotOptimize(godambe_covariance(data.X, data.Y, data.adjacency, fit.params,
                                                    ModelSpec::full(), data.segment_of,
                                                    data.n_segments));
    }
}
BENCHMARK(BM_SandwichCovariance)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
