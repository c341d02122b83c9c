#include <benchmark/benchmark.h>

#include "cfrecs/classifier.hpp"
#include "cfrecs/generator.hpp"
#include "cfrecs/graph.hpp"
#include "cfrecs/rng.hpp"
#include "cfrecs/sampler.hpp"
#include "cfrecs/synth.hpp"

namespace {

cfrecs::Marketplace& bench_market() {
  static cfrecs::Marketplace market = [] {
    cfrecs::SynthConfig cfg;
    cfg.num_users = 200;
    cfg.num_listings = 200;
    return cfrecs::generate_marketplace(cfg);
  }();
  return market;
}

cfrecs::Graph bench_graph() {
  cfrecs::SubgraphSampler sampler(bench_market());
  cfrecs::WalkConfig walk;
  cfrecs::Rng rng(11);
  return sampler.sample(walk, rng).graph;
}

void BM_AdjacencyPipeline(benchmark::State& state) {
  cfrecs::Graph g = bench_graph();
  for (auto _ : state) {
    auto relations = cfrecs::relation_adjacencies(g);
    benchmark::DoNotOptimize(relations);
  }
}
BENCHMARK(BM_AdjacencyPipeline);

void BM_WalkSample(benchmark::State& state) {
  cfrecs::SubgraphSampler sampler(bench_market());
  cfrecs::WalkConfig walk;
  walk.k = static_cast<int>(state.range(0));
  cfrecs::Rng rng(7);
  for (auto _ : state) {
    auto sampled = sampler.sample(walk, rng);
    benchmark::DoNotOptimize(sampled);
  }
}
BENCHMARK(BM_WalkSample)->Arg(8)->Arg(16)->Arg(32);

void BM_ClassifierScore(benchmark::State& state) {
  cfrecs::Graph g = bench_graph();
  cfrecs::ClassifierModel model(bench_market().schema, cfrecs::ClassifierConfig{}, 3);
  for (auto _ : state) {
    double p = model.score(g);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_ClassifierScore);

void BM_GeneratorLoss(benchmark::State& state) {
  cfrecs::Graph g = bench_graph();
  cfrecs::ClassifierModel clf(bench_market().schema, cfrecs::ClassifierConfig{}, 3);
  clf.params().set_trainable(false);
  cfrecs::GeneratorModel gen(bench_market().schema, cfrecs::GeneratorConfig{}, 5);
  cfrecs::LossWeights weights;
  cfrecs::Rng rng(9);
  cfrecs::BackboneInputs inputs = cfrecs::graph_inputs(g, bench_market().schema);
  for (auto _ : state) {
    cfrecs::GeneratorLoss out = cfrecs::generator_loss(g, inputs, gen, clf, weights, rng);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_GeneratorLoss);

}  // namespace

BENCHMARK_MAIN();
