#include <benchmark/benchmark.h>

#include "xling/alignment.hpp"
#include "xling/intrinsic.hpp"
#include "xling/synthetic.hpp"
#include "xling/tagger.hpp"

namespace {

using namespace xling;

SyntheticWorld bench_world(std::size_t vocab, Eigen::Index dim) {
  SyntheticWorldConfig config;
  config.vocab_size = vocab;
  config.dim = dim;
  config.dict_train = vocab / 4;
  config.dict_test = vocab / 10;
  config.seed = 99;
  return generate_world(config);
}

void BM_FitProcrustes(benchmark::State& state) {
  SyntheticWorld world = bench_world(2000, state.range(0));
  PairedMatrix pm =
      pair_matrices(world.gold_train, world.source_space, world.target_space);
  for (auto _ : state) {
    ProjectionMap map = fit_procrustes(pm);
    benchmark::DoNotOptimize(map.W);
  }
}
BENCHMARK(BM_FitProcrustes)->Arg(50)->Arg(150);

void BM_FitCca(benchmark::State& state) {
  SyntheticWorld world = bench_world(2000, state.range(0));
  PairedMatrix pm =
      pair_matrices(world.gold_train, world.source_space, world.target_space);
  for (auto _ : state) {
    ProjectionMap map = fit_cca(pm, 1.0, kAutoRidge);
    benchmark::DoNotOptimize(map.W);
  }
}
BENCHMARK(BM_FitCca)->Arg(50)->Arg(150);

void BM_PrecisionAt1(benchmark::State& state) {
  SyntheticWorld world = bench_world(state.range(0), 50);
  PairedMatrix pm =
      pair_matrices(world.gold_train, world.source_space, world.target_space);
  ProjectionMap map = fit_procrustes(pm);
  EmbeddingSpace projected = project_space(world.source_space, map);
  TranslationTestSet test;
  for (const auto& [src, tgt] : world.gold_test.pairs)
    if (test.gold[src].insert(tgt).second) ++test.pair_count;
  for (auto _ : state) {
    P1Report report = precision_at_1(projected, world.target_space, test);
    benchmark::DoNotOptimize(report.p_at_1);
  }
}
BENCHMARK(BM_PrecisionAt1)->Arg(1000)->Arg(5000);

void BM_ViterbiDecode(benchmark::State& state) {
  SyntheticWorld world = bench_world(1000, 50);
  generate_tagged_corpora(world, 50, 5);
  std::map<std::string, const EmbeddingSpace*> spaces = {
      {"en", &world.target_space}};
  TaggerModel model = train_tagger({world.target_corpus}, spaces, 2, 1, 1);
  Eigen::MatrixXd feats =
      featurize(world.target_corpus.sequences[0], world.target_space, 1);
  for (auto _ : state) {
    auto labels = viterbi_decode(model, feats);
    benchmark::DoNotOptimize(labels);
  }
}
BENCHMARK(BM_ViterbiDecode);

}  // namespace

BENCHMARK_MAIN();
