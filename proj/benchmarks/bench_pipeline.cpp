#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "claimtrace/dataset.hpp"
#include "claimtrace/grounding.hpp"
#include "claimtrace/mock_backend.hpp"
#include "claimtrace/segmentation.hpp"

using namespace claimtrace;

namespace {

std::vector<GoldInstance> corpus() {
  return load_instances(std::filesystem::path(CLAIMTRACE_FIXTURE_DIR) / "synthetic.jsonl");
}

std::string long_document(std::size_t sentences) {
  const std::vector<std::string> pool{
      "Metformin lowers fasting glucose in adults with type 2 diabetes.",
      "The trial (n = 412, p < 0.01) enrolled patients from Jan. to Sept. 2019.",
      "Dr. Smith et al. reported a 24 h. delay in onset.",
      "Vaccination reduces influenza transmission; e.g. in care homes.",
  };
  std::string out;
  for (std::size_t i = 0; i < sentences; ++i) out += pool[i % pool.size()] + " ";
  return out;
}

EmbeddingVector random_unit(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> normal;
  std::vector<double> v(dim);
  for (auto& x : v) x = normal(rng);
  return EmbeddingVector(std::move(v));
}

void BM_SplitSentences(benchmark::State& state) {
  const std::string doc = long_document(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(split_sentences(doc));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(doc.size()));
}
BENCHMARK(BM_SplitSentences)->Arg(10)->Arg(100)->Arg(1000);

void BM_ScoreMatrix(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(7);
  std::vector<EmbeddingVector> claims, context;
  for (std::size_t i = 0; i < 8; ++i) claims.push_back(random_unit(rng, 768));
  for (std::size_t j = 0; j < n; ++j) context.push_back(random_unit(rng, 768));
  for (auto _ : state) benchmark::DoNotOptimize(score_matrix(claims, context));
}
BENCHMARK(BM_ScoreMatrix)->Arg(16)->Arg(128)->Arg(1024);

void BM_GroundResponseMock(benchmark::State& state) {
  const auto instances = corpus();
  GroundingConfig config;
  config.backends = make_mock_backends();
  for (auto _ : state) {
    for (const auto& inst : instances) {
      benchmark::DoNotOptimize(ground_response(inst.response, inst.context_sentences, config));
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(instances.size()));
}
BENCHMARK(BM_GroundResponseMock);

}  // namespace

BENCHMARK_MAIN();
