#include <benchmark/benchmark.h>

#include "chunkcrew/chunker.hpp"
#include "chunkcrew/corpus.hpp"
#include "chunkcrew/generators.hpp"
#include "chunkcrew/leader.hpp"
#include "chunkcrew/normalize.hpp"
#include "chunkcrew/testcase.hpp"

namespace {

using namespace crew;

std::string make_text(std::size_t tokens) {
  Corpus corpus = Corpus::synthetic(tokens / 250 + 1, 200, 300, 11);
  std::string text;
  for (const auto& d : corpus.docs) {
    text += d;
    text += "\n\n";
  }
  return text;
}

void BM_Partition(benchmark::State& state) {
  const std::string text = make_text(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(partition(text, 2000));
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Partition)->Arg(8000)->Arg(32000)->Arg(128000);

void BM_Normalize(benchmark::State& state) {
  const std::string s = "  The   Yale Law Journal!  ";
  for (auto _ : state) {
    benchmark::DoNotOptimize(normalize_answer(s));
  }
}
BENCHMARK(BM_Normalize);

void BM_OrchestratePasskey(benchmark::State& state) {
  const TestCase tc = gen_passkey(static_cast<std::size_t>(state.range(0)), 0.5, 42);
  const TaskSpec task = task_from_case(tc);
  OrchestratorConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(orchestrate(task, tc.document, config));
  }
}
BENCHMARK(BM_OrchestratePasskey)->Arg(8000)->Arg(32000);

void BM_GenerateSingleCase(benchmark::State& state) {
  const Corpus corpus = Corpus::synthetic(200, 200, 600, 3);
  const auto needles = synthetic_single_needles(8, 3);
  PlacementPlan plan{static_cast<std::size_t>(state.range(0)), {0.5}};
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_single_doc_case(needles[0], corpus, plan, seed++));
  }
}
BENCHMARK(BM_GenerateSingleCase)->Arg(8000)->Arg(32000);

}  // namespace

BENCHMARK_MAIN();
