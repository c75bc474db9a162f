// Acceptance gate: one line per criterion, exit code = number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "chunkcrew/chunker.hpp"
#include "chunkcrew/errors.hpp"
#include "chunkcrew/eval.hpp"
#include "chunkcrew/generators.hpp"
#include "chunkcrew/leader.hpp"
#include "chunkcrew/member.hpp"
#include "chunkcrew/protocol.hpp"
#include "chunkcrew/rng.hpp"
#include "chunkcrew/testcase.hpp"
#include "chunkcrew/tokenizer.hpp"
#include "mock_server.hpp"

using namespace crew;

namespace {

int failures = 0;

void report(int number, bool ok, const std::string& description) {
  std::printf("criterion %d: %s - %s\n", number, ok ? "PASS" : "FAIL", description.c_str());
  if (!ok) ++failures;
}

void run_criterion(int number, const std::string& description,
                   const std::function<bool()>& body) {
  bool ok = false;
  std::string suffix;
  try {
    ok = body();
  } catch (const std::exception& e) {
    suffix = std::string(" (exception: ") + e.what() + ")";
  }
  report(number, ok, description + suffix);
}

OrchestratorConfig fabricating_config(std::uint64_t seed) {
  OrchestratorConfig config;
  config.chunk_size = 2000;
  config.profile.p_reject_correct = 0.4;  // members lacking the answer fabricate 60%
  config.profile.fabrication_pool = {"Mark Gibson"};
  config.profile.post_merge_fidelity = 1.0;
  config.profile.rng_seed = seed;
  return config;
}

std::vector<TestCase> single_doc_suite(std::size_t n, std::uint64_t seed) {
  const Corpus corpus = Corpus::synthetic(200, 200, 600, seed);
  const auto needles = synthetic_single_needles(16, seed);
  std::vector<TestCase> cases;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t length = 1000 + (i % 8) * 1000;
    const double depth = static_cast<double>(i % 10) / 9.0;
    cases.push_back(build_single_doc_case(needles[i % needles.size()], corpus,
                                          {length, {depth}}, seed * 1000 + i));
  }
  return cases;
}

bool criterion1() {
  const auto start = std::chrono::steady_clock::now();
  const auto cases = single_doc_suite(100, 77);
  const RunReport r = run_suite(cases, fabricating_config(77), {});
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r.cases.size() == 100 && r.correct_count() == 100 && secs < 10.0;
}

bool criterion2() {
  double sum_on = 0.0, sum_off = 0.0;
  EvalOptions on;
  EvalOptions off;
  off.disable_conflict_resolution = true;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto cases = single_doc_suite(8, 300 + s);  // lengths 1k..8k
    const auto config = fabricating_config(300 + s);
    sum_on += run_suite(cases, config, on).accuracy();
    sum_off += run_suite(cases, config, off).accuracy();
  }
  const double mean_on = sum_on / 50.0;
  const double mean_off = sum_off / 50.0;
  // With resolution enabled the truthful cluster always survives (drop = 0);
  // the plurality baseline must cost at least 0.15 accuracy on average.
  return mean_on == 1.0 && (mean_on - mean_off) >= 0.15;
}

bool criterion3() {
  OrchestratorConfig honest;
  honest.chunk_size = 2000;
  honest.profile.p_reject_correct = 1.0;

  std::vector<TestCase> passkey, number;
  for (std::size_t i = 0; i < 100; ++i) {
    passkey.push_back(gen_passkey(3000 + (i % 5) * 1000, (i % 10) / 9.0, 500 + i));
    number.push_back(gen_number(4000, 2 + static_cast<int>(i % 3), 700 + i));
  }
  if (run_suite(passkey, honest, {}).accuracy() != 1.0) return false;
  if (run_suite(number, honest, {}).accuracy() != 1.0) return false;

  std::vector<TestCase> kv;
  for (std::size_t i = 0; i < 200; ++i) {
    kv.push_back(gen_kv(200, static_cast<int>(i % 200), 900 + i));
  }
  OrchestratorConfig kv_config = honest;
  kv_config.chunk_size = 50;  // line-boundary chunking is the KV default
  return run_suite(kv, kv_config, {}).accuracy() == 1.0;
}

bool criterion4() {
  Rng rng(4242);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 10 + rng.bounded(191);
    std::vector<long long> values;
    std::set<long long> distinct;
    for (std::size_t i = 0; i < n; ++i) {
      const long long v = static_cast<long long>(1 + rng.bounded(100));
      values.push_back(v);
      distinct.insert(v);
    }
    while (distinct.size() < 4) {  // keep every variant answerable
      const long long v = static_cast<long long>(101 + distinct.size());
      values.push_back(v);
      distinct.insert(v);
    }

    const std::size_t n_chunks = 2 + rng.bounded(49);
    std::vector<std::string> chunk_texts(n_chunks);
    for (std::size_t i = 0; i < values.size(); ++i) {
      auto& text = chunk_texts[i * n_chunks / values.size()];
      if (!text.empty()) text += ' ';
      text += std::to_string(values[i]);
    }

    for (int k = 1; k <= 3; ++k) {
      std::vector<std::vector<long long>> reports;
      for (const auto& text : chunk_texts) {
        if (!text.empty()) {
          reports.push_back(math_report(text, k == 1   ? MathVariant::top1
                                              : k == 2 ? MathVariant::top2
                                                       : MathVariant::top3));
        }
      }
      auto it = distinct.rbegin();
      std::advance(it, k - 1);
      if (aggregate_topk(reports, k) != std::to_string(*it)) return false;
    }

    std::vector<std::vector<long long>> min_reports;
    for (const auto& text : chunk_texts) {
      if (!text.empty()) min_reports.push_back(math_report(text, MathVariant::min));
    }
    if (aggregate_min(min_reports) != std::to_string(*distinct.begin())) return false;
  }
  return true;
}

bool criterion5() {
  Rng rng(5555);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t words = 1 + rng.bounded(300);
    std::string text;
    for (std::size_t w = 0; w < words; ++w) {
      const std::size_t len = 1 + rng.bounded(6);
      for (std::size_t i = 0; i < len; ++i) {
        text.push_back(static_cast<char>('a' + rng.bounded(26)));
      }
      text.push_back(rng.bounded(4) == 0 ? '\n' : ' ');
    }
    const std::size_t chunk_size = 1 + rng.bounded(9);
    const std::size_t tokens = count_tokens(text);
    const auto chunks = partition(text, chunk_size);
    if (chunks.size() != (tokens + chunk_size - 1) / chunk_size) return false;
    std::string rebuilt;
    for (const auto& c : chunks) rebuilt += c.text;
    if (rebuilt != text) return false;
    std::string rebuilt_lines;
    for (const auto& c : partition(text, chunk_size, ChunkBoundary::line)) {
      if (c.token_count > chunk_size) return false;
      rebuilt_lines += c.text;
    }
    if (rebuilt_lines != text) return false;
  }
  return true;
}

bool criterion6() {
  const std::vector<std::size_t> lengths = {2000,  12000, 22000, 32000, 42000,
                                            52000, 62000, 72000, 82000, 100000};
  const ScalingTable table = scaling_probe(lengths, 2000, 1);
  if (table.rows.size() != lengths.size()) return false;
  for (const auto& row : table.rows) {
    if (row.invocations != static_cast<long long>((row.length + 1999) / 2000)) return false;
  }
  return table.r_squared >= 0.98;
}

bool criterion7() {
  const Corpus corpus = Corpus::synthetic(600, 200, 600, 42);
  const auto singles = synthetic_single_needles(32, 42);
  const auto multis = synthetic_multi_needles(32, 42);
  GeneratorConfig config;  // library defaults: 15 lengths x 10 depths x 10 samples
  config.seed = 42;

  auto run_single = [&] {
    StreamHash hash;
    std::size_t count = 0;
    generate_niah_single(config, corpus, singles, [&](const TestCase& c) {
      hash.update(to_json_line(c));
      ++count;
    });
    return std::make_pair(hash.value, count);
  };
  auto run_multi = [&] {
    StreamHash hash;
    std::size_t count = 0;
    generate_niah_multi(config, corpus, multis, [&](const TestCase& c) {
      hash.update(to_json_line(c));
      ++count;
    });
    return std::make_pair(hash.value, count);
  };

  const auto [sh1, sn1] = run_single();
  const auto [sh2, sn2] = run_single();
  const auto [mh1, mn1] = run_multi();
  const auto [mh2, mn2] = run_multi();
  return sn1 == 1500 && sn2 == 1500 && sh1 == sh2 && mn1 == 900 && mn2 == 900 && mh1 == mh2;
}

bool criterion8() {
  const std::string document =
      "The first report discussed seasonal trade along the coast in detail today. "
      "The second report noted that the journal was published by the Yale Law Journal. "
      "The third report covered harvest logistics and carried no publication details.";

  TaskSpec task;
  task.description = "Answering questions based on the content of the document.";
  task.query = "Which journal published the report?";

  OrchestratorConfig config;
  config.chunk_size = 13;  // 39 tokens -> exactly 3 chunks
  if (partition(document, config.chunk_size).size() != 3) return false;

  LLMEndpointConfig endpoint;
  endpoint.api_key_env = "";
  endpoint.retry_backoff_ms = 1;

  {
    testutil::ScriptedServer server;
    endpoint.base_url = server.url();
    server.reply(R"({"type": "member", "content": "QA member"})");
    server.reply(R"({"type": "instruction", "content": "Which journal published the report?"})");
    server.reply(R"({"type": "response", "content": "the Wall Street Journal"})");
    server.reply(R"({"type": "response", "content": "the Yale Law Journal"})");
    server.reply(R"({"type": "response", "content": "Mark Gibson"})");
    server.reply(R"({"type": "response", "content": "the Yale Law Journal"})");  // merge 1+2
    server.reply(R"({"type": "response", "content": "the Yale Law Journal"})");  // merge 2+3
    server.reply(R"({"type": "answer", "content": "the Yale Law Journal"})");

    const FinalResult res = orchestrate_llm(task, document, config, endpoint,
                                            PromptSet::defaults());
    if (res.answer != "the Yale Law Journal" || res.unresolved) return false;
    if (res.rounds_used != 1 || res.member_invocations != 5 || res.merged_invocations != 2) {
      return false;
    }
    if (server.request_count() != 8) return false;
  }

  // A malformed member reply must surface as a protocol error, not a crash.
  testutil::ScriptedServer server;
  endpoint.base_url = server.url();
  server.reply(R"({"type": "member", "content": "QA member"})");
  server.reply(R"({"type": "instruction", "content": "Which journal published the report?"})");
  server.reply("I would rather not answer in the agreed format.");
  try {
    orchestrate_llm(task, document, config, endpoint, PromptSet::defaults());
    return false;
  } catch (const ProtocolError&) {
    return true;
  }
}

}  // namespace

int main() {
  run_criterion(1, "fabrication-heavy single-doc suite is solved perfectly in under 10s",
                criterion1);
  run_criterion(2, "disabling conflict resolution costs >= 0.15 accuracy over 50 seeds",
                criterion2);
  run_criterion(3, "honest members score 1.000 on passkey, number, and key-value suites",
                criterion3);
  run_criterion(4, "global top-k and min aggregation match brute force on 1000 random splits",
                criterion4);
  run_criterion(5, "chunker round-trip and exact chunk-count invariants over 1000 texts",
                criterion5);
  run_criterion(6, "no-conflict invocations are ceil(L/chunk) with a linear fit R^2 >= 0.98",
                criterion6);
  run_criterion(7, "default generator suites are 1500 + 900 cases and byte-stable per seed",
                criterion7);
  run_criterion(8, "mock-endpoint trajectory replays recruit/instruct/responses/2 merges/answer",
                criterion8);
  return failures;
}
