#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "chunkcrew/corpus.hpp"
#include "chunkcrew/errors.hpp"
#include "chunkcrew/eval.hpp"
#include "chunkcrew/generators.hpp"
#include "chunkcrew/leader.hpp"
#include "chunkcrew/rng.hpp"
#include "chunkcrew/testcase.hpp"

namespace {

using namespace crew;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitCorpus = 3;
constexpr int kExitUnresolved = 4;

struct GlobalOpts {
  std::uint64_t seed = 0;
  bool dry_run = false;
};

HallucinationProfile preset_profile(const std::string& name, std::uint64_t seed) {
  HallucinationProfile profile;
  profile.rng_seed = seed;
  if (name == "honest") {
    profile.p_reject_correct = 1.0;
  } else if (name == "recipe-2to1") {
    profile.p_reject_correct = 0.510;
  } else if (name == "recipe-2to3") {
    profile.p_reject_correct = 0.786;
  } else if (name == "fig6-ablation") {
    profile.p_reject_correct = 0.4;
  } else {
    throw ConfigError("unknown hallucination preset: " + name);
  }
  return profile;
}

Corpus load_or_synthesize_corpus(const std::vector<std::string>& paths,
                                 std::size_t max_length, std::uint64_t seed) {
  if (paths.empty()) {
    const std::size_t n_docs = std::max<std::size_t>(100, max_length / 250);
    return Corpus::synthetic(n_docs, 200, 600, seed);
  }
  Corpus merged;
  for (const auto& p : paths) {
    Corpus c = Corpus::load_json_file(p);
    for (auto& doc : c.docs) merged.add(std::move(doc));
  }
  return merged;
}

std::vector<NeedleSpec> load_needle_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open needle file: " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_array() || j.empty()) {
    throw ConfigError("needle file must be a nonempty JSON array: " + path);
  }
  std::vector<NeedleSpec> needles;
  for (const auto& e : j) {
    NeedleSpec n;
    n.question = e.at("question").get<std::string>();
    n.answer = e.at("answer").get<std::string>();
    for (const auto& d : e.at("docs")) n.needle_docs.push_back(d.get<std::string>());
    if (e.contains("entities")) {
      for (const auto& [orig, fict] : e["entities"].items()) {
        n.entity_map.emplace_back(orig, fict.get<std::string>());
      }
    }
    if (e.contains("subquestions")) {
      for (const auto& s : e["subquestions"]) {
        Subquestion sq;
        sq.text = s.at("text").get<std::string>();
        sq.entity = s.value("entity", "");
        if (s.contains("hint")) sq.gold_hint = s["hint"].get<std::string>();
        n.subquestions.push_back(std::move(sq));
      }
    }
    if (e.contains("compose")) {
      const std::string kind = e["compose"].value("kind", "identity");
      if (kind == "entity_select") n.compose.kind = ComposeKind::entity_select;
      else if (kind == "global_topk") n.compose.kind = ComposeKind::global_topk;
      else if (kind == "global_min") n.compose.kind = ComposeKind::global_min;
      n.compose.target_value = e["compose"].value("target", "");
      n.compose.k = e["compose"].value("k", 1);
    }
    needles.push_back(std::move(n));
  }
  return needles;
}

void print_dry_run(const std::string& subcommand, const json& resolved) {
  json j;
  j["subcommand"] = subcommand;
  j["config"] = resolved;
  std::cout << j.dump(2) << "\n";
}

struct GenOpts {
  std::string out = "suite.jsonl";
  std::vector<std::size_t> lengths;
  std::vector<double> depths;
  std::size_t samples = 10;
  std::vector<std::string> corpus_paths;
  std::string needle_file;
  // synthetic task knobs
  std::size_t length = 10000;
  double depth = 0.5;
  int occurrences = 3;
  int pairs = 500;
  int count = 200;
  std::string variant = "top1";
};

int run_gen(const std::string& which, const GlobalOpts& global, const GenOpts& opts) {
  json resolved = {{"out", opts.out}, {"seed", global.seed}, {"samples", opts.samples}};
  if (global.dry_run) {
    print_dry_run("gen " + which, resolved);
    return kExitOk;
  }
  std::ofstream out(opts.out, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + opts.out);
  std::size_t emitted = 0;
  const CaseSink sink = [&](const TestCase& c) {
    out << to_json_line(c) << "\n";
    ++emitted;
  };

  if (which == "niah-single" || which == "niah-multi") {
    GeneratorConfig config;
    config.lengths = opts.lengths;
    config.depths = opts.depths;
    config.samples_per_cell = opts.samples;
    config.seed = global.seed;
    const auto lengths = config.lengths.empty() ? default_lengths() : config.lengths;
    const std::size_t max_len = *std::max_element(lengths.begin(), lengths.end());
    const Corpus corpus = load_or_synthesize_corpus(opts.corpus_paths, max_len, global.seed);
    if (which == "niah-single") {
      const auto needles = opts.needle_file.empty()
                               ? synthetic_single_needles(32, global.seed)
                               : load_needle_file(opts.needle_file);
      generate_niah_single(config, corpus, needles, sink);
    } else {
      const auto needles = opts.needle_file.empty()
                               ? synthetic_multi_needles(32, global.seed)
                               : load_needle_file(opts.needle_file);
      generate_niah_multi(config, corpus, needles, sink);
    }
  } else if (which == "passkey") {
    for (std::size_t s = 0; s < opts.samples; ++s) {
      sink(gen_passkey(opts.length, opts.depth, mix_seed(global.seed, s)));
    }
  } else if (which == "number") {
    for (std::size_t s = 0; s < opts.samples; ++s) {
      sink(gen_number(opts.length, opts.occurrences, mix_seed(global.seed, s)));
    }
  } else if (which == "kv") {
    for (std::size_t s = 0; s < opts.samples; ++s) {
      const std::uint64_t seed = mix_seed(global.seed, s);
      Rng rng(mix_seed(seed, 0x6b6579ull));
      sink(gen_kv(opts.pairs, static_cast<int>(rng.bounded(opts.pairs)), seed));
    }
  } else if (which == "math") {
    MathVariant variant = MathVariant::top1;
    if (opts.variant == "top2") variant = MathVariant::top2;
    else if (opts.variant == "top3") variant = MathVariant::top3;
    else if (opts.variant == "min") variant = MathVariant::min;
    else if (opts.variant != "top1") throw ConfigError("unknown math variant: " + opts.variant);
    for (std::size_t s = 0; s < opts.samples; ++s) {
      sink(gen_math(opts.count, variant, mix_seed(global.seed, s)));
    }
  }
  std::cout << "wrote " << emitted << " cases to " << opts.out << "\n";
  return kExitOk;
}

struct RunOpts {
  std::string case_file;
  std::size_t case_index = 0;
  std::string document_file;
  std::string query;
  std::string trajectory_out;
  std::string preset = "honest";
  std::size_t chunk_size = 2000;
  bool disable_conflict_resolution = false;
  std::string mode = "simulated";
  std::string base_url;
  std::string model = "gpt-3.5-turbo";
  std::string api_key_env = "CHUNKCREW_API_KEY";
  std::string prompts_dir;
};

int run_run(const GlobalOpts& global, const RunOpts& opts) {
  json resolved = {{"seed", global.seed},
                   {"chunk_size", opts.chunk_size},
                   {"preset", opts.preset},
                   {"mode", opts.mode},
                   {"conflict_resolution", !opts.disable_conflict_resolution}};
  if (global.dry_run) {
    print_dry_run("run", resolved);
    return kExitOk;
  }

  TaskSpec task;
  std::string document;
  std::optional<ChunkBoundary> boundary;
  if (!opts.case_file.empty()) {
    std::ifstream in(opts.case_file, std::ios::binary);
    if (!in) throw CorpusError("cannot open case file: " + opts.case_file);
    std::string line;
    std::size_t idx = 0;
    std::optional<TestCase> chosen;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (idx++ == opts.case_index) {
        chosen = parse_test_case(line);
        break;
      }
    }
    if (!chosen) throw InvalidInputError("case index out of range: " +
                                         std::to_string(opts.case_index));
    task = task_from_case(*chosen);
    document = chosen->document;
  } else if (!opts.document_file.empty() && !opts.query.empty()) {
    std::ifstream in(opts.document_file, std::ios::binary);
    if (!in) throw CorpusError("cannot open document file: " + opts.document_file);
    std::ostringstream ss;
    ss << in.rdbuf();
    document = ss.str();
    task.description =
        "Answer the question based on the given passages. The answer must be extracted "
        "from the given passages.";
    task.query = opts.query;
  } else {
    throw ConfigError("run requires either --case or both --document and --query");
  }

  OrchestratorConfig config;
  config.chunk_size = opts.chunk_size;
  config.conflict_resolution = !opts.disable_conflict_resolution;
  config.profile = preset_profile(opts.preset, global.seed);

  std::ofstream traj;
  if (!opts.trajectory_out.empty()) {
    traj.open(opts.trajectory_out, std::ios::binary);
    if (!traj) throw ConfigError("cannot open trajectory file: " + opts.trajectory_out);
    json header = {{"type", "config"},
                   {"chunk_size", opts.chunk_size},
                   {"seed", global.seed},
                   {"preset", opts.preset},
                   {"conflict_resolution", !opts.disable_conflict_resolution},
                   {"mode", opts.mode}};
    traj << header.dump() << "\n";
    config.trajectory = &traj;
  }

  FinalResult result;
  if (opts.mode == "remote") {
    if (opts.base_url.empty()) throw ConfigError("remote mode requires --base-url");
    LLMEndpointConfig endpoint;
    endpoint.base_url = opts.base_url;
    endpoint.model_name = opts.model;
    endpoint.api_key_env = opts.api_key_env;
    const PromptSet prompts = opts.prompts_dir.empty() ? PromptSet::defaults()
                                                       : PromptSet::load_dir(opts.prompts_dir);
    result = orchestrate_llm(task, document, config, endpoint, prompts);
  } else if (opts.mode == "simulated") {
    result = orchestrate(task, document, config);
  } else {
    throw ConfigError("unknown mode: " + opts.mode);
  }

  std::cout << result.answer << "\n";
  return result.unresolved ? kExitUnresolved : kExitOk;
}

struct EvalOpts2 {
  std::string suite;
  std::string out = "report.json";
  std::string grid = "grid.csv";
  std::string score = "exact_normalized";
  std::string preset = "honest";
  std::size_t chunk_size = 2000;
  int workers = 1;
  bool disable_conflict_resolution = false;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << text;
}

void print_summary(const RunReport& report) {
  if (report.cases.empty()) {
    std::cout << "acc=NaN n=0\n";
    return;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "acc=%.4f n=%zu", report.accuracy(), report.cases.size());
  std::cout << buf << "\n";
}

int run_eval(const GlobalOpts& global, const EvalOpts2& opts) {
  json resolved = {{"suite", opts.suite},     {"out", opts.out},
                   {"grid", opts.grid},       {"score", opts.score},
                   {"preset", opts.preset},   {"chunk_size", opts.chunk_size},
                   {"seed", global.seed},     {"workers", opts.workers}};
  if (global.dry_run) {
    print_dry_run("eval", resolved);
    return kExitOk;
  }

  EvalOptions options;
  if (opts.score == "substring") options.mode = ScoreMode::substring;
  else if (opts.score != "exact_normalized") throw ConfigError("unknown score mode: " + opts.score);
  options.workers = opts.workers;
  options.disable_conflict_resolution = opts.disable_conflict_resolution;

  OrchestratorConfig config;
  config.chunk_size = opts.chunk_size;
  config.profile = preset_profile(opts.preset, global.seed);

  try {
    if (opts.preset == "fig6-ablation") {
      EvalOptions on = options, off = options;
      on.disable_conflict_resolution = false;
      off.disable_conflict_resolution = true;
      const RunReport report_on = run_suite_file(opts.suite, config, on);
      const RunReport report_off = run_suite_file(opts.suite, config, off);
      write_text(opts.out + ".cr_on.json", report_json(report_on));
      write_text(opts.out + ".cr_off.json", report_json(report_off));
      write_text(opts.grid, grid_csv(aggregate_grid(report_on)));
      const double delta = report_on.cases.empty()
                               ? 0.0
                               : report_on.accuracy() - report_off.accuracy();
      char buf[64];
      std::snprintf(buf, sizeof(buf), "delta=%.4f\n", delta);
      std::cout << buf;
      print_summary(report_on);
      return kExitOk;
    }
    const RunReport report = run_suite_file(opts.suite, config, options);
    write_text(opts.out, report_json(report));
    write_text(opts.grid, grid_csv(aggregate_grid(report)));
    print_summary(report);
    return kExitOk;
  } catch (const InvalidInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCorpus;
  }
}

struct ReportOpts {
  std::string in;
  std::string grid;
};

int run_report(const GlobalOpts& global, const ReportOpts& opts) {
  if (global.dry_run) {
    print_dry_run("report", {{"in", opts.in}, {"grid", opts.grid}});
    return kExitOk;
  }
  std::ifstream in(opts.in, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open report: " << opts.in << "\n";
    return kExitCorpus;
  }
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    std::cerr << "error: report is not valid JSON: " << opts.in << "\n";
    return kExitCorpus;
  }
  RunReport report;
  for (const auto& c : j.value("cases", json::array())) {
    CaseResult r;
    r.id = c.value("id", "");
    r.correct = c.value("correct", false);
    report.cases.push_back(std::move(r));
  }
  // Grid cells come from the stored aggregate; per-case depth/length are not
  // reprinted here.
  if (!opts.grid.empty()) {
    EvalGrid grid;
    for (const auto& cell : j.value("grid", json::array())) {
      auto& g = grid.cells[{cell.value("depth", 0.0), cell.value("length", std::size_t{0})}];
      g.correct = cell.value("correct", 0ll);
      g.n = cell.value("n", 0ll);
      grid.total_n += g.n;
    }
    write_text(opts.grid, grid_csv(grid));
  }
  print_summary(report);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"leader/member orchestration over chunked long documents"};
  app.set_config("--config");

  GlobalOpts global;
  app.add_option("--seed", global.seed, "global RNG seed");
  app.add_flag("--dry-run", global.dry_run, "print resolved config, no side effects");
  app.require_subcommand(1);

  GenOpts gen_opts;
  auto* gen = app.add_subcommand("gen", "generate benchmark suites");
  gen->require_subcommand(1);
  std::string gen_which;
  for (const char* name : {"niah-single", "niah-multi", "passkey", "number", "kv", "math"}) {
    auto* sub = gen->add_subcommand(name);
    sub->add_option("--out", gen_opts.out, "output JSONL path");
    sub->add_option("--samples", gen_opts.samples, "samples per cell");
    if (std::string(name) == "niah-single" || std::string(name) == "niah-multi") {
      sub->add_option("--lengths", gen_opts.lengths, "context lengths in tokens")
          ->delimiter(',');
      sub->add_option("--depths", gen_opts.depths, "needle depths in [0,1]")->delimiter(',');
      sub->add_option("--corpus", gen_opts.corpus_paths, "distractor corpus JSON files");
      sub->add_option("--needles", gen_opts.needle_file, "needle spec JSON file");
    } else if (std::string(name) == "passkey") {
      sub->add_option("--length", gen_opts.length, "context length in tokens");
      sub->add_option("--depth", gen_opts.depth, "marker depth in [0,1]");
    } else if (std::string(name) == "number") {
      sub->add_option("--length", gen_opts.length, "context length in tokens");
      sub->add_option("--occurrences", gen_opts.occurrences, "marker repetitions");
    } else if (std::string(name) == "kv") {
      sub->add_option("--pairs", gen_opts.pairs, "key-value pairs per case");
    } else {
      sub->add_option("--count", gen_opts.count, "integers per list");
      sub->add_option("--variant", gen_opts.variant, "top1|top2|top3|min");
    }
    sub->callback([&gen_which, name] { gen_which = name; });
  }

  RunOpts run_opts;
  auto* run = app.add_subcommand("run", "run one case through the orchestrator");
  run->add_option("--case", run_opts.case_file, "suite JSONL file");
  run->add_option("--index", run_opts.case_index, "case index within the suite");
  run->add_option("--document", run_opts.document_file, "ad-hoc document file");
  run->add_option("--query", run_opts.query, "ad-hoc question");
  run->add_option("--trajectory", run_opts.trajectory_out, "trajectory JSONL output");
  run->add_option("--preset", run_opts.preset, "hallucination preset");
  run->add_option("--chunk-size", run_opts.chunk_size, "tokens per chunk");
  run->add_flag("--disable-conflict-resolution", run_opts.disable_conflict_resolution,
                "plurality fallback instead of the merge tournament");
  run->add_option("--mode", run_opts.mode, "simulated|remote");
  run->add_option("--base-url", run_opts.base_url, "chat-completions endpoint");
  run->add_option("--model", run_opts.model, "remote model name");
  run->add_option("--api-key-env", run_opts.api_key_env, "env var holding the API key");
  run->add_option("--prompts", run_opts.prompts_dir, "prompt template directory");

  EvalOpts2 eval_opts;
  auto* eval = app.add_subcommand("eval", "evaluate a suite and write reports");
  eval->add_option("--suite", eval_opts.suite, "suite JSONL file")->required();
  eval->add_option("--out", eval_opts.out, "report JSON path");
  eval->add_option("--grid", eval_opts.grid, "grid CSV path");
  eval->add_option("--score", eval_opts.score, "exact_normalized|substring");
  eval->add_option("--preset", eval_opts.preset, "hallucination preset");
  eval->add_option("--chunk-size", eval_opts.chunk_size, "tokens per chunk");
  eval->add_option("--workers", eval_opts.workers, "concurrent cases");
  eval->add_flag("--disable-conflict-resolution", eval_opts.disable_conflict_resolution,
                 "plurality fallback instead of the merge tournament");

  ReportOpts report_opts;
  auto* report = app.add_subcommand("report", "summarize an existing report JSON");
  report->add_option("--in", report_opts.in, "report JSON path")->required();
  report->add_option("--grid", report_opts.grid, "grid CSV output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return run_gen(gen_which, global, gen_opts);
    if (run->parsed()) return run_run(global, run_opts);
    if (eval->parsed()) return run_eval(global, eval_opts);
    if (report->parsed()) return run_report(global, report_opts);
  } catch (const CorpusError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCorpus;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UnknownTaskError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
