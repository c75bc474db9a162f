#include "chunkcrew/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include "json.hpp"

#include "chunkcrew/errors.hpp"
#include "chunkcrew/generators.hpp"
#include "chunkcrew/normalize.hpp"
#include "chunkcrew/rng.hpp"

namespace crew {

std::string_view score_mode_name(ScoreMode mode) {
  return mode == ScoreMode::exact_normalized ? "exact_normalized" : "substring";
}

bool score_answer(const std::string& predicted, const std::string& gold, ScoreMode mode) {
  if (gold.empty()) throw InvalidInputError("score_answer requires a nonempty gold answer");
  const std::string p = normalize_answer(predicted);
  const std::string g = normalize_answer(gold);
  if (mode == ScoreMode::exact_normalized) return p == g;
  if (p.empty() || g.empty()) return false;
  return p.find(g) != std::string::npos || g.find(p) != std::string::npos;
}

long long RunReport::correct_count() const {
  long long n = 0;
  for (const auto& c : cases) n += c.correct ? 1 : 0;
  return n;
}

double RunReport::accuracy() const {
  if (cases.empty()) return std::nan("");
  return static_cast<double>(correct_count()) / static_cast<double>(cases.size());
}

namespace {

CaseResult run_one(const TestCase& tc, const OrchestratorConfig& base,
                   const EvalOptions& options, std::size_t index) {
  CaseResult r;
  r.id = tc.id;
  r.gold = tc.gold;
  r.length = tc.meta.length;
  r.depth = tc.meta.depths.empty() ? 0.0 : tc.meta.depths.front();

  OrchestratorConfig config = base;
  config.trajectory = nullptr;
  config.history_out = nullptr;
  config.call_counter = nullptr;
  config.conflict_resolution = !options.disable_conflict_resolution;
  // Per-case streams keep the correctness bits independent of worker count
  // and suite order.
  config.profile.rng_seed = mix_seed(base.profile.rng_seed, 0x63617365ull, index);

  try {
    const FinalResult res = orchestrate(task_from_case(tc), tc.document, config);
    r.predicted = res.answer;
    r.rounds = res.rounds_used;
    r.member_invocations = res.member_invocations;
    r.merged_invocations = res.merged_invocations;
    r.correct = score_answer(res.answer, tc.gold, options.mode);
  } catch (const Error&) {
    r.correct = false;
  }
  r.wall_time = static_cast<double>(r.member_invocations) * options.per_call_cost;
  return r;
}

}  // namespace

RunReport run_suite(const std::vector<TestCase>& cases, const OrchestratorConfig& config,
                    const EvalOptions& options) {
  RunReport report;
  report.options = options;
  report.config = config;
  report.cases.resize(cases.size());

  const int workers = std::max(1, options.workers);
  if (workers == 1 || cases.size() < 2) {
    for (std::size_t i = 0; i < cases.size(); ++i) {
      report.cases[i] = run_one(cases[i], config, options, i);
    }
    return report;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cases.size()) return;
      report.cases[i] = run_one(cases[i], config, options, i);
    }
  };
  std::vector<std::thread> pool;
  const int spawn = static_cast<int>(std::min<std::size_t>(workers, cases.size()));
  pool.reserve(static_cast<std::size_t>(spawn));
  for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return report;
}

RunReport run_suite_file(const std::string& path, const OrchestratorConfig& config,
                         const EvalOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot open suite file: " + path);

  std::vector<TestCase> cases;
  std::vector<std::pair<std::size_t, std::size_t>> malformed;  // line no -> result slot
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      cases.push_back(parse_test_case(line));
      malformed.emplace_back(0, 0);  // placeholder, patched below
    } catch (const Error&) {
      TestCase bad;
      bad.id = "malformed-line-" + std::to_string(line_no);
      cases.push_back(std::move(bad));
      malformed.emplace_back(line_no, cases.size() - 1);
    }
  }

  // Malformed lines are recorded as failed cases so the run continues.
  std::vector<TestCase> runnable;
  std::vector<std::size_t> runnable_slots;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    if (malformed[i].first == 0) {
      runnable.push_back(cases[i]);
      runnable_slots.push_back(i);
    }
  }
  RunReport partial = run_suite(runnable, config, options);

  RunReport report;
  report.options = options;
  report.config = config;
  report.cases.resize(cases.size());
  for (std::size_t i = 0; i < runnable_slots.size(); ++i) {
    report.cases[runnable_slots[i]] = std::move(partial.cases[i]);
  }
  for (std::size_t i = 0; i < cases.size(); ++i) {
    if (malformed[i].first != 0) {
      CaseResult r;
      r.id = cases[i].id;
      r.parse_failed = true;
      report.cases[i] = std::move(r);
    }
  }
  return report;
}

EvalGrid aggregate_grid(const RunReport& report) {
  EvalGrid grid;
  for (const auto& c : report.cases) {
    auto& cell = grid.cells[{c.depth, c.length}];
    cell.n += 1;
    cell.correct += c.correct ? 1 : 0;
    grid.total_n += 1;
  }
  grid.overall = report.cases.empty()
                     ? std::nan("")
                     : static_cast<double>(report.correct_count()) /
                           static_cast<double>(report.cases.size());
  return grid;
}

std::string grid_csv(const EvalGrid& grid) {
  std::vector<double> depths;
  std::vector<std::size_t> lengths;
  for (const auto& [key, _] : grid.cells) {
    if (depths.empty() || depths.back() != key.first) {
      if (std::find(depths.begin(), depths.end(), key.first) == depths.end()) {
        depths.push_back(key.first);
      }
    }
    if (std::find(lengths.begin(), lengths.end(), key.second) == lengths.end()) {
      lengths.push_back(key.second);
    }
  }
  std::sort(depths.begin(), depths.end());
  std::sort(lengths.begin(), lengths.end());

  std::string out = "depth";
  for (auto l : lengths) out += "," + std::to_string(l);
  out += "\n";
  char buf[32];
  for (double d : depths) {
    std::snprintf(buf, sizeof(buf), "%.2f", d);
    out += buf;
    for (auto l : lengths) {
      out += ',';
      auto it = grid.cells.find({d, l});
      if (it != grid.cells.end() && it->second.n > 0) {
        std::snprintf(buf, sizeof(buf), "%.4f", it->second.accuracy());
        out += buf;
      }
    }
    out += "\n";
  }
  return out;
}

std::string report_json(const RunReport& report) {
  using nlohmann::json;
  json j;
  j["score_mode"] = std::string(score_mode_name(report.options.mode));
  j["ablation"] = report.options.disable_conflict_resolution;
  j["config"] = {{"chunk_size", report.config.chunk_size},
                 {"round_limit", report.config.round_limit},
                 {"reissue_retries", report.config.reissue_retries},
                 {"conflict_resolution", !report.options.disable_conflict_resolution},
                 {"seed", report.config.profile.rng_seed},
                 {"p_reject_correct", report.config.profile.p_reject_correct},
                 {"post_merge_fidelity", report.config.profile.post_merge_fidelity},
                 {"workers", report.options.workers},
                 {"per_call_cost", report.options.per_call_cost}};
  json cases = json::array();
  for (const auto& c : report.cases) {
    cases.push_back({{"id", c.id},
                     {"predicted", c.predicted},
                     {"gold", c.gold},
                     {"correct", c.correct},
                     {"parse_failed", c.parse_failed},
                     {"rounds", c.rounds},
                     {"member_invocations", c.member_invocations},
                     {"merged_invocations", c.merged_invocations},
                     {"wall_time", c.wall_time}});
  }
  j["cases"] = std::move(cases);

  const EvalGrid grid = aggregate_grid(report);
  json cells = json::array();
  for (const auto& [key, cell] : grid.cells) {
    cells.push_back({{"depth", key.first},
                     {"length", key.second},
                     {"correct", cell.correct},
                     {"n", cell.n},
                     {"accuracy", cell.accuracy()}});
  }
  j["grid"] = std::move(cells);
  j["n"] = report.cases.size();
  if (report.cases.empty()) {
    j["accuracy"] = nullptr;
  } else {
    j["accuracy"] = report.accuracy();
  }
  return j.dump(2);
}

ScalingTable scaling_probe(const std::vector<std::size_t>& lengths, std::size_t chunk_size,
                           int trials, double per_call_cost) {
  if (chunk_size == 0) throw ConfigError("scaling probe requires a positive chunk size");
  if (trials < 1) throw ConfigError("scaling probe requires at least one trial");
  for (std::size_t i = 1; i < lengths.size(); ++i) {
    if (lengths[i] <= lengths[i - 1]) {
      throw InvalidInputError("scaling probe lengths must be strictly ascending");
    }
  }

  ScalingTable table;
  OrchestratorConfig config;
  config.chunk_size = chunk_size;
  config.profile.p_reject_correct = 1.0;  // honest members: no conflicts arise
  for (std::size_t length : lengths) {
    long long invocations = 0;
    for (int t = 0; t < trials; ++t) {
      const TestCase tc = gen_passkey(length, 0.5, mix_seed(7, length, t));
      const FinalResult res = orchestrate(task_from_case(tc), tc.document, config);
      invocations += res.member_invocations;
    }
    ScalingRow row;
    row.length = length;
    row.invocations = invocations / trials;
    row.sim_time = static_cast<double>(row.invocations) * per_call_cost;
    table.rows.push_back(row);
  }

  const auto n = static_cast<double>(table.rows.size());
  if (table.rows.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (const auto& r : table.rows) {
      const double x = static_cast<double>(r.length);
      const double y = r.sim_time;
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      syy += y * y;
    }
    const double denom = n * sxx - sx * sx;
    table.slope = (n * sxy - sx * sy) / denom;
    table.intercept = (sy - table.slope * sx) / n;
    double ss_res = 0;
    const double mean_y = sy / n;
    double ss_tot = 0;
    for (const auto& r : table.rows) {
      const double fit = table.slope * static_cast<double>(r.length) + table.intercept;
      ss_res += (r.sim_time - fit) * (r.sim_time - fit);
      ss_tot += (r.sim_time - mean_y) * (r.sim_time - mean_y);
    }
    table.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  }
  return table;
}

}  // namespace crew
