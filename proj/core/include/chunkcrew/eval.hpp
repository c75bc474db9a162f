#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "chunkcrew/leader.hpp"
#include "chunkcrew/testcase.hpp"

namespace crew {

enum class ScoreMode { exact_normalized, substring };

std::string_view score_mode_name(ScoreMode mode);

/// exact_normalized compares the normalized forms; substring tests normalized
/// containment in either direction. Gold must be nonempty.
bool score_answer(const std::string& predicted, const std::string& gold, ScoreMode mode);

struct CaseResult {
  std::string id;
  std::string predicted;
  std::string gold;
  bool correct = false;
  bool parse_failed = false;
  int rounds = 0;
  long long member_invocations = 0;
  long long merged_invocations = 0;
  double wall_time = 0.0;  // modeled: invocations x per-call cost
  std::size_t length = 0;
  double depth = 0.0;
};

struct EvalOptions {
  ScoreMode mode = ScoreMode::exact_normalized;
  bool disable_conflict_resolution = false;
  int workers = 1;
  double per_call_cost = 1.0;
};

struct RunReport {
  std::vector<CaseResult> cases;  // input order, one entry per suite line
  EvalOptions options;
  OrchestratorConfig config;  // echo (trajectory/ sinks are not replayed)

  long long correct_count() const;
  /// Mean per-case correctness; NaN for an empty report.
  double accuracy() const;
};

struct EvalGrid {
  struct Cell {
    long long correct = 0;
    long long n = 0;
    double accuracy() const { return n ? static_cast<double>(correct) / n : 0.0; }
  };
  // (depth, length) -> cell; every case lands in exactly one cell.
  std::map<std::pair<double, std::size_t>, Cell> cells;
  double overall = 0.0;  // mean of per-case correctness, not of cells
  long long total_n = 0;
};

/// Execute each case through the simulated orchestrator. Cases run with
/// decorrelated per-case seeds, so results are independent of worker count
/// and completion order. Malformed suite lines become failed entries.
RunReport run_suite(const std::vector<TestCase>& cases, const OrchestratorConfig& config,
                    const EvalOptions& options);
RunReport run_suite_file(const std::string& path, const OrchestratorConfig& config,
                         const EvalOptions& options);

EvalGrid aggregate_grid(const RunReport& report);

/// Rows = depths, columns = lengths, cells = accuracy to 4 decimals (blank
/// when the cell is empty).
std::string grid_csv(const EvalGrid& grid);

std::string report_json(const RunReport& report);

struct ScalingRow {
  std::size_t length = 0;
  long long invocations = 0;
  double sim_time = 0.0;
};

struct ScalingTable {
  std::vector<ScalingRow> rows;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Honest no-conflict runs over ascending lengths; invocations per length is
/// ceil(length / chunk_size) and sim_time is modeled from the invocation
/// count, making the linearity claim testable without hardware.
ScalingTable scaling_probe(const std::vector<std::size_t>& lengths, std::size_t chunk_size,
                           int trials, double per_call_cost = 1.0);

}  // namespace crew
