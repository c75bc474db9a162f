#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chunkcrew/leader.hpp"

namespace crew {

enum class TaskKind { niah_single, niah_multi, passkey, number, kv, math_find };

std::string_view task_kind_name(TaskKind kind);
TaskKind task_kind_from_name(std::string_view name);

/// A generated benchmark instance, one JSON line on disk.
struct TestCase {
  std::string id;
  TaskKind kind = TaskKind::niah_single;
  std::string document;
  std::string query;
  std::string gold;
  struct Meta {
    std::size_t length = 0;
    std::vector<double> depths;
    std::uint64_t seed = 0;
    std::string variant;
    std::vector<Subquestion> subquestions;
    ComposeRule compose;
  } meta;
};

std::string to_json_line(const TestCase& c);
TestCase parse_test_case(const std::string& line);

/// Orchestrator task for a case: description, query, scripted subquestions
/// and compose rule appropriate to the task kind.
TaskSpec task_from_case(const TestCase& c);

/// FNV-1a over emitted bytes; used to compare regenerated suites without
/// keeping them on disk.
struct StreamHash {
  std::uint64_t value = 1469598103934665603ull;
  void update(std::string_view bytes) {
    for (unsigned char b : bytes) {
      value ^= b;
      value *= 1099511628211ull;
    }
  }
};

}  // namespace crew
