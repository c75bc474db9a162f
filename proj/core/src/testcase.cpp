#include "chunkcrew/testcase.hpp"

#include "json.hpp"

#include "chunkcrew/errors.hpp"

namespace crew {

namespace {

using nlohmann::json;

std::string compose_kind_name(ComposeKind kind) {
  switch (kind) {
    case ComposeKind::identity: return "identity";
    case ComposeKind::entity_select: return "entity_select";
    case ComposeKind::global_topk: return "global_topk";
    case ComposeKind::global_min: return "global_min";
  }
  return "identity";
}

ComposeKind compose_kind_from_name(const std::string& name) {
  if (name == "identity") return ComposeKind::identity;
  if (name == "entity_select") return ComposeKind::entity_select;
  if (name == "global_topk") return ComposeKind::global_topk;
  if (name == "global_min") return ComposeKind::global_min;
  throw InvalidInputError("unknown compose rule: " + name);
}

}  // namespace

std::string_view task_kind_name(TaskKind kind) {
  switch (kind) {
    case TaskKind::niah_single: return "niah_single";
    case TaskKind::niah_multi: return "niah_multi";
    case TaskKind::passkey: return "passkey";
    case TaskKind::number: return "number";
    case TaskKind::kv: return "kv";
    case TaskKind::math_find: return "math";
  }
  return "niah_single";
}

TaskKind task_kind_from_name(std::string_view name) {
  if (name == "niah_single") return TaskKind::niah_single;
  if (name == "niah_multi") return TaskKind::niah_multi;
  if (name == "passkey") return TaskKind::passkey;
  if (name == "number") return TaskKind::number;
  if (name == "kv") return TaskKind::kv;
  if (name == "math" || name == "math_find") return TaskKind::math_find;
  throw InvalidInputError("unknown task kind: " + std::string(name));
}

std::string to_json_line(const TestCase& c) {
  json meta;
  meta["length"] = c.meta.length;
  meta["depths"] = c.meta.depths;
  meta["seed"] = c.meta.seed;
  meta["variant"] = c.meta.variant;
  if (!c.meta.subquestions.empty()) {
    json sq = json::array();
    for (const auto& s : c.meta.subquestions) {
      json e;
      e["text"] = s.text;
      e["entity"] = s.entity;
      if (s.gold_hint) e["hint"] = *s.gold_hint;
      sq.push_back(std::move(e));
    }
    meta["subquestions"] = std::move(sq);
  }
  if (c.meta.compose.kind != ComposeKind::identity) {
    meta["compose"] = {{"kind", compose_kind_name(c.meta.compose.kind)},
                       {"target", c.meta.compose.target_value},
                       {"k", c.meta.compose.k}};
  }
  json j;
  j["id"] = c.id;
  j["task_kind"] = std::string(task_kind_name(c.kind));
  j["document"] = c.document;
  j["query"] = c.query;
  j["gold"] = c.gold;
  j["meta"] = std::move(meta);
  return j.dump();
}

TestCase parse_test_case(const std::string& line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw InvalidInputError("test case line is not a JSON object");
  }
  TestCase c;
  try {
    c.id = j.at("id").get<std::string>();
    c.kind = task_kind_from_name(j.at("task_kind").get<std::string>());
    c.document = j.at("document").get<std::string>();
    c.query = j.at("query").get<std::string>();
    c.gold = j.at("gold").get<std::string>();
    const auto& meta = j.at("meta");
    c.meta.length = meta.at("length").get<std::size_t>();
    c.meta.depths = meta.at("depths").get<std::vector<double>>();
    c.meta.seed = meta.at("seed").get<std::uint64_t>();
    c.meta.variant = meta.value("variant", "");
    if (meta.contains("subquestions")) {
      for (const auto& e : meta["subquestions"]) {
        Subquestion s;
        s.text = e.at("text").get<std::string>();
        s.entity = e.value("entity", "");
        if (e.contains("hint")) s.gold_hint = e["hint"].get<std::string>();
        c.meta.subquestions.push_back(std::move(s));
      }
    }
    if (meta.contains("compose")) {
      c.meta.compose.kind = compose_kind_from_name(meta["compose"].at("kind").get<std::string>());
      c.meta.compose.target_value = meta["compose"].value("target", "");
      c.meta.compose.k = meta["compose"].value("k", 1);
    }
  } catch (const json::exception& e) {
    throw InvalidInputError(std::string("malformed test case: ") + e.what());
  }
  return c;
}

TaskSpec task_from_case(const TestCase& c) {
  TaskSpec task;
  task.query = c.query;
  task.gold = c.gold;
  task.subquestions = c.meta.subquestions;
  task.compose = c.meta.compose;
  switch (c.kind) {
    case TaskKind::niah_single:
    case TaskKind::niah_multi:
      task.description =
          "Answer the question based on the given passages. The answer must be extracted "
          "from the given passages.";
      break;
    case TaskKind::passkey:
      task.description = "Retrieving hidden keys in a noisy long context.";
      break;
    case TaskKind::number:
      task.description = "Locating repeated hidden numbers in a noisy long context.";
      break;
    case TaskKind::kv:
      task.description = "Finding the corresponding value from a dictionary and a key.";
      break;
    case TaskKind::math_find:
      task.description = "Finding special integers in a lengthy list.";
      break;
  }
  return task;
}

}  // namespace crew
