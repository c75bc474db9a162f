#include "chunkcrew/leader.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "json.hpp"

#include "chunkcrew/errors.hpp"
#include "chunkcrew/normalize.hpp"

namespace crew {

namespace {

using nlohmann::json;

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

class Trajectory {
public:
  explicit Trajectory(std::ostream* out) : out_(out) {}

  void event(std::string_view kind, int round, json payload) {
    if (!out_) return;
    json rec;
    rec["event"] = std::string(kind);
    rec["round"] = round;
    rec["payload"] = std::move(payload);
    *out_ << rec.dump() << '\n';
  }

private:
  std::ostream* out_;
};

json response_json(const MemberResponse& r) {
  return json{{"member", r.member_id},
              {"kind", r.kind == MemberResponse::answer ? "answer" : "reject"},
              {"content", r.content}};
}

json clusters_json(const std::vector<AnswerCluster>& clusters) {
  json arr = json::array();
  for (const auto& c : clusters) {
    arr.push_back({{"answer", c.display}, {"members", c.member_ids}});
  }
  return arr;
}

}  // namespace

std::string serialize_history(const DialogueHistory& history) {
  std::string out;
  for (const auto& round : history.rounds) {
    json rec;
    rec["instruction"] = round.instruction.text;
    json rs = json::array();
    for (const auto& r : round.responses) rs.push_back(response_json(r));
    rec["responses"] = std::move(rs);
    json ms = json::array();
    for (const auto& m : round.merged_queries) {
      ms.push_back({{"pair", {m.member_a, m.member_b}}, {"merged_answer", m.merged_answer}});
    }
    rec["merged_queries"] = std::move(ms);
    out += rec.dump();
    out += '\n';
  }
  return out;
}

ExpertRegistry ExpertRegistry::default_registry() {
  ExpertRegistry reg;
  reg.entries[ExpertKind::qa] = {
      "QA member",
      {"question", "passages", "answering", "answer the question"},
      "You are an expert in answering questions, adept at searching for relevant "
      "information from given documents and providing answers."};
  reg.entries[ExpertKind::kv] = {
      "KV member",
      {"dictionary", "corresponding value"},
      "You are an expert in dictionary lookup, adept at finding the value paired with a "
      "given key in a long list of entries."};
  reg.entries[ExpertKind::number] = {
      "NS member",
      {"repeated", "hidden numbers"},
      "You are an expert in locating repeated hidden numbers inside noisy long text."};
  reg.entries[ExpertKind::passkey] = {
      "PassKey member",
      {"pass key", "hidden keys"},
      "You are an expert in retrieving hidden pass keys from noisy long text."};
  reg.entries[ExpertKind::math_find] = {
      "Math member",
      {"integers", "lengthy list", "special integers"},
      "You are an expert in finding special integers, such as extremes, in a lengthy "
      "list of numbers."};
  return reg;
}

ExpertKind select_expert_keyword(const std::string& description,
                                 const ExpertRegistry& registry) {
  const std::string desc = to_lower(description);
  int best_score = 0;
  std::vector<ExpertKind> best;
  for (const auto& [kind, entry] : registry.entries) {
    int score = 0;
    for (const auto& kw : entry.keywords) {
      if (desc.find(to_lower(kw)) != std::string::npos) ++score;
    }
    if (score > best_score) {
      best_score = score;
      best = {kind};
    } else if (score == best_score && score > 0) {
      best.push_back(kind);
    }
  }
  if (best_score == 0) {
    throw UnknownTaskError("task description matches no expert keywords: " + description);
  }
  if (best.size() > 1) {
    throw UnknownTaskError("task description matches several experts equally well: " +
                           description);
  }
  return best.front();
}

ExpertKind select_expert_llm(const std::string& description, const ExpertRegistry& registry,
                             const LLMEndpointConfig& endpoint, const PromptSet& prompts) {
  const std::string prompt =
      render_template(prompts.recruit, {{"task_description", description}});
  const std::string reply = chat_completion(endpoint, "", prompt);
  const ParsedMessage msg = parse_agent_message(reply);
  if (msg.type != MessageType::member) {
    throw ProtocolError("recruit reply is not a member message", reply);
  }
  auto kind = expert_from_name(msg.content);
  if (!kind || registry.entries.find(*kind) == registry.entries.end()) {
    throw ProtocolError("recruit reply names unknown expert '" + msg.content + "'", reply);
  }
  return *kind;
}

std::vector<AnswerCluster> cluster_responses(const std::vector<MemberResponse>& responses) {
  std::map<std::string, AnswerCluster> by_canonical;
  for (const auto& r : responses) {
    if (r.kind != MemberResponse::answer) continue;
    const std::string canon = normalize_answer(r.content);
    auto [it, inserted] = by_canonical.try_emplace(canon);
    if (inserted) {
      it->second.canonical = canon;
      it->second.display = r.content;
    }
    it->second.member_ids.push_back(r.member_id);
  }
  std::vector<AnswerCluster> out;
  out.reserve(by_canonical.size());
  for (auto& [_, cluster] : by_canonical) {
    std::sort(cluster.member_ids.begin(), cluster.member_ids.end());
    out.push_back(std::move(cluster));
  }
  std::sort(out.begin(), out.end(), [](const AnswerCluster& a, const AnswerCluster& b) {
    return a.member_ids.front() < b.member_ids.front();
  });
  return out;
}

AnswerCluster plurality_cluster(const std::vector<AnswerCluster>& clusters) {
  if (clusters.empty()) throw InvalidInputError("plurality over no clusters");
  const AnswerCluster* best = &clusters.front();
  for (const auto& c : clusters) {
    if (c.member_ids.size() > best->member_ids.size() ||
        (c.member_ids.size() == best->member_ids.size() &&
         c.member_ids.front() < best->member_ids.front())) {
      best = &c;
    }
  }
  return *best;
}

ResolveResult resolve_conflict(const std::vector<AnswerCluster>& clusters,
                               const MergedEvalFn& evaluate) {
  if (clusters.empty()) throw InvalidInputError("resolve_conflict requires >= 1 cluster");
  ResolveResult result;
  if (clusters.size() == 1) {
    result.survivor = clusters.front();
    return result;
  }

  // -1 = neither answer matched; 0 = first cluster wins; 1 = second wins.
  auto fight = [&](const AnswerCluster* a, const AnswerCluster* b) {
    const int rep_a = a->member_ids.front();
    const int rep_b = b->member_ids.front();
    const int lo = std::min(rep_a, rep_b);
    const int hi = std::max(rep_a, rep_b);
    MemberResponse merged = evaluate(lo, hi);

    MergeRecord rec;
    rec.member_a = lo;
    rec.member_b = hi;
    rec.merged_answer = merged.content;
    const std::string canon =
        merged.kind == MemberResponse::answer ? normalize_answer(merged.content) : "";
    int outcome = -1;
    if (!canon.empty() && canon == a->canonical && canon != b->canonical) {
      rec.eliminated_member = rep_b;
      outcome = 0;
    } else if (!canon.empty() && canon == b->canonical && canon != a->canonical) {
      rec.eliminated_member = rep_a;
      outcome = 1;
    } else {
      result.unresolved_pairs.emplace_back(lo, hi);
    }
    result.merged_log.push_back(std::move(rec));
    return outcome;
  };

  const AnswerCluster* survivor = &clusters.front();
  std::vector<const AnswerCluster*> alive{survivor};
  for (std::size_t i = 1; i < clusters.size(); ++i) {
    const AnswerCluster* challenger = &clusters[i];
    const int outcome = fight(survivor, challenger);
    if (outcome == 0) continue;
    if (outcome == 1) {
      alive.erase(std::remove(alive.begin(), alive.end(), survivor), alive.end());
      survivor = challenger;
    }
    // Neither matched: both stay alive and the earlier cluster remains the
    // tournament seed.
    alive.push_back(challenger);
  }

  // Clusters that dodged elimination get re-fought against the current
  // survivor; the loop stops when a full pass eliminates nobody.
  bool progress = alive.size() > 1;
  while (progress && alive.size() > 1) {
    progress = false;
    for (std::size_t i = 0; i < alive.size(); ++i) {
      if (alive[i] == survivor) continue;
      const int outcome = fight(survivor, alive[i]);
      if (outcome == 0) {
        alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(i));
        progress = true;
        break;
      }
      if (outcome == 1) {
        const AnswerCluster* challenger = alive[i];
        alive.erase(std::remove(alive.begin(), alive.end(), survivor), alive.end());
        survivor = challenger;
        progress = true;
        break;
      }
    }
  }

  if (alive.size() == 1) {
    result.survivor = *alive.front();
  } else {
    std::vector<AnswerCluster> still_alive;
    for (const auto* c : alive) still_alive.push_back(*c);
    result.survivor = plurality_cluster(still_alive);
  }
  return result;
}

LeaderAction decide_action(const DialogueHistory& history, const TaskSpec& task,
                           const std::vector<AnswerCluster>& clusters,
                           int pending_subquestions, int reissues_left) {
  (void)history;
  if (clusters.size() >= 2) return Conflict{clusters};
  if (clusters.size() == 1) {
    if (pending_subquestions > 1) {
      const std::size_t next =
          task.subquestions.size() - static_cast<std::size_t>(pending_subquestions) + 1;
      return NewState{task.subquestions[next].text};
    }
    return Answer{clusters.front().display};
  }
  if (reissues_left > 0) {
    const std::string last = history.rounds.empty()
                                 ? task.query
                                 : history.rounds.back().instruction.text;
    return NewState{last};
  }
  return Answer{"unanswerable"};
}

std::string deduce_answer(const DialogueHistory& history, const TaskSpec& task) {
  const auto& facts = history.resolved_facts;
  if (facts.empty()) throw Error("deduce_answer: no resolved facts");
  switch (task.compose.kind) {
    case ComposeKind::identity:
    case ComposeKind::global_topk:
    case ComposeKind::global_min:
      return facts.back().answer;
    case ComposeKind::entity_select: {
      const std::string target = normalize_answer(task.compose.target_value);
      for (const auto& sq : task.subquestions) {
        for (const auto& fact : facts) {
          if (fact.subquestion == sq.text && normalize_answer(fact.answer) == target) {
            return sq.entity;
          }
        }
      }
      throw Error("deduce_answer: no resolved fact matches the target value");
    }
  }
  throw Error("deduce_answer: unknown compose rule");
}

std::string aggregate_topk(const std::vector<std::vector<long long>>& reports, int k) {
  std::set<long long> distinct;
  for (const auto& r : reports) distinct.insert(r.begin(), r.end());
  if (static_cast<int>(distinct.size()) < k) {
    throw Error("aggregate_topk: fewer than k distinct values reported");
  }
  auto it = distinct.rbegin();
  std::advance(it, k - 1);
  return std::to_string(*it);
}

std::string aggregate_min(const std::vector<std::vector<long long>>& reports) {
  std::set<long long> distinct;
  for (const auto& r : reports) distinct.insert(r.begin(), r.end());
  if (distinct.empty()) throw Error("aggregate_min: no values reported");
  return std::to_string(*distinct.begin());
}

namespace {

struct PendingQuestion {
  std::string text;
  std::optional<std::string> gold_hint;
};

std::vector<PendingQuestion> build_plan(const TaskSpec& task) {
  std::vector<PendingQuestion> plan;
  if (task.subquestions.empty()) {
    plan.push_back({task.query, task.gold});
  } else {
    for (const auto& sq : task.subquestions) plan.push_back({sq.text, sq.gold_hint});
  }
  return plan;
}

bool is_global_compose(const TaskSpec& task) {
  return task.compose.kind == ComposeKind::global_topk ||
         task.compose.kind == ComposeKind::global_min;
}

}  // namespace

FinalResult orchestrate(const TaskSpec& task, const std::string& document,
                        const OrchestratorConfig& config) {
  if (document.empty()) throw InvalidInputError("document is empty");
  if (task.query.empty()) throw InvalidInputError("task query is empty");

  Trajectory traj(config.trajectory);
  const ExpertKind kind = task.expert_override
                              ? *task.expert_override
                              : select_expert_keyword(task.description, config.registry);
  traj.event("recruit", 0, json{{"expert", std::string(expert_name(kind))}});

  const ChunkBoundary boundary = config.boundary.value_or(
      kind == ExpertKind::kv ? ChunkBoundary::line : ChunkBoundary::hard);
  const auto chunks = partition(document, config.chunk_size, boundary);

  std::vector<SimulatedMember> members;
  members.reserve(chunks.size());
  for (const auto& c : chunks) {
    members.emplace_back(static_cast<int>(c.index) + 1, kind, config.profile, c.text);
  }

  DialogueHistory history;
  FinalResult result;
  auto plan = build_plan(task);
  std::size_t plan_pos = 0;
  int reissues_left = config.reissue_retries;
  long long merge_counter = 0;

  auto count_call = [&] {
    ++result.member_invocations;
    if (config.call_counter) ++(*config.call_counter);
  };

  while (result.rounds_used < config.round_limit && plan_pos < plan.size()) {
    const auto& pending = plan[plan_pos];
    Instruction inst{pending.text, result.rounds_used};
    traj.event("instruction", result.rounds_used, json{{"text", inst.text}});

    DialogueRound round;
    round.instruction = inst;
    for (auto& m : members) {
      round.responses.push_back(m.respond(inst, pending.gold_hint));
      count_call();
    }
    for (const auto& r : round.responses) {
      traj.event("response", result.rounds_used, response_json(r));
    }

    auto clusters = cluster_responses(round.responses);
    traj.event("clusters", result.rounds_used, clusters_json(clusters));
    ++result.rounds_used;

    if (is_global_compose(task) && !clusters.empty()) {
      // Math-style aggregation: every member report feeds the global answer;
      // differing per-chunk reports are not conflicts.
      std::vector<std::vector<long long>> reports;
      for (const auto& r : round.responses) {
        if (r.kind == MemberResponse::answer) reports.push_back(integers_in(r.content));
      }
      const std::string value = task.compose.kind == ComposeKind::global_topk
                                    ? aggregate_topk(reports, task.compose.k)
                                    : aggregate_min(reports);
      history.rounds.push_back(std::move(round));
      history.resolved_facts.push_back({inst.text, value});
      traj.event("action", result.rounds_used - 1, json{{"type", "answer"}});
      ++plan_pos;
      continue;
    }

    if (clusters.empty()) {
      history.rounds.push_back(std::move(round));
      if (reissues_left > 0) {
        --reissues_left;
        traj.event("action", result.rounds_used - 1, json{{"type", "reissue"}});
        continue;
      }
      result.unresolved = true;
      result.answer = "unanswerable";
      traj.event("final", result.rounds_used - 1,
                 json{{"answer", result.answer}, {"unresolved", true}});
      if (config.history_out) *config.history_out = std::move(history);
      return result;
    }
    reissues_left = config.reissue_retries;

    AnswerCluster chosen;
    if (clusters.size() == 1) {
      chosen = clusters.front();
    } else if (config.conflict_resolution) {
      MergedEvalFn evaluate = [&](int a, int b) {
        // Fresh member context per merged pair, chunks in ascending-id order.
        std::string merged = members[a - 1].chunk();
        merged += "\n";
        merged += members[b - 1].chunk();
        Rng rng(mix_seed(config.profile.rng_seed, 0x6d657267ull, ++merge_counter));
        auto resp = evaluate_merged(kind, config.profile, merged, inst, pending.gold_hint,
                                    rng, a);
        count_call();
        ++result.merged_invocations;
        return resp;
      };
      ResolveResult rr = resolve_conflict(clusters, evaluate);
      for (const auto& m : rr.merged_log) {
        round.merged_queries.push_back({m.member_a, m.member_b, m.merged_answer});
        traj.event("merge", result.rounds_used - 1,
                   json{{"pair", {m.member_a, m.member_b}},
                        {"merged_answer", m.merged_answer},
                        {"eliminated", m.eliminated_member}});
      }
      chosen = *rr.survivor;
    } else {
      chosen = plurality_cluster(clusters);
    }

    history.rounds.push_back(std::move(round));
    history.resolved_facts.push_back({inst.text, chosen.display});
    traj.event("action", result.rounds_used - 1,
               json{{"type", plan_pos + 1 < plan.size() ? "new_state" : "answer"},
                    {"resolved", chosen.display}});
    ++plan_pos;
  }

  if (plan_pos < plan.size()) {
    result.unresolved = true;
    result.answer = history.resolved_facts.empty() ? "unanswerable"
                                                   : history.resolved_facts.back().answer;
  } else {
    result.answer = deduce_answer(history, task);
  }
  traj.event("final", result.rounds_used - 1,
             json{{"answer", result.answer}, {"unresolved", result.unresolved}});
  if (config.history_out) *config.history_out = std::move(history);
  return result;
}

FinalResult orchestrate_llm(const TaskSpec& task, const std::string& document,
                            const OrchestratorConfig& config,
                            const LLMEndpointConfig& endpoint, const PromptSet& prompts) {
  if (document.empty()) throw InvalidInputError("document is empty");

  Trajectory traj(config.trajectory);
  const ExpertKind kind =
      task.expert_override
          ? *task.expert_override
          : select_expert_llm(task.description, config.registry, endpoint, prompts);
  traj.event("recruit", 0, json{{"expert", std::string(expert_name(kind))}});
  const std::string system_prompt = config.registry.entries.at(kind).system_prompt;

  const ChunkBoundary boundary = config.boundary.value_or(
      kind == ExpertKind::kv ? ChunkBoundary::line : ChunkBoundary::hard);
  const auto chunks = partition(document, config.chunk_size, boundary);

  FinalResult result;
  DialogueHistory history;
  auto count_call = [&] {
    ++result.member_invocations;
    if (config.call_counter) ++(*config.call_counter);
  };

  // First instruction comes from the instruct prompt.
  const std::map<std::string, std::string> base_vars = {
      {"member_nums", std::to_string(chunks.size())},
      {"task_description", task.description},
      {"task_objective", task.query},
  };
  std::string reply = chat_completion(endpoint, "", render_template(prompts.instruct, base_vars));
  ParsedMessage leader_msg = parse_agent_message(reply);
  if (leader_msg.type == MessageType::answer) {
    result.answer = leader_msg.content;
    result.rounds_used = 0;
    traj.event("final", 0, json{{"answer", result.answer}, {"unresolved", false}});
    return result;
  }
  if (leader_msg.type != MessageType::instruction) {
    throw ProtocolError("leader reply is neither an instruction nor an answer", reply);
  }

  while (result.rounds_used < config.round_limit) {
    const int round = result.rounds_used;
    Instruction inst{leader_msg.content, round};
    traj.event("instruction", round, json{{"text", inst.text}});

    DialogueRound dr;
    dr.instruction = inst;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      auto vars = std::map<std::string, std::string>{{"member_document", chunks[i].text},
                                                     {"instruction", inst.text}};
      const std::string member_reply =
          chat_completion(endpoint, system_prompt, render_template(prompts.member_query, vars));
      count_call();
      ParsedMessage parsed = parse_agent_message(member_reply);
      MemberResponse r;
      r.member_id = static_cast<int>(i) + 1;
      r.raw = member_reply;
      if (parsed.type != MessageType::response && parsed.type != MessageType::answer) {
        throw ProtocolError("member reply has unexpected type", member_reply);
      }
      if (is_reject_content(parsed.content)) {
        r.kind = MemberResponse::reject;
      } else {
        r.kind = MemberResponse::answer;
        r.content = parsed.content;
      }
      dr.responses.push_back(std::move(r));
      traj.event("response", round, response_json(dr.responses.back()));
    }

    auto clusters = cluster_responses(dr.responses);
    traj.event("clusters", round, clusters_json(clusters));
    ++result.rounds_used;

    std::string summary;
    if (clusters.empty()) {
      summary = "All members replied that the document does not contain the answer.";
    } else {
      AnswerCluster chosen;
      if (clusters.size() == 1 || !config.conflict_resolution) {
        chosen = clusters.size() == 1 ? clusters.front() : plurality_cluster(clusters);
      } else {
        MergedEvalFn evaluate = [&](int a, int b) {
          std::string merged = chunks[a - 1].text;
          merged += "\n";
          merged += chunks[b - 1].text;
          auto vars = std::map<std::string, std::string>{{"member_document", merged},
                                                         {"instruction", inst.text}};
          const std::string merged_reply = chat_completion(
              endpoint, system_prompt, render_template(prompts.member_query, vars));
          count_call();
          ++result.merged_invocations;
          ParsedMessage pm = parse_agent_message(merged_reply);
          MemberResponse r;
          r.member_id = a;
          r.raw = merged_reply;
          if (is_reject_content(pm.content)) {
            r.kind = MemberResponse::reject;
          } else {
            r.kind = MemberResponse::answer;
            r.content = pm.content;
          }
          return r;
        };
        ResolveResult rr = resolve_conflict(clusters, evaluate);
        for (const auto& m : rr.merged_log) {
          dr.merged_queries.push_back({m.member_a, m.member_b, m.merged_answer});
          traj.event("merge", round,
                     json{{"pair", {m.member_a, m.member_b}},
                          {"merged_answer", m.merged_answer},
                          {"eliminated", m.eliminated_member}});
        }
        chosen = *rr.survivor;
      }
      summary = "Member " + std::to_string(chosen.member_ids.front()) + ": " + chosen.display;
      history.resolved_facts.push_back({inst.text, chosen.display});
    }
    history.rounds.push_back(std::move(dr));

    auto vars = base_vars;
    vars["member_responses"] = summary;
    reply = chat_completion(endpoint, "", render_template(prompts.determine, vars));
    leader_msg = parse_agent_message(reply);
    if (leader_msg.type == MessageType::answer) {
      result.answer = leader_msg.content;
      traj.event("action", round, json{{"type", "answer"}});
      traj.event("final", round, json{{"answer", result.answer}, {"unresolved", false}});
      if (config.history_out) *config.history_out = std::move(history);
      return result;
    }
    if (leader_msg.type != MessageType::instruction) {
      throw ProtocolError("determination reply is neither an answer nor an instruction",
                          reply);
    }
    traj.event("action", round, json{{"type", "new_state"}});
  }

  result.unresolved = true;
  result.answer = history.resolved_facts.empty() ? "unanswerable"
                                                 : history.resolved_facts.back().answer;
  traj.event("final", result.rounds_used - 1,
             json{{"answer", result.answer}, {"unresolved", true}});
  if (config.history_out) *config.history_out = std::move(history);
  return result;
}

}  // namespace crew
