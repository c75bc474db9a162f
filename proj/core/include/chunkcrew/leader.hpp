#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "chunkcrew/chunker.hpp"
#include "chunkcrew/llm_client.hpp"
#include "chunkcrew/member.hpp"
#include "chunkcrew/protocol.hpp"

namespace crew {

enum class ComposeKind { identity, entity_select, global_topk, global_min };

struct ComposeRule {
  ComposeKind kind = ComposeKind::identity;
  std::string target_value;  // entity_select
  int k = 1;                 // global_topk
};

struct Subquestion {
  std::string text;
  std::string entity;  // what entity_select returns when this fact matches
  std::optional<std::string> gold_hint;
};

struct TaskSpec {
  std::string description;
  std::string query;
  std::vector<Subquestion> subquestions;  // empty => single round on `query`
  ComposeRule compose;
  std::optional<ExpertKind> expert_override;
  std::optional<std::string> gold;
};

struct AnswerCluster {
  std::string canonical;         // normalized answer
  std::string display;           // first raw spelling seen
  std::vector<int> member_ids;   // sorted ascending
};

struct DialogueRound {
  Instruction instruction;
  std::vector<MemberResponse> responses;
  struct MergedQuery {
    int member_a = 0, member_b = 0;
    std::string merged_answer;
  };
  std::vector<MergedQuery> merged_queries;
};

struct DialogueHistory {
  std::vector<DialogueRound> rounds;
  struct Fact {
    std::string subquestion;
    std::string answer;
  };
  std::vector<Fact> resolved_facts;
};

/// One JSON line per round; the serialization after round i is a prefix of
/// the serialization after round i+1.
std::string serialize_history(const DialogueHistory& history);

struct NewState {
  std::string next_instruction;
};
struct Conflict {
  std::vector<AnswerCluster> clusters;
};
struct Answer {
  std::string final_text;
};
using LeaderAction = std::variant<NewState, Conflict, Answer>;

struct ExpertEntry {
  std::string display_name;
  std::vector<std::string> keywords;
  std::string system_prompt;
};

struct ExpertRegistry {
  std::map<ExpertKind, ExpertEntry> entries;
  static ExpertRegistry default_registry();
};

enum class SelectMode { keyword, llm };

/// Keyword mode: the kind whose keyword set best matches the description;
/// zero overlap or a tie is an error.
ExpertKind select_expert_keyword(const std::string& description,
                                 const ExpertRegistry& registry);
ExpertKind select_expert_llm(const std::string& description, const ExpertRegistry& registry,
                             const LLMEndpointConfig& endpoint, const PromptSet& prompts);

/// Group answer responses by normalized content; rejects are excluded and
/// clusters are ordered by their smallest member id.
std::vector<AnswerCluster> cluster_responses(const std::vector<MemberResponse>& responses);

/// Largest cluster wins; ties go to the smallest member id. The ablation
/// baseline for the merge tournament.
AnswerCluster plurality_cluster(const std::vector<AnswerCluster>& clusters);

struct MergeRecord {
  int member_a = 0, member_b = 0;   // pair, ascending ids
  std::string merged_answer;        // raw content of the merged evaluation
  int eliminated_member = -1;       // representative of the losing cluster, -1 if none
};

struct ResolveResult {
  std::optional<AnswerCluster> survivor;
  std::vector<MergeRecord> merged_log;
  std::vector<std::pair<int, int>> unresolved_pairs;
};

/// Evaluate the current instruction against the merged chunks of two member
/// representatives (ascending-id concatenation). Returns the fresh response.
using MergedEvalFn = std::function<MemberResponse(int member_a, int member_b)>;

/// Single-elimination tournament over clusters in order: the cluster whose
/// representative's original answer differs from the merged answer is
/// eliminated; if the merged answer matches neither, both survive, the pair
/// is recorded, and the earlier cluster remains the survivor seed. Clusters
/// still alive afterwards are re-fought against the current survivor until a
/// pass eliminates nobody; only then does the survivor fall back to
/// plurality among the clusters still alive.
ResolveResult resolve_conflict(const std::vector<AnswerCluster>& clusters,
                               const MergedEvalFn& evaluate);

struct OrchestratorConfig {
  std::size_t chunk_size = 2000;
  std::optional<ChunkBoundary> boundary;  // default: line for KV, hard otherwise
  int round_limit = 8;
  int reissue_retries = 2;
  bool conflict_resolution = true;
  HallucinationProfile profile;
  ExpertRegistry registry = ExpertRegistry::default_registry();
  std::ostream* trajectory = nullptr;       // JSONL event log, optional
  DialogueHistory* history_out = nullptr;   // filled when non-null
  long long* call_counter = nullptr;        // incremented per member evaluation
};

struct FinalResult {
  std::string answer;
  int rounds_used = 0;
  long long member_invocations = 0;  // includes merged-pair evaluations
  long long merged_invocations = 0;
  bool unresolved = false;
};

/// Deterministic leader policy for the simulated team: >=2 clusters resolve
/// to Conflict; one cluster advances the scripted plan or answers; zero
/// clusters reissue up to the retry limit.
LeaderAction decide_action(const DialogueHistory& history, const TaskSpec& task,
                           const std::vector<AnswerCluster>& clusters,
                           int pending_subquestions, int reissues_left);

/// Compose the final answer from resolved facts per the task's rule.
std::string deduce_answer(const DialogueHistory& history, const TaskSpec& task);

// Leader-side aggregation over member integer reports (math tasks).
std::string aggregate_topk(const std::vector<std::vector<long long>>& reports, int k);
std::string aggregate_min(const std::vector<std::vector<long long>>& reports);

/// Full simulated pipeline: expert selection, partition, one member per
/// chunk, rounds of instruct/cluster/resolve until the answer or the round
/// limit.
FinalResult orchestrate(const TaskSpec& task, const std::string& document,
                        const OrchestratorConfig& config);

/// Same protocol driven end-to-end through a chat-completions endpoint using
/// the prompt templates.
FinalResult orchestrate_llm(const TaskSpec& task, const std::string& document,
                            const OrchestratorConfig& config,
                            const LLMEndpointConfig& endpoint, const PromptSet& prompts);

}  // namespace crew
