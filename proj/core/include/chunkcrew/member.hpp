#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chunkcrew/rng.hpp"

namespace crew {

enum class ExpertKind { qa, kv, number, passkey, math_find };

std::string_view expert_name(ExpertKind kind);  // e.g. "QA member"
std::optional<ExpertKind> expert_from_name(std::string_view name);

struct Instruction {
  std::string text;
  int round_index = 0;
};

struct MemberResponse {
  int member_id = 0;
  enum Kind { answer, reject } kind = reject;
  std::string content;  // empty iff reject
  std::string raw;      // original message text as received
};

/// Parameters of the simulated-member hallucination model. A member whose
/// chunk lacks the answer rejects with probability p_reject_correct and
/// otherwise fabricates. A member whose chunk does contain the answer is
/// always truthful on first query; post_merge_fidelity only governs
/// re-evaluation on merged chunks.
struct HallucinationProfile {
  double p_reject_correct = 1.0;
  std::vector<std::string> fabrication_pool;
  double post_merge_fidelity = 1.0;
  std::uint64_t rng_seed = 0;
};

enum class MathVariant { top1, top2, top3, min };

// Task-specific chunk extractors. All deterministic pure scans.
std::optional<std::string> passkey_extract(std::string_view chunk_text);
std::optional<std::string> kv_lookup(std::string_view chunk_text, std::string_view key);
std::optional<std::string> number_extract(std::string_view chunk_text);

/// Distinct integers of the chunk: the K largest in descending order, or the
/// single minimum. Empty result means the chunk had no integers (reject).
std::vector<long long> math_report(std::string_view chunk_text, MathVariant variant);

std::vector<long long> integers_in(std::string_view text);
MathVariant math_variant_from_instruction(std::string_view instruction);

/// What a truthful member of the given kind would answer from this chunk,
/// or nullopt when the chunk has nothing relevant. For QA the planted
/// answer is supplied as gold_hint; for KV the key is parsed from the
/// instruction text.
std::optional<std::string> extract_answer(ExpertKind kind, std::string_view chunk_text,
                                          const Instruction& instruction,
                                          const std::optional<std::string>& gold_hint);

/// A deterministic simulated expert member holding one chunk. Each member
/// owns an independent RNG stream (stream id = ordinal), so a round's
/// responses can be computed concurrently.
class SimulatedMember {
public:
  SimulatedMember(int ordinal, ExpertKind kind, const HallucinationProfile& profile,
                  std::string chunk_text);

  MemberResponse respond(const Instruction& instruction,
                         const std::optional<std::string>& gold_hint);

  int ordinal() const { return ordinal_; }
  const std::string& chunk() const { return chunk_; }

private:
  int ordinal_;
  ExpertKind kind_;
  HallucinationProfile profile_;
  std::string chunk_;
  Rng rng_;
};

/// One fresh evaluation of `instruction` against a merged chunk pair, used
/// by the conflict tournament. post_merge_fidelity applies here.
MemberResponse evaluate_merged(ExpertKind kind, const HallucinationProfile& profile,
                               std::string_view merged_chunk, const Instruction& instruction,
                               const std::optional<std::string>& gold_hint, Rng& rng,
                               int synthetic_id);

}  // namespace crew
