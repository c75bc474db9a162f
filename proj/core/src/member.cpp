#include "chunkcrew/member.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include "chunkcrew/errors.hpp"
#include "chunkcrew/tokenizer.hpp"

namespace crew {

std::string_view expert_name(ExpertKind kind) {
  switch (kind) {
    case ExpertKind::qa: return "QA member";
    case ExpertKind::kv: return "KV member";
    case ExpertKind::number: return "NS member";
    case ExpertKind::passkey: return "PassKey member";
    case ExpertKind::math_find: return "Math member";
  }
  return "QA member";
}

std::optional<ExpertKind> expert_from_name(std::string_view name) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  };
  const std::string n = lower(name);
  if (n == "qa member" || n == "qa") return ExpertKind::qa;
  if (n == "kv member" || n == "kv") return ExpertKind::kv;
  if (n == "ns member" || n == "ns" || n == "number member") return ExpertKind::number;
  if (n == "passkey member" || n == "passkey" || n == "pass key member")
    return ExpertKind::passkey;
  if (n == "math member" || n == "math") return ExpertKind::math_find;
  return std::nullopt;
}

std::optional<std::string> passkey_extract(std::string_view chunk_text) {
  // The generator repeats the key ("The pass key is K. ... K is the pass
  // key."), so a hard chunk cut can break at most one of the two phrasings.
  static const std::regex lead(R"(The pass key is (\d+))");
  static const std::regex trail(R"((\d+) is the pass key)");
  std::cmatch m;
  if (std::regex_search(chunk_text.begin(), chunk_text.end(), m, lead)) return m[1].str();
  if (std::regex_search(chunk_text.begin(), chunk_text.end(), m, trail)) return m[1].str();
  return std::nullopt;
}

std::optional<std::string> number_extract(std::string_view chunk_text) {
  static const std::regex lead(R"(The hidden number is (\d+))");
  static const std::regex trail(R"((\d+) is the hidden number)");
  std::cmatch m;
  if (std::regex_search(chunk_text.begin(), chunk_text.end(), m, lead)) return m[1].str();
  if (std::regex_search(chunk_text.begin(), chunk_text.end(), m, trail)) return m[1].str();
  return std::nullopt;
}

std::optional<std::string> kv_lookup(std::string_view chunk_text, std::string_view key) {
  if (key.empty()) throw InvalidInputError("kv_lookup requires a nonempty key");
  std::size_t pos = 0;
  while (pos < chunk_text.size()) {
    std::size_t nl = chunk_text.find('\n', pos);
    std::string_view line = chunk_text.substr(pos, nl == std::string_view::npos
                                                       ? std::string_view::npos
                                                       : nl - pos);
    std::size_t kpos = line.find(key);
    if (kpos != std::string_view::npos) {
      std::size_t colon = line.find(':', kpos + key.size());
      if (colon != std::string_view::npos) {
        std::size_t vstart = line.find('"', colon);
        if (vstart != std::string_view::npos) {
          std::size_t vend = line.find('"', vstart + 1);
          if (vend != std::string_view::npos) {
            return std::string(line.substr(vstart + 1, vend - vstart - 1));
          }
        }
      }
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return std::nullopt;
}

std::vector<long long> integers_in(std::string_view text) {
  std::vector<long long> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    bool neg = false;
    std::size_t start = i;
    if (text[i] == '-' && i + 1 < n && std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
      neg = true;
      ++i;
    }
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
      i = start + 1;
      continue;
    }
    long long v = 0;
    while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) {
      v = v * 10 + (text[i] - '0');
      ++i;
    }
    out.push_back(neg ? -v : v);
  }
  return out;
}

std::vector<long long> math_report(std::string_view chunk_text, MathVariant variant) {
  auto nums = integers_in(chunk_text);
  if (nums.empty()) return {};
  std::set<long long> distinct(nums.begin(), nums.end());
  if (variant == MathVariant::min) return {*distinct.begin()};
  std::size_t k = variant == MathVariant::top1 ? 1 : variant == MathVariant::top2 ? 2 : 3;
  std::vector<long long> out;
  for (auto it = distinct.rbegin(); it != distinct.rend() && out.size() < k; ++it) {
    out.push_back(*it);
  }
  return out;
}

MathVariant math_variant_from_instruction(std::string_view instruction) {
  std::string s(instruction);
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s.find("third-largest") != std::string::npos ||
      s.find("third largest") != std::string::npos) {
    return MathVariant::top3;
  }
  if (s.find("second-largest") != std::string::npos ||
      s.find("second largest") != std::string::npos) {
    return MathVariant::top2;
  }
  if (s.find("smallest") != std::string::npos || s.find("minimum") != std::string::npos) {
    return MathVariant::min;
  }
  return MathVariant::top1;
}

namespace {

std::optional<std::string> key_from_instruction(std::string_view instruction) {
  static const std::regex key_re(R"(Key:\s*\"([^\"]+)\")");
  std::cmatch m;
  if (std::regex_search(instruction.begin(), instruction.end(), m, key_re)) {
    return m[1].str();
  }
  return std::nullopt;
}

std::string format_report(const std::vector<long long>& nums) {
  std::string out;
  for (std::size_t i = 0; i < nums.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(nums[i]);
  }
  return out;
}

std::string fabricate(const HallucinationProfile& profile, std::string_view chunk, Rng& rng) {
  if (!profile.fabrication_pool.empty()) {
    return profile.fabrication_pool[rng.bounded(profile.fabrication_pool.size())];
  }
  // No pool: draw an entity (a random token) from the member's own chunk.
  auto spans = token_spans(chunk);
  if (spans.empty()) return "unknown";
  auto [b, e] = spans[rng.bounded(spans.size())];
  return std::string(chunk.substr(b, e - b));
}

}  // namespace

std::optional<std::string> extract_answer(ExpertKind kind, std::string_view chunk_text,
                                          const Instruction& instruction,
                                          const std::optional<std::string>& gold_hint) {
  switch (kind) {
    case ExpertKind::qa:
      if (gold_hint && !gold_hint->empty() &&
          chunk_text.find(*gold_hint) != std::string_view::npos) {
        return *gold_hint;
      }
      return std::nullopt;
    case ExpertKind::passkey:
      return passkey_extract(chunk_text);
    case ExpertKind::number:
      return number_extract(chunk_text);
    case ExpertKind::kv: {
      auto key = key_from_instruction(instruction.text);
      if (!key) return std::nullopt;
      return kv_lookup(chunk_text, *key);
    }
    case ExpertKind::math_find: {
      auto report = math_report(chunk_text, math_variant_from_instruction(instruction.text));
      if (report.empty()) return std::nullopt;
      return format_report(report);
    }
  }
  return std::nullopt;
}

SimulatedMember::SimulatedMember(int ordinal, ExpertKind kind,
                                 const HallucinationProfile& profile, std::string chunk_text)
    : ordinal_(ordinal),
      kind_(kind),
      profile_(profile),
      chunk_(std::move(chunk_text)),
      rng_(mix_seed(profile.rng_seed, static_cast<std::uint64_t>(ordinal))) {}

MemberResponse SimulatedMember::respond(const Instruction& instruction,
                                        const std::optional<std::string>& gold_hint) {
  MemberResponse r;
  r.member_id = ordinal_;
  if (auto truth = extract_answer(kind_, chunk_, instruction, gold_hint)) {
    // A member whose chunk holds the answer never fabricates a different one.
    r.kind = MemberResponse::answer;
    r.content = *truth;
    r.raw = *truth;
    return r;
  }
  if (rng_.chance(profile_.p_reject_correct)) {
    r.kind = MemberResponse::reject;
    r.raw = "The document does not contain the answer.";
    return r;
  }
  r.kind = MemberResponse::answer;
  r.content = fabricate(profile_, chunk_, rng_);
  r.raw = r.content;
  return r;
}

MemberResponse evaluate_merged(ExpertKind kind, const HallucinationProfile& profile,
                               std::string_view merged_chunk, const Instruction& instruction,
                               const std::optional<std::string>& gold_hint, Rng& rng,
                               int synthetic_id) {
  MemberResponse r;
  r.member_id = synthetic_id;
  if (auto truth = extract_answer(kind, merged_chunk, instruction, gold_hint)) {
    if (rng.chance(profile.post_merge_fidelity)) {
      r.kind = MemberResponse::answer;
      r.content = *truth;
      r.raw = *truth;
      return r;
    }
    // Low-fidelity merged read: the member sticks to a fabricated answer.
    r.kind = MemberResponse::answer;
    r.content = fabricate(profile, merged_chunk, rng);
    r.raw = r.content;
    return r;
  }
  if (rng.chance(profile.p_reject_correct)) {
    r.kind = MemberResponse::reject;
    r.raw = "The document does not contain the answer.";
    return r;
  }
  r.kind = MemberResponse::answer;
  r.content = fabricate(profile, merged_chunk, rng);
  r.raw = r.content;
  return r;
}

}  // namespace crew
