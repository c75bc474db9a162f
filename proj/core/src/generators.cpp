#include "chunkcrew/generators.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>

#include "chunkcrew/errors.hpp"
#include "chunkcrew/rng.hpp"
#include "chunkcrew/tokenizer.hpp"

namespace crew {

std::vector<std::size_t> default_lengths() {
  std::vector<std::size_t> lengths;
  for (int i = 0; i < 15; ++i) {
    lengths.push_back(static_cast<std::size_t>(std::llround(1000.0 + i * 127000.0 / 14.0)));
  }
  return lengths;
}

std::vector<double> default_single_depths() {
  std::vector<double> depths;
  for (int i = 0; i < 10; ++i) depths.push_back(i / 9.0);
  return depths;
}

std::vector<std::pair<double, double>> multi_depth_pairs() {
  const double d[4] = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  std::vector<std::pair<double, double>> pairs;
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) pairs.emplace_back(d[a], d[b]);
  }
  return pairs;
}

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

bool matches_ci(std::string_view text, std::size_t pos, std::string_view pattern) {
  if (pos + pattern.size() > text.size()) return false;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[pos + i])) !=
        std::tolower(static_cast<unsigned char>(pattern[i]))) {
      return false;
    }
  }
  return true;
}

std::string shape_like(std::string_view matched, std::string_view replacement) {
  std::string out(replacement);
  bool all_upper = matched.size() > 1;
  for (char c : matched) {
    if (std::isalpha(static_cast<unsigned char>(c)) &&
        !std::isupper(static_cast<unsigned char>(c))) {
      all_upper = false;
      break;
    }
  }
  if (all_upper) {
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
  }
  if (!matched.empty() && !out.empty() &&
      std::isalpha(static_cast<unsigned char>(matched.front()))) {
    if (std::isupper(static_cast<unsigned char>(matched.front()))) {
      out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    } else {
      bool all_lower = true;
      for (char c : matched) {
        if (std::isalpha(static_cast<unsigned char>(c)) &&
            std::isupper(static_cast<unsigned char>(c))) {
          all_lower = false;
          break;
        }
      }
      if (all_lower) {
        for (auto& c : out) {
          c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
      }
    }
  }
  return out;
}

}  // namespace

std::string apply_entity_replacement(
    const std::string& doc,
    const std::vector<std::pair<std::string, std::string>>& entity_map) {
  if (entity_map.empty()) return doc;
  std::set<std::string> seen;
  for (const auto& [original, _] : entity_map) {
    if (original.empty()) throw InvalidInputError("entity map contains an empty original");
    if (!seen.insert(original).second) {
      throw InvalidInputError("entity map lists '" + original + "' twice");
    }
  }
  // Longest original first, so "New York City" is consumed before "New York"
  // can leave a composite behind.
  std::vector<std::pair<std::string, std::string>> ordered(entity_map);
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    return a.first.size() > b.first.size();
  });

  std::string out;
  out.reserve(doc.size());
  std::size_t pos = 0;
  while (pos < doc.size()) {
    bool replaced = false;
    const bool word_start = pos == 0 || !is_word_char(doc[pos - 1]);
    if (word_start) {
      for (const auto& [original, fictional] : ordered) {
        if (!matches_ci(doc, pos, original)) continue;
        const std::size_t end = pos + original.size();
        if (end < doc.size() && is_word_char(doc[end])) continue;
        out += shape_like(std::string_view(doc).substr(pos, original.size()), fictional);
        pos = end;
        replaced = true;
        break;
      }
    }
    if (!replaced) out += doc[pos++];
  }
  return out;
}

namespace {

std::string trim_to_tokens(const std::string& doc, std::size_t tokens) {
  const auto spans = token_spans(doc);
  if (tokens >= spans.size()) return doc;
  if (tokens == 0) return {};
  return doc.substr(0, spans[tokens - 1].second);
}

std::string format_depth(double d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.2f", d);
  return buf;
}

// Distractor documents totalling exactly `target` tokens, sampled without
// replacement until the corpus is exhausted, then reshuffled.
std::vector<std::string> pick_distractors(const Corpus& corpus, std::size_t target,
                                          Rng& rng) {
  std::vector<std::string> picked;
  if (target == 0) return picked;
  std::vector<std::size_t> order(corpus.docs.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::size_t oi = 0, acc = 0;
  while (acc < target) {
    if (oi == order.size()) {
      rng.shuffle(order);
      oi = 0;
    }
    const std::size_t idx = order[oi++];
    const std::size_t t = corpus.token_counts[idx];
    if (t == 0) continue;
    if (acc + t <= target) {
      picked.push_back(corpus.docs[idx]);
      acc += t;
    } else {
      picked.push_back(trim_to_tokens(corpus.docs[idx], target - acc));
      acc = target;
    }
  }
  return picked;
}

std::size_t nearest_boundary(const std::vector<std::size_t>& prefix, long long desired) {
  std::size_t best = 0;
  long long best_dist = -1;
  for (std::size_t j = 0; j < prefix.size(); ++j) {
    const long long dist = std::llabs(static_cast<long long>(prefix[j]) - desired);
    if (best_dist < 0 || dist < best_dist) {
      best_dist = dist;
      best = j;
    }
  }
  return best;
}

std::vector<std::size_t> boundary_prefix(const std::vector<std::string>& docs) {
  std::vector<std::size_t> prefix{0};
  for (const auto& d : docs) prefix.push_back(prefix.back() + count_tokens(d));
  return prefix;
}

std::string join_docs(const std::vector<std::string>& docs) {
  std::string out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (i) out += "\n\n";
    out += docs[i];
  }
  return out;
}

}  // namespace

void oracle_check(const TestCase& c) {
  if (c.gold.empty()) throw Error("generated case has empty gold: " + c.id);
  const std::size_t tokens = count_tokens(c.document);
  const double lo = 0.98 * static_cast<double>(c.meta.length);
  const double hi = 1.02 * static_cast<double>(c.meta.length);
  if (c.meta.length > 0 && (tokens < lo || tokens > hi)) {
    throw Error("generated case token count " + std::to_string(tokens) +
                " outside 2% of " + std::to_string(c.meta.length) + ": " + c.id);
  }
  switch (c.kind) {
    case TaskKind::niah_single:
    case TaskKind::niah_multi:
      if (c.document.find(c.gold) == std::string::npos) {
        throw Error("gold answer not findable in document: " + c.id);
      }
      for (const auto& sq : c.meta.subquestions) {
        if (sq.gold_hint && c.document.find(*sq.gold_hint) == std::string::npos) {
          throw Error("subquestion fact not findable in document: " + c.id);
        }
      }
      break;
    case TaskKind::passkey:
      if (passkey_extract(c.document).value_or("") != c.gold) {
        throw Error("passkey oracle failed: " + c.id);
      }
      break;
    case TaskKind::number:
      if (number_extract(c.document).value_or("") != c.gold) {
        throw Error("number oracle failed: " + c.id);
      }
      break;
    case TaskKind::kv: {
      static const std::string key_marker = "Key: \"";
      const std::size_t kpos = c.query.find(key_marker);
      if (kpos == std::string::npos) throw Error("kv query has no key: " + c.id);
      const std::size_t kend = c.query.find('"', kpos + key_marker.size());
      const std::string key =
          c.query.substr(kpos + key_marker.size(), kend - kpos - key_marker.size());
      if (kv_lookup(c.document, key).value_or("") != c.gold) {
        throw Error("kv oracle failed: " + c.id);
      }
      break;
    }
    case TaskKind::math_find: {
      auto nums = integers_in(c.document);
      std::set<long long> distinct(nums.begin(), nums.end());
      long long expect = 0;
      if (c.meta.variant == "min") {
        expect = *distinct.begin();
      } else {
        int k = c.meta.variant == "top3" ? 3 : c.meta.variant == "top2" ? 2 : 1;
        auto it = distinct.rbegin();
        std::advance(it, k - 1);
        expect = *it;
      }
      if (std::to_string(expect) != c.gold) {
        throw Error("math oracle failed: " + c.id);
      }
      break;
    }
  }
}

TestCase build_single_doc_case(const NeedleSpec& needle, const Corpus& corpus,
                               const PlacementPlan& plan, std::uint64_t seed) {
  if (needle.needle_docs.size() != 1) {
    throw InvalidInputError("single-doc case requires exactly 1 needle document");
  }
  if (plan.depths.size() != 1) {
    throw InvalidInputError("single-doc placement requires exactly 1 depth");
  }
  if (corpus.total_tokens < plan.context_length) {
    throw CorpusError("corpus token mass is smaller than the requested context length");
  }
  Rng rng(mix_seed(seed, 0x73696e67ull));
  const std::string needle_doc =
      apply_entity_replacement(needle.needle_docs[0], needle.entity_map);
  const std::size_t needle_tokens = count_tokens(needle_doc);
  const std::size_t target = plan.context_length;
  const std::size_t distract = target > needle_tokens ? target - needle_tokens : 0;

  auto docs = pick_distractors(corpus, distract, rng);
  const auto prefix = boundary_prefix(docs);
  const double depth = plan.depths[0];
  const std::size_t slot =
      nearest_boundary(prefix, std::llround(depth * static_cast<double>(distract)));
  docs.insert(docs.begin() + static_cast<std::ptrdiff_t>(slot), needle_doc);

  TestCase c;
  c.id = "niah_single-L" + std::to_string(target) + "-D" + format_depth(depth) + "-" +
         std::to_string(seed);
  c.kind = TaskKind::niah_single;
  c.document = join_docs(docs);
  c.query = needle.question;
  c.gold = needle.answer;
  c.meta.length = target;
  c.meta.depths = {depth};
  c.meta.seed = seed;
  c.meta.subquestions = needle.subquestions;
  c.meta.compose = needle.compose;
  oracle_check(c);
  return c;
}

TestCase build_multi_doc_case(const NeedleSpec& needle, const Corpus& corpus,
                              const PlacementPlan& plan, std::uint64_t seed) {
  if (needle.needle_docs.size() != 2) {
    throw InvalidInputError("multi-doc case requires exactly 2 needle documents");
  }
  if (plan.depths.size() != 2 || plan.depths[0] > plan.depths[1]) {
    throw InvalidInputError("multi-doc placement requires an ascending depth pair");
  }
  if (corpus.total_tokens < plan.context_length) {
    throw CorpusError("corpus token mass is smaller than the requested context length");
  }
  Rng rng(mix_seed(seed, 0x6d756c74ull));
  const std::string n1 = apply_entity_replacement(needle.needle_docs[0], needle.entity_map);
  const std::string n2 = apply_entity_replacement(needle.needle_docs[1], needle.entity_map);
  const std::size_t needle_tokens = count_tokens(n1) + count_tokens(n2);
  const std::size_t target = plan.context_length;
  const std::size_t distract = target > needle_tokens ? target - needle_tokens : 0;

  auto docs = pick_distractors(corpus, distract, rng);
  const auto prefix = boundary_prefix(docs);
  const std::size_t slot1 =
      nearest_boundary(prefix, std::llround(plan.depths[0] * static_cast<double>(distract)));
  const std::size_t slot2 =
      nearest_boundary(prefix, std::llround(plan.depths[1] * static_cast<double>(distract)));

  std::vector<std::string> assembled;
  for (std::size_t s = 0; s <= docs.size(); ++s) {
    if (s == slot1) assembled.push_back(n1);
    if (s == slot2) assembled.push_back(n2);
    if (s < docs.size()) assembled.push_back(std::move(docs[s]));
  }

  TestCase c;
  c.id = "niah_multi-L" + std::to_string(target) + "-D" + format_depth(plan.depths[0]) +
         "+" + format_depth(plan.depths[1]) + "-" + std::to_string(seed);
  c.kind = TaskKind::niah_multi;
  c.document = join_docs(assembled);
  c.query = needle.question;
  c.gold = needle.answer;
  c.meta.length = target;
  c.meta.depths = {plan.depths[0], plan.depths[1]};
  c.meta.seed = seed;
  c.meta.subquestions = needle.subquestions;
  c.meta.compose = needle.compose;
  oracle_check(c);
  return c;
}

namespace {

constexpr std::array<const char*, 8> kFillerSentences = {
    "The wind moved slowly across the quiet valley.",
    "Merchants counted their crates beside the old canal.",
    "A gray heron waited near the shallow water.",
    "Lanterns were lit along the narrow street at dusk.",
    "The miller repaired the wheel before the rains came.",
    "Travelers rested under the broad oak by the road.",
    "Bells rang twice from the tower above the square.",
    "The scribe copied ledgers until the candles burned low.",
};

// Filler of exactly `tokens` tokens as a list of sentences (the last one may
// be cut mid-sentence).
std::vector<std::string> filler_sentences(std::size_t tokens, Rng& rng) {
  std::vector<std::string> out;
  std::size_t acc = 0;
  while (acc < tokens) {
    std::string s = kFillerSentences[rng.bounded(kFillerSentences.size())];
    std::size_t t = count_tokens(s);
    if (acc + t > tokens) {
      s = trim_to_tokens(s, tokens - acc);
      t = tokens - acc;
    }
    out.push_back(std::move(s));
    acc += t;
  }
  return out;
}

std::string join_sentences(const std::vector<std::string>& sentences) {
  std::string out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i) out += ' ';
    out += sentences[i];
  }
  return out;
}

std::string format_thousands(long long v) {
  std::string digits = std::to_string(v);
  std::string out;
  int count = 0;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    if (count && count % 3 == 0) out.push_back(',');
    out.push_back(*it);
    ++count;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::string uuid4(Rng& rng) {
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(36);
  for (int group : {8, 4, 4, 4, 12}) {
    if (!out.empty()) out.push_back('-');
    for (int i = 0; i < group; ++i) out.push_back(hex[rng.bounded(16)]);
  }
  out[14] = '4';
  out[19] = hex[8 + rng.bounded(4)];
  return out;
}

}  // namespace

TestCase gen_passkey(std::size_t length, double depth, std::uint64_t seed) {
  if (length < 100) throw InvalidInputError("passkey case length must be >= 100 tokens");
  Rng rng(mix_seed(seed, 0x70617373ull));
  const long long key = rng.range(10000, 99999);
  const std::string key_str = std::to_string(key);
  const std::string marker = "The pass key is " + key_str + ". Remember it. " + key_str +
                             " is the pass key.";
  const std::size_t marker_tokens = count_tokens(marker);
  const std::size_t filler_tokens = length - marker_tokens;

  auto sentences = filler_sentences(filler_tokens, rng);
  std::vector<std::size_t> prefix{0};
  for (const auto& s : sentences) prefix.push_back(prefix.back() + count_tokens(s));
  const std::size_t slot =
      nearest_boundary(prefix, std::llround(depth * static_cast<double>(filler_tokens)));
  sentences.insert(sentences.begin() + static_cast<std::ptrdiff_t>(slot), marker);

  TestCase c;
  c.id = "passkey-L" + std::to_string(length) + "-" + std::to_string(seed);
  c.kind = TaskKind::passkey;
  c.document = join_sentences(sentences);
  c.query = "What is the pass key hidden in the document?";
  c.gold = key_str;
  c.meta.length = length;
  c.meta.depths = {depth};
  c.meta.seed = seed;
  oracle_check(c);
  if (c.document.find("The pass key is") != c.document.rfind("The pass key is")) {
    throw Error("passkey marker occurs more than once: " + c.id);
  }
  return c;
}

TestCase gen_number(std::size_t length, int occurrences, std::uint64_t seed) {
  if (occurrences < 2) throw InvalidInputError("number case requires occurrences >= 2");
  Rng rng(mix_seed(seed, 0x6e756d62ull));
  const long long hidden = rng.range(1000000, 9999999);
  const std::string hidden_str = std::to_string(hidden);
  const std::string marker = "The hidden number is " + hidden_str + ". Remember it. " +
                             hidden_str + " is the hidden number.";
  const std::size_t marker_tokens = count_tokens(marker);
  if (static_cast<std::size_t>(occurrences) * marker_tokens >= length) {
    throw InvalidInputError("number case: occurrences do not fit in the requested length");
  }
  const std::size_t filler_tokens =
      length - static_cast<std::size_t>(occurrences) * marker_tokens;

  // Noisy numeric filler; every filler figure is distinct from the hidden
  // number.
  std::vector<std::string> sentences;
  std::size_t acc = 0;
  while (acc < filler_tokens) {
    long long figure = rng.range(1000000, 9999999);
    while (figure == hidden) figure = rng.range(1000000, 9999999);
    std::string s = "The ledger records the figure " + std::to_string(figure) + ".";
    std::size_t t = count_tokens(s);
    if (acc + t > filler_tokens) {
      s = trim_to_tokens(s, filler_tokens - acc);
      t = filler_tokens - acc;
    }
    sentences.push_back(std::move(s));
    acc += t;
  }

  std::set<std::size_t> slots;
  while (slots.size() < static_cast<std::size_t>(occurrences)) {
    slots.insert(rng.bounded(sentences.size() + 1));
  }
  std::size_t inserted = 0;
  for (std::size_t slot : slots) {
    sentences.insert(sentences.begin() + static_cast<std::ptrdiff_t>(slot + inserted), marker);
    ++inserted;
  }

  TestCase c;
  c.id = "number-L" + std::to_string(length) + "-" + std::to_string(seed);
  c.kind = TaskKind::number;
  c.document = join_sentences(sentences);
  c.query = "What is the repeated hidden number in the document?";
  c.gold = hidden_str;
  c.meta.length = length;
  c.meta.seed = seed;
  c.meta.variant = "x" + std::to_string(occurrences);
  oracle_check(c);
  return c;
}

TestCase gen_kv(int num_pairs, int key_index, std::uint64_t seed) {
  if (num_pairs < 1 || key_index < 0 || key_index >= num_pairs) {
    throw InvalidInputError("gen_kv requires 0 <= key_index < num_pairs");
  }
  Rng rng(mix_seed(seed, 0x6b76ull));
  std::set<std::string> used;
  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(static_cast<std::size_t>(num_pairs));
  while (pairs.size() < static_cast<std::size_t>(num_pairs)) {
    std::string k = uuid4(rng);
    std::string v = uuid4(rng);
    if (!used.insert(k).second || !used.insert(v).second) continue;
    pairs.emplace_back(std::move(k), std::move(v));
  }
  std::string doc;
  for (const auto& [k, v] : pairs) {
    doc += '"';
    doc += k;
    doc += "\": \"";
    doc += v;
    doc += "\"\n";
  }

  TestCase c;
  c.id = "kv-N" + std::to_string(num_pairs) + "-" + std::to_string(seed);
  c.kind = TaskKind::kv;
  c.document = std::move(doc);
  c.query = "Finding the corresponding value from a dictionary and a key.\nKey: \"" +
            pairs[static_cast<std::size_t>(key_index)].first +
            "\"\nThe value associated with the specified key is: ";
  c.gold = pairs[static_cast<std::size_t>(key_index)].second;
  c.meta.length = count_tokens(c.document);
  c.meta.seed = seed;
  oracle_check(c);
  return c;
}

TestCase gen_math(int count, MathVariant variant, std::uint64_t seed) {
  if (count < 5) throw InvalidInputError("gen_math requires count >= 5");
  Rng rng(mix_seed(seed, 0x6d617468ull));
  // Values stay within [1, 100]; the three largest and the minimum are
  // inserted exactly once so every variant has a unique answer.
  const long long vmax = 90 + rng.range(0, 10);
  const long long vmin = rng.range(1, vmax - 10);
  std::vector<long long> values = {vmax, vmax - 1, vmax - 2, vmin};
  for (int i = 4; i < count; ++i) values.push_back(rng.range(vmin + 1, vmax - 3));
  rng.shuffle(values);

  std::string doc;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) doc += (i % 20 == 0) ? '\n' : ' ';
    doc += std::to_string(values[i]);
  }

  TestCase c;
  c.kind = TaskKind::math_find;
  c.document = std::move(doc);
  c.meta.length = static_cast<std::size_t>(count);
  c.meta.seed = seed;
  switch (variant) {
    case MathVariant::top1:
      c.meta.variant = "top1";
      c.query = "You should answer with only one number, no other words. The largest "
                "number of the list is: ";
      c.gold = std::to_string(vmax);
      c.meta.compose = {ComposeKind::global_topk, "", 1};
      break;
    case MathVariant::top2:
      c.meta.variant = "top2";
      c.query = "You should answer with only one number, no other words. The largest "
                "number and second-largest number of the list are: ";
      c.gold = std::to_string(vmax - 1);
      c.meta.compose = {ComposeKind::global_topk, "", 2};
      break;
    case MathVariant::top3:
      c.meta.variant = "top3";
      c.query = "You should answer with only one number, no other words. The largest "
                "number, second-largest number and third-largest number of the list are: ";
      c.gold = std::to_string(vmax - 2);
      c.meta.compose = {ComposeKind::global_topk, "", 3};
      break;
    case MathVariant::min:
      c.meta.variant = "min";
      c.query = "You should answer with only one number, no other words. The smallest "
                "number of the list is: ";
      c.gold = std::to_string(vmin);
      c.meta.compose = {ComposeKind::global_min, "", 1};
      break;
  }
  c.id = "math-" + c.meta.variant + "-N" + std::to_string(count) + "-" + std::to_string(seed);
  oracle_check(c);
  return c;
}

namespace {

constexpr std::array<const char*, 20> kFirstNames = {
    "Ardan",  "Belric", "Corwen", "Davet",  "Elsin",  "Ferol",  "Garnet",
    "Halvor", "Ionas",  "Jesper", "Kelwin", "Loram",  "Merta",  "Norvin",
    "Olwen",  "Perrin", "Quilla", "Rostan", "Selda",  "Torvald"};

constexpr std::array<const char*, 10> kLastNames = {
    "Veyr",     "Ashgrove", "Brindel", "Calder",  "Dunmore",
    "Eastvale", "Fenwick",  "Grayling", "Holloway", "Ingram"};

constexpr std::array<const char*, 20> kCities = {
    "Veldmara",  "Ostrine",  "Quellan",   "Brathol",   "Miradon",
    "Selvara",   "Torvyn",   "Ashverin",  "Lornholm",  "Dravenne",
    "Ketsfield", "Ulmora",   "Virelay",   "Norsten",   "Galdora",
    "Pellmere",  "Rhyddan",  "Sorvale",   "Embervale", "Cresdon"};

}  // namespace

std::vector<NeedleSpec> synthetic_single_needles(std::size_t n, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x6e64736eull));
  std::vector<NeedleSpec> needles;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string person = std::string(kFirstNames[rng.bounded(kFirstNames.size())]) +
                               " " + kLastNames[rng.bounded(kLastNames.size())];
    const std::string city = kCities[rng.bounded(kCities.size())];
    NeedleSpec needle;
    needle.question = "In which city was " + person + " born?";
    needle.answer = city;
    needle.needle_docs.push_back(
        "Records from the provincial census mention several residents of note. " + person +
        " was born in " + city +
        ". The family later moved along the coast and kept a small trading house.");
    Subquestion sq;
    sq.text = needle.question;
    sq.entity = city;
    sq.gold_hint = city;
    needle.subquestions.push_back(std::move(sq));
    needles.push_back(std::move(needle));
  }
  return needles;
}

std::vector<NeedleSpec> synthetic_multi_needles(std::size_t n, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x6e646d75ull));
  std::vector<NeedleSpec> needles;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t a = rng.bounded(kCities.size());
    std::size_t b = rng.bounded(kCities.size());
    while (b == a) b = rng.bounded(kCities.size());
    const std::string city_a = kCities[a];
    const std::string city_b = kCities[b];
    const long long pop_a = rng.range(100000, 999999);
    long long pop_b = rng.range(100000, 999999);
    while (pop_b == pop_a) pop_b = rng.range(100000, 999999);
    const std::string pop_a_str = format_thousands(pop_a);
    const std::string pop_b_str = format_thousands(pop_b);

    NeedleSpec needle;
    needle.question =
        "Did " + city_a + " or " + city_b + " have a population of " + pop_b_str + " in 2002?";
    needle.answer = city_b;
    needle.needle_docs.push_back(city_a +
                                 " grew quickly after the railway arrived in the region. " +
                                 city_a + " had a population of " + pop_a_str +
                                 " in 2002. Trade expanded steadily in later years.");
    needle.needle_docs.push_back(city_b +
                                 " sits at the mouth of a broad river delta. " + city_b +
                                 " had a population of " + pop_b_str +
                                 " in 2002. Its markets drew visitors from nearby towns.");
    Subquestion sq_a;
    sq_a.text = "What was the population of " + city_a + " in 2002?";
    sq_a.entity = city_a;
    sq_a.gold_hint = pop_a_str;
    Subquestion sq_b;
    sq_b.text = "What was the population of " + city_b + " in 2002?";
    sq_b.entity = city_b;
    sq_b.gold_hint = pop_b_str;
    needle.subquestions.push_back(std::move(sq_a));
    needle.subquestions.push_back(std::move(sq_b));
    needle.compose = {ComposeKind::entity_select, pop_b_str, 1};
    needles.push_back(std::move(needle));
  }
  return needles;
}

void generate_niah_single(const GeneratorConfig& config, const Corpus& corpus,
                          const std::vector<NeedleSpec>& needles, const CaseSink& sink) {
  if (needles.empty()) throw InvalidInputError("no needles supplied");
  const auto lengths = config.lengths.empty() ? default_lengths() : config.lengths;
  const auto depths = config.depths.empty() ? default_single_depths() : config.depths;
  for (std::size_t li = 0; li < lengths.size(); ++li) {
    for (std::size_t di = 0; di < depths.size(); ++di) {
      for (std::size_t s = 0; s < config.samples_per_cell; ++s) {
        const std::uint64_t case_seed = mix_seed(config.seed, li, di, s);
        const auto& needle = needles[case_seed % needles.size()];
        PlacementPlan plan{lengths[li], {depths[di]}};
        TestCase c = build_single_doc_case(needle, corpus, plan, case_seed);
        c.id = "niah_single-L" + std::to_string(lengths[li]) + "-D" +
               format_depth(depths[di]) + "-S" + std::to_string(s);
        sink(c);
      }
    }
  }
}

void generate_niah_multi(const GeneratorConfig& config, const Corpus& corpus,
                         const std::vector<NeedleSpec>& needles, const CaseSink& sink) {
  if (needles.empty()) throw InvalidInputError("no needles supplied");
  const auto lengths = config.lengths.empty() ? default_lengths() : config.lengths;
  const auto pairs = multi_depth_pairs();
  for (std::size_t li = 0; li < lengths.size(); ++li) {
    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
      for (std::size_t s = 0; s < config.samples_per_cell; ++s) {
        const std::uint64_t case_seed = mix_seed(config.seed, 1000 + li, pi, s);
        const auto& needle = needles[case_seed % needles.size()];
        PlacementPlan plan{lengths[li], {pairs[pi].first, pairs[pi].second}};
        TestCase c = build_multi_doc_case(needle, corpus, plan, case_seed);
        c.id = "niah_multi-L" + std::to_string(lengths[li]) + "-D" +
               format_depth(pairs[pi].first) + "+" + format_depth(pairs[pi].second) + "-S" +
               std::to_string(s);
        sink(c);
      }
    }
  }
}

}  // namespace crew
