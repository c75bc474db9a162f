#include "chunkcrew/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "chunkcrew/errors.hpp"
#include "chunkcrew/rng.hpp"
#include "chunkcrew/tokenizer.hpp"

namespace crew {

void Corpus::add(std::string doc) {
  const std::size_t tokens = count_tokens(doc);
  docs.push_back(std::move(doc));
  token_counts.push_back(tokens);
  total_tokens += tokens;
}

namespace {

constexpr std::array<const char*, 64> kWords = {
    "the",     "committee", "reviewed",  "annual",   "report",   "during",
    "harvest", "season",    "while",     "local",    "council",  "discussed",
    "river",   "levels",    "market",    "prices",   "remained", "stable",
    "across",  "region",    "farmers",   "planted",  "barley",   "under",
    "clear",   "skies",     "museum",    "opened",   "new",      "gallery",
    "featuring", "early",   "maps",      "traders",  "arrived",  "with",
    "cloth",   "spices",    "harbor",    "master",   "recorded", "every",
    "vessel",  "library",   "archives",  "contain",  "letters",  "from",
    "various", "guilds",    "orchestra", "rehearsed", "in",      "old",
    "granary", "bridge",    "repairs",   "continued", "through", "autumn",
    "scholars", "debated",  "translation", "methods",
};

}  // namespace

Corpus Corpus::synthetic(std::size_t n_docs, std::size_t min_tokens,
                         std::size_t max_tokens, std::uint64_t seed) {
  Corpus corpus;
  Rng rng(mix_seed(seed, 0x636f7270ull));
  for (std::size_t d = 0; d < n_docs; ++d) {
    const std::size_t target =
        min_tokens + rng.bounded(max_tokens - min_tokens + 1);
    std::string doc;
    std::size_t emitted = 0;
    while (emitted < target) {
      const std::size_t sentence_len =
          std::min<std::size_t>(6 + rng.bounded(9), target - emitted);
      for (std::size_t w = 0; w < sentence_len; ++w) {
        std::string word = kWords[rng.bounded(kWords.size())];
        if (w == 0) word[0] = static_cast<char>(std::toupper(word[0]));
        if (!doc.empty()) doc += ' ';
        doc += word;
      }
      doc += '.';
      emitted += sentence_len;
    }
    corpus.add(std::move(doc));
  }
  return corpus;
}

Corpus Corpus::load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open corpus file: " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_array()) {
    throw CorpusError("corpus file is not a JSON array: " + path);
  }
  Corpus corpus;
  for (const auto& entry : j) {
    if (!entry.is_object() || !entry.contains("context") ||
        !entry["context"].is_string()) {
      throw CorpusError("corpus entry lacks a string 'context' field: " + path);
    }
    corpus.add(entry["context"].get<std::string>());
  }
  if (corpus.docs.empty()) throw CorpusError("corpus file is empty: " + path);
  return corpus;
}

}  // namespace crew
