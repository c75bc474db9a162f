#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace crew {

/// Haystack source: a bag of distractor documents with precomputed
/// whitespace token counts.
struct Corpus {
  std::vector<std::string> docs;
  std::vector<std::size_t> token_counts;
  std::size_t total_tokens = 0;

  void add(std::string doc);

  /// Deterministic filler prose built from a fixed word list; used when no
  /// corpus files are supplied.
  static Corpus synthetic(std::size_t n_docs, std::size_t min_tokens,
                          std::size_t max_tokens, std::uint64_t seed);

  /// JSON array of objects with at least a "context" field (the document
  /// text); "question"/"answer"/"title" are accepted and ignored here.
  static Corpus load_json_file(const std::string& path);
};

}  // namespace crew
