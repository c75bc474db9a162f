#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace crew {

enum class TokenizerMode {
  /// A token is a maximal run of non-whitespace characters.
  whitespace,
  /// Counts are looked up in a user-supplied table keyed by the exact text,
  /// so fixtures can carry counts produced by any real tokenizer.
  reference,
};

struct TokenizerSpec {
  TokenizerMode mode = TokenizerMode::whitespace;
  std::map<std::string, std::size_t> reference_counts;
};

/// [start, end) byte spans of the whitespace tokens in `text`.
std::vector<std::pair<std::size_t, std::size_t>> token_spans(std::string_view text);

/// Deterministic token count per the spec. Throws MissingFixtureError in
/// reference mode when the text has no table entry.
std::size_t count_tokens(std::string_view text, const TokenizerSpec& spec = {});

}  // namespace crew
