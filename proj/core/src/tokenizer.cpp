#include "chunkcrew/tokenizer.hpp"

#include <cctype>

#include "chunkcrew/errors.hpp"

namespace crew {

static bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

std::vector<std::pair<std::size_t, std::size_t>> token_spans(std::string_view text) {
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    while (i < n && is_space(text[i])) ++i;
    if (i >= n) break;
    std::size_t start = i;
    while (i < n && !is_space(text[i])) ++i;
    spans.emplace_back(start, i);
  }
  return spans;
}

std::size_t count_tokens(std::string_view text, const TokenizerSpec& spec) {
  if (spec.mode == TokenizerMode::whitespace) {
    std::size_t count = 0;
    bool in_token = false;
    for (char c : text) {
      if (is_space(c)) {
        in_token = false;
      } else if (!in_token) {
        in_token = true;
        ++count;
      }
    }
    return count;
  }
  auto it = spec.reference_counts.find(std::string(text));
  if (it == spec.reference_counts.end()) {
    throw MissingFixtureError("reference tokenizer has no entry for the given text");
  }
  return it->second;
}

}  // namespace crew
