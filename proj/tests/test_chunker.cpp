#include "doctest.h"

#include <string>

#include "chunkcrew/chunker.hpp"
#include "chunkcrew/errors.hpp"
#include "chunkcrew/rng.hpp"
#include "chunkcrew/tokenizer.hpp"

using namespace crew;

namespace {

std::string concat_chunks(const std::vector<Chunk>& chunks) {
  std::string out;
  for (const auto& c : chunks) out += c.text;
  return out;
}

std::string random_text(Rng& rng, bool with_newlines) {
  const std::size_t words = 1 + rng.bounded(400);
  std::string out;
  for (std::size_t w = 0; w < words; ++w) {
    const std::size_t len = 1 + rng.bounded(8);
    for (std::size_t i = 0; i < len; ++i) {
      out.push_back(static_cast<char>('a' + rng.bounded(26)));
    }
    const std::size_t seps = 1 + rng.bounded(3);
    for (std::size_t s = 0; s < seps; ++s) {
      const auto pick = rng.bounded(with_newlines ? 3 : 2);
      out.push_back(pick == 0 ? ' ' : pick == 1 ? '\t' : '\n');
    }
  }
  return out;
}

}  // namespace

TEST_CASE("whitespace token counting") {
  CHECK(count_tokens("one two  three") == 3);
  CHECK(count_tokens("  padded  ") == 1);
  CHECK(count_tokens("") == 0);
  CHECK(count_tokens(" \t\n ") == 0);

  const auto spans = token_spans("ab  cd");
  REQUIRE(spans.size() == 2);
  CHECK(spans[0] == std::pair<std::size_t, std::size_t>{0, 2});
  CHECK(spans[1] == std::pair<std::size_t, std::size_t>{4, 6});
}

TEST_CASE("reference tokenizer uses the fixture table") {
  TokenizerSpec spec;
  spec.mode = TokenizerMode::reference;
  spec.reference_counts["hello world"] = 7;
  CHECK(count_tokens("hello world", spec) == 7);
  CHECK_THROWS_AS(count_tokens("unseen text", spec), MissingFixtureError);
}

TEST_CASE("partition rejects bad input") {
  CHECK_THROWS_AS(partition("", 10), InvalidInputError);
  CHECK_THROWS_AS(partition("some text", 0), ConfigError);
}

TEST_CASE("whitespace-only text becomes one empty-token chunk") {
  const auto chunks = partition("  \n\t ", 5);
  REQUIRE(chunks.size() == 1);
  CHECK(chunks[0].token_count == 0);
  CHECK(chunks[0].text == "  \n\t ");
}

TEST_CASE("hard partition yields exactly ceil(tokens/chunk_size) chunks") {
  const std::string text = "a b c d e f g";
  const auto chunks = partition(text, 3);
  REQUIRE(chunks.size() == 3);  // ceil(7/3)
  CHECK(chunks[0].token_count == 3);
  CHECK(chunks[1].token_count == 3);
  CHECK(chunks[2].token_count == 1);
  CHECK(concat_chunks(chunks) == text);
}

TEST_CASE("line partition keeps lines whole and splits oversize lines") {
  const std::string text = "a b\nc d\ne f g h i\nj\n";
  const auto chunks = partition(text, 4, ChunkBoundary::line);
  CHECK(concat_chunks(chunks) == text);
  for (const auto& c : chunks) CHECK(c.token_count <= 4);
  // The 5-token line cannot fit in one chunk and must be hard-split.
  bool oversize_split = false;
  for (const auto& c : chunks) {
    if (c.text.find("e f g h") != std::string::npos && c.text.find('i') == std::string::npos) {
      oversize_split = true;
    }
  }
  CHECK(oversize_split);
}

TEST_CASE("chunk spans are disjoint, ordered, and indexed") {
  const std::string text = "alpha beta\ngamma delta epsilon\nzeta";
  for (auto boundary : {ChunkBoundary::hard, ChunkBoundary::line}) {
    const auto chunks = partition(text, 2, boundary);
    std::size_t prev_end = 0;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      CHECK(chunks[i].index == i);
      CHECK(chunks[i].begin == prev_end);
      CHECK(chunks[i].end > chunks[i].begin);
      prev_end = chunks[i].end;
    }
    CHECK(prev_end == text.size());
  }
}

TEST_CASE("randomized round-trip and count invariants") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const bool with_newlines = trial % 2 == 0;
    const std::string text = random_text(rng, with_newlines);
    const std::size_t chunk_size = 1 + rng.bounded(7);
    const std::size_t tokens = count_tokens(text);

    const auto hard = partition(text, chunk_size, ChunkBoundary::hard);
    CHECK(concat_chunks(hard) == text);
    CHECK(hard.size() == (tokens + chunk_size - 1) / chunk_size);
    std::size_t covered = 0;
    for (const auto& c : hard) {
      CHECK(c.token_count <= chunk_size);
      covered += c.token_count;
    }
    CHECK(covered == tokens);

    const auto lines = partition(text, chunk_size, ChunkBoundary::line);
    CHECK(concat_chunks(lines) == text);
    std::size_t line_tokens = 0;
    for (const auto& c : lines) {
      CHECK(c.token_count <= chunk_size);
      line_tokens += c.token_count;
    }
    CHECK(line_tokens == tokens);
  }
}
