#include "chunkcrew/chunker.hpp"

#include <algorithm>

#include "chunkcrew/errors.hpp"

namespace crew {

namespace {

Chunk make_chunk(std::string_view source, std::size_t index, std::size_t begin,
                 std::size_t end, std::size_t tokens) {
  Chunk c;
  c.index = index;
  c.begin = begin;
  c.end = end;
  c.text = std::string(source.substr(begin, end - begin));
  c.token_count = tokens;
  return c;
}

// Hard split of the token range [span_first, span_last) into pieces of at
// most chunk_size tokens. Each piece ends at the byte offset where its last
// token ends; leading whitespace therefore belongs to the piece that follows
// it, and the final piece absorbs any trailing whitespace of the region.
std::vector<Chunk> hard_split(std::string_view source,
                              const std::vector<std::pair<std::size_t, std::size_t>>& spans,
                              std::size_t span_first, std::size_t span_last,
                              std::size_t chunk_size, std::size_t region_begin,
                              std::size_t region_end, std::size_t index_base) {
  std::vector<Chunk> out;
  const std::size_t total = span_last - span_first;
  const std::size_t pieces = (total + chunk_size - 1) / chunk_size;
  std::size_t prev = region_begin;
  for (std::size_t p = 0; p < pieces; ++p) {
    std::size_t tok_hi = std::min(span_first + (p + 1) * chunk_size, span_last);
    std::size_t end = (p + 1 == pieces) ? region_end : spans[tok_hi - 1].second;
    std::size_t tokens = tok_hi - (span_first + p * chunk_size);
    out.push_back(make_chunk(source, index_base + p, prev, end, tokens));
    prev = end;
  }
  return out;
}

}  // namespace

std::vector<Chunk> partition(std::string_view text, std::size_t chunk_size,
                             ChunkBoundary boundary) {
  if (chunk_size == 0) throw ConfigError("chunk_size must be at least 1");
  if (text.empty()) throw InvalidInputError("cannot partition empty text");

  const auto spans = token_spans(text);
  if (spans.empty()) {
    // Whitespace-only input: a single chunk carrying zero tokens.
    return {make_chunk(text, 0, 0, text.size(), 0)};
  }

  if (boundary == ChunkBoundary::hard) {
    return hard_split(text, spans, 0, spans.size(), chunk_size, 0, text.size(), 0);
  }

  // Line mode: greedily pack whole lines (terminators included) while the
  // token budget holds; a line that alone exceeds chunk_size is hard-split.
  // Lines are contiguous, so the pending group always starts where the last
  // emitted chunk ended.
  struct Line {
    std::size_t begin, end;        // byte range, '\n' included
    std::size_t span_lo, span_hi;  // token index range
  };
  std::vector<Line> lines;
  {
    std::size_t pos = 0, span_cursor = 0;
    while (pos < text.size()) {
      std::size_t nl = text.find('\n', pos);
      std::size_t end = (nl == std::string_view::npos) ? text.size() : nl + 1;
      std::size_t lo = span_cursor;
      while (span_cursor < spans.size() && spans[span_cursor].first < end) ++span_cursor;
      lines.push_back({pos, end, lo, span_cursor});
      pos = end;
    }
  }

  std::vector<Chunk> out;
  std::size_t group_begin = 0;
  std::size_t group_end = 0;
  std::size_t group_tokens = 0;

  auto flush = [&] {
    if (group_end > group_begin) {
      out.push_back(make_chunk(text, out.size(), group_begin, group_end, group_tokens));
    }
    group_begin = group_end;
    group_tokens = 0;
  };

  for (const Line& line : lines) {
    const std::size_t line_tokens = line.span_hi - line.span_lo;
    if (line_tokens > chunk_size) {
      flush();
      auto pieces = hard_split(text, spans, line.span_lo, line.span_hi, chunk_size,
                               line.begin, line.end, out.size());
      for (auto& p : pieces) out.push_back(std::move(p));
      group_begin = line.end;
      group_end = line.end;
      continue;
    }
    if (group_tokens + line_tokens > chunk_size) flush();
    group_tokens += line_tokens;
    group_end = line.end;
  }
  flush();

  for (std::size_t i = 0; i < out.size(); ++i) out[i].index = i;
  return out;
}

}  // namespace crew
