#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "chunkcrew/tokenizer.hpp"

namespace crew {

enum class ChunkBoundary {
  /// Cut after every chunk_size-th token regardless of structure.
  hard,
  /// Pack whole lines; a single line longer than chunk_size is hard-split.
  line,
};

struct Chunk {
  std::size_t index = 0;
  std::string text;
  std::size_t token_count = 0;
  std::size_t begin = 0;  // byte offset into the source, inclusive
  std::size_t end = 0;    // byte offset, exclusive
};

/// Partition `text` into chunks of at most `chunk_size` tokens. Chunk spans
/// are disjoint, ordered, and cover the source exactly, so concatenating the
/// chunk texts in index order reproduces the input byte-for-byte.
///
/// Throws InvalidInputError for empty text and ConfigError for chunk_size 0.
/// Only whitespace tokenization is supported here; reference mode has no
/// token positions to cut at.
std::vector<Chunk> partition(std::string_view text, std::size_t chunk_size,
                             ChunkBoundary boundary = ChunkBoundary::hard);

}  // namespace crew
