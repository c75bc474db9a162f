#pragma once

#include <string>
#include <string_view>

namespace crew {

/// Canonical form used for answer clustering, conflict elimination, and
/// scoring: lowercase, whitespace collapsed and trimmed, one leading article
/// (a/an/the) stripped, terminal punctuation stripped.
std::string normalize_answer(std::string_view s);

}  // namespace crew
