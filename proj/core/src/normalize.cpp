#include "chunkcrew/normalize.hpp"

#include <cctype>
#include <vector>

namespace crew {

std::string normalize_answer(std::string_view s) {
  std::vector<std::string> words;
  std::string cur;
  for (char ch : s) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      if (!cur.empty()) {
        words.push_back(cur);
        cur.clear();
      }
    } else {
      cur.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!cur.empty()) words.push_back(cur);

  // Strip a leading article unless it is the whole answer.
  if (words.size() > 1 &&
      (words[0] == "a" || words[0] == "an" || words[0] == "the")) {
    words.erase(words.begin());
  }

  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out.push_back(' ');
    out += words[i];
  }

  while (!out.empty()) {
    char c = out.back();
    if (c == '.' || c == '!' || c == '?' || c == ';' || c == ':' || c == '"' ||
        c == '\'') {
      out.pop_back();
    } else {
      break;
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

}  // namespace crew
