#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace crew {

enum class MessageType { response, answer, instruction, member };

struct ParsedMessage {
  MessageType type;
  std::string content;
};

/// Extract the first JSON object embedded in `text` and map it onto the
/// {type, content} wire schema. Throws ProtocolError (carrying the raw text)
/// when no parseable object with those fields exists.
ParsedMessage parse_agent_message(const std::string& text);

/// Phrasings that count as "my chunk does not contain the answer". Compared
/// after normalization, so trailing periods and case differences are ignored.
const std::vector<std::string>& default_reject_synonyms();

bool is_reject_content(std::string_view content,
                       const std::vector<std::string>& synonyms = default_reject_synonyms());

/// Substitute {name} placeholders. Unknown placeholders are left untouched,
/// which keeps the literal JSON examples inside the templates intact.
std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string>& vars);

/// The four leader/member prompt templates. Defaults are compiled in; a
/// directory of leader_recruit.txt, leader_instruct.txt, member_query.txt,
/// leader_determine.txt overrides them.
struct PromptSet {
  std::string recruit;
  std::string instruct;
  std::string member_query;
  std::string determine;

  static PromptSet defaults();
  static PromptSet load_dir(const std::string& dir);
};

}  // namespace crew
