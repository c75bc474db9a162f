#include "chunkcrew/protocol.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "chunkcrew/errors.hpp"
#include "chunkcrew/normalize.hpp"

namespace crew {

namespace {

std::optional<std::pair<std::size_t, std::size_t>> balanced_object(const std::string& text,
                                                                   std::size_t pos) {
  int depth = 0;
  bool in_str = false, esc = false;
  for (std::size_t i = pos; i < text.size(); ++i) {
    char c = text[i];
    if (esc) {
      esc = false;
      continue;
    }
    if (in_str) {
      if (c == '\\') esc = true;
      else if (c == '"') in_str = false;
      continue;
    }
    if (c == '"') in_str = true;
    else if (c == '{') ++depth;
    else if (c == '}' && --depth == 0) return std::make_pair(pos, i + 1);
  }
  return std::nullopt;
}

}  // namespace

ParsedMessage parse_agent_message(const std::string& text) {
  for (std::size_t pos = text.find('{'); pos != std::string::npos;
       pos = text.find('{', pos + 1)) {
    auto span = balanced_object(text, pos);
    if (!span) continue;
    auto j = nlohmann::json::parse(text.substr(span->first, span->second - span->first),
                                   nullptr, false);
    if (j.is_discarded() || !j.is_object()) continue;
    if (!j.contains("type") || !j.contains("content")) continue;
    std::string type = j["type"].is_string() ? j["type"].get<std::string>() : "";
    std::string content;
    if (j["content"].is_string()) content = j["content"].get<std::string>();
    else content = j["content"].dump();
    if (type == "response") return {MessageType::response, content};
    if (type == "answer") return {MessageType::answer, content};
    if (type == "instruction") return {MessageType::instruction, content};
    if (type == "member") return {MessageType::member, content};
    throw ProtocolError("unknown message type '" + type + "'", text);
  }
  throw ProtocolError("no parseable JSON object in agent message", text);
}

const std::vector<std::string>& default_reject_synonyms() {
  static const std::vector<std::string> synonyms = {
      "The document does not contain the answer.",
      "The document does not contain the answer",
      "The document does not mention it.",
      "No mention.",
      "Not mentioned.",
      "I cannot find the answer in the document.",
  };
  return synonyms;
}

bool is_reject_content(std::string_view content, const std::vector<std::string>& synonyms) {
  const std::string norm = normalize_answer(content);
  if (norm.empty()) return true;
  for (const auto& s : synonyms) {
    if (norm == normalize_answer(s)) return true;
  }
  return false;
}

std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string>& vars) {
  std::string out(tmpl);
  for (const auto& [name, value] : vars) {
    const std::string needle = "{" + name + "}";
    std::size_t pos = 0;
    while ((pos = out.find(needle, pos)) != std::string::npos) {
      out.replace(pos, needle.size(), value);
      pos += value.size();
    }
  }
  return out;
}

namespace {

constexpr const char* kRecruit =
    "You need to recruit a team of members to solve a task. Select the appropriate "
    "member based on the task description.\n"
    "# Task Description:\n"
    "{task_description}\n"
    "\n"
    "# Members List:\n"
    "QA member: Good at solving Question Answering problems.\n"
    "KV member: Good at finding the corresponding value from a dictionary.\n"
    "NS member: Good at locating repeated hidden numbers in a noisy long context.\n"
    "PassKey member: Good at retrieving hidden keys in a noisy long context.\n"
    "Math member: Good at finding special integers in a lengthy list.\n"
    "\n"
    "Your output must following the JSON format: {\"type\": \"member\", \"content\": "
    "\"your_chosen_member\"}\n";

constexpr const char* kInstruct =
    "You are the leader of a team of {member_nums} members. Your team will need to "
    "collaborate to solve a task. The rule is:\n"
    "1. Only you know the task description and task objective; the other members do not.\n"
    "2. But they will receive different documents that may contain answers, and you need "
    "to send them an instruction to query their document.\n"
    "3. Your instruction need to include your understanding of the task and what you need "
    "them to focus on. If necessary, your instructions can explicitly include the task "
    "objective.\n"
    "4. Finally, you need to complete the task based on the query results they return.\n"
    "# Task Description:\n"
    "{task_description}\n"
    "\n"
    "# Task Objective:\n"
    "{task_objective}\n"
    "\n"
    "# Generate Instruction for Members:\n"
    "Now, you need to generate an instruction for all team members. You can ask them to "
    "answer a certain question, or to extract information related to the task, based on "
    "their respective documents.\n"
    "Your output must following the JSON format: {\"type\": \"instruction\", \"content\": "
    "\"your_instruction_content\"}\n";

constexpr const char* kMemberQuery =
    "# Document:\n"
    "{member_document}\n"
    "\n"
    "# Instruction:\n"
    "{instruction}\n"
    "\n"
    "You are an experienced writer; please summarize the content in the document related "
    "to the instructions in a <scratchpad> tag, then describe your response.\n"
    "Your output must following the JSON format: {\"type\": \"response\", \"content\": "
    "\"your_response_content\"}\n"
    "The \"content\" needs to be as concise as possible.\n";

constexpr const char* kDetermine =
    "Here are the responses from all the members. Each member sees different segments of "
    "a document, and these segments do not intersect with each other. The correct answer "
    "may appear in any one or several members' responses.\n"
    "Note that if a minority of members find information relevant to the question while "
    "the majority reply that the document does not contain information relevant to the "
    "question, you should pay attention to the replies from those members who found "
    "relevant information.\n"
    "# Member Response:\n"
    "{member_responses}\n"
    "\n"
    "# Task Description:\n"
    "{task_description}\n"
    "\n"
    "# Task Objective:\n"
    "{task_objective}\n"
    "\n"
    "# Determination:\n"
    "Based on the above information, you need to determine if you can solve the task "
    "objective. You have two choices:\n"
    "1. If members' responses cannot solve the task objective, or if their responses "
    "contain conflicting answers, provide a new instruction for them to answer again.\n"
    "2. Else, if the task objective can be solved, give your final answer as concisely as "
    "you can, using a single phrase if possible. Do not provide any explanation.\n"
    "Your output must following the JSON format: {\"type\": \"answer\", \"content\": "
    "\"your_answer_content\"} or {\"type\": \"instruction\", \"content\": "
    "\"your_instruction_content\"}\n";

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read prompt template: " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

PromptSet PromptSet::defaults() {
  return {kRecruit, kInstruct, kMemberQuery, kDetermine};
}

PromptSet PromptSet::load_dir(const std::string& dir) {
  std::filesystem::path base(dir);
  PromptSet p;
  p.recruit = slurp(base / "leader_recruit.txt");
  p.instruct = slurp(base / "leader_instruct.txt");
  p.member_query = slurp(base / "member_query.txt");
  p.determine = slurp(base / "leader_determine.txt");
  return p;
}

}  // namespace crew
