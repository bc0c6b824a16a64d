#include "funcsum/annotator.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "funcsum/errors.hpp"
#include "funcsum/lexer.hpp"

namespace funcsum::annotator {

namespace {

using nlohmann::json;

inline constexpr std::size_t kMinSignificantLength = 4;

std::string unquote(std::string_view literal) {
  if (literal.size() >= 2 && literal.front() == '"' && literal.back() == '"')
    return std::string(literal.substr(1, literal.size() - 2));
  return std::string(literal);
}

bool looks_like_format(std::string_view s) {
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (s[i] != '%') continue;
    std::size_t j = i + 1;
    while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.' ||
                            s[j] == '-' || s[j] == '+' || s[j] == '#' || s[j] == 'l' ||
                            s[j] == 'h' || s[j] == 'z'))
      ++j;
    if (j < s.size() && std::string_view("diouxXeEfFgGaAcspn%").find(s[j]) != std::string_view::npos)
      return true;
  }
  return false;
}

bool looks_like_path(std::string_view s) {
  if (s.size() >= 2 && std::isalpha(static_cast<unsigned char>(s[0])) && s[1] == ':') return true;
  if (s.rfind("\\\\", 0) == 0) return true;  // UNC
  if (s.rfind("/", 0) == 0 || s.rfind("./", 0) == 0 || s.rfind("../", 0) == 0) return true;
  return false;
}

bool looks_like_url(std::string_view s) {
  for (std::string_view scheme : {"http://", "https://", "ftp://", "www."}) {
    if (s.substr(0, scheme.size()) == scheme) return true;
  }
  return false;
}

bool looks_like_registry(std::string_view s) {
  for (std::string_view prefix : {"HKEY_", "HKLM\\", "HKCU\\", "HKCR\\"}) {
    if (s.substr(0, prefix.size()) == prefix) return true;
  }
  return false;
}

// Single text line inside a comment: collapse line breaks so the rendered
// block stays parseable line by line.
std::string one_line(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

}  // namespace

bool is_special_string(std::string_view content) {
  return looks_like_url(content) || looks_like_registry(content) || looks_like_path(content) ||
         looks_like_format(content);
}

std::string_view string_note(std::string_view content) {
  if (looks_like_url(content)) return "url";
  if (looks_like_registry(content)) return "registry key";
  if (looks_like_path(content)) return "path";
  if (looks_like_format(content)) return "format string";
  return "literal";
}

std::vector<LabeledToken> RuleBasedLabeler::label(const std::vector<std::string>& tokens) const {
  std::vector<LabeledToken> labeled;
  labeled.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& text = tokens[i];
    corpus::TokenLabel label = corpus::TokenLabel::Normal;
    if (lexer::is_identifier(text) && i + 1 < tokens.size() && tokens[i + 1] == "(" &&
        api_names_.count(text)) {
      label = corpus::TokenLabel::ApiCall;
    } else if (lexer::is_string_literal(text)) {
      const std::string content = unquote(text);
      if (content.size() >= kMinSignificantLength || is_special_string(content))
        label = corpus::TokenLabel::StringLit;
    }
    labeled.push_back({text, label});
  }
  return labeled;
}

std::vector<LabeledToken> label_tokens(const std::vector<std::string>& tokens,
                                       const ApiNameSet& api_names) {
  return RuleBasedLabeler(api_names).label(tokens);
}

RetrievalKb RetrievalKb::from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("retrieval kb: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("retrieval kb must be a JSON object");

  RetrievalKb kb;
  for (const auto& [key, value] : doc.items()) {
    if (!value.is_array()) throw ParseError("kb entry \"" + key + "\" must be an array");
    auto& slot = kb.entries[key];
    for (const auto& item : value) {
      if (!item.is_object() || !item.contains("snippet") || !item.contains("rank") ||
          !item["snippet"].is_string() || !item["rank"].is_number_integer())
        throw ParseError("kb entry \"" + key + "\" items need a snippet string and integer rank");
      std::string snippet = item["snippet"].get<std::string>();
      if (snippet.empty()) throw ValidationError("kb entry \"" + key + "\" has an empty snippet");
      slot.emplace_back(std::move(snippet), item["rank"].get<int>());
    }
    std::sort(slot.begin(), slot.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    for (std::size_t i = 1; i < slot.size(); ++i) {
      if (slot[i].second == slot[i - 1].second)
        throw ValidationError("kb entry \"" + key + "\" has duplicate rank " +
                              std::to_string(slot[i].second));
    }
  }
  return kb;
}

RetrievalKb RetrievalKb::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read retrieval kb: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

ApiDocs api_docs_from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read api docs: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("api docs: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("api docs must be a JSON object");
  ApiDocs docs;
  for (const auto& [key, value] : doc.items()) {
    if (!value.is_string()) throw ParseError("api doc for \"" + key + "\" must be a string");
    docs[key] = value.get<std::string>();
  }
  return docs;
}

std::vector<std::string> filter_snippets(const std::vector<std::string>& snippets) {
  std::vector<std::string> kept;
  std::set<std::string> seen;
  for (const auto& snippet : snippets) {
    std::vector<std::string> tokens;
    try {
      tokens = lexer::tokenize_pseudocode(snippet);
    } catch (const ParseError&) {
      continue;  // semantically incomplete
    }
    if (tokens.size() < kMinSnippetTokens) continue;
    if (!lexer::delimiters_balanced(snippet)) continue;
    if (!seen.insert(snippet).second) continue;
    kept.push_back(snippet);
  }
  return kept;
}

std::vector<std::string> retrieve(const std::string& identifier, const RetrievalKb& kb) {
  auto it = kb.entries.find(identifier);
  if (it == kb.entries.end()) return {};
  std::vector<std::string> top;
  for (const auto& [snippet, rank] : it->second) {
    top.push_back(snippet);
    if (top.size() == kMaxRetrieved) break;
  }
  return filter_snippets(top);
}

StaticAnnotation compose_static(const FunctionRecord& record,
                                const std::vector<LabeledToken>& labels, const RetrievalKb& kb,
                                const ApiDocs& api_docs) {
  const auto tokens = lexer::tokenize_pseudocode(record.body);
  if (tokens.size() != labels.size())
    throw ValidationError("label/token length mismatch for \"" + record.id + "\": " +
                          std::to_string(labels.size()) + " labels vs " +
                          std::to_string(tokens.size()) + " tokens");
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] != labels[i].text)
      throw ValidationError("label text mismatch for \"" + record.id + "\" at token " +
                            std::to_string(i));
  }

  StaticAnnotation ann;
  std::set<std::string> seen_apis, seen_strings;
  for (const auto& token : labels) {
    if (token.label == corpus::TokenLabel::ApiCall) {
      if (!seen_apis.insert(token.text).second) continue;
      auto doc = api_docs.find(token.text);
      ann.api_notes.emplace_back(token.text,
                                 doc != api_docs.end() ? doc->second : token.text);
    } else if (token.label == corpus::TokenLabel::StringLit) {
      if (!seen_strings.insert(token.text).second) continue;
      ann.string_notes.emplace_back(token.text, std::string(string_note(unquote(token.text))));
    }
  }
  for (const auto& [api, doc] : ann.api_notes) {
    for (auto& snippet : retrieve(api, kb)) {
      if (ann.retrieved.size() == kMaxRetrieved) break;
      ann.retrieved.push_back(std::move(snippet));
    }
    if (ann.retrieved.size() == kMaxRetrieved) break;
  }
  return ann;
}

DynamicAnnotation compose_dynamic(const FunctionRecord& record,
                                  const std::map<FunctionId, std::string>& summaries) {
  DynamicAnnotation ann;
  std::set<FunctionId> seen;
  for (const auto& callee : record.callees) {
    if (!seen.insert(callee).second) continue;
    auto it = summaries.find(callee);
    if (it != summaries.end()) ann.callee_summaries.emplace_back(callee, it->second);
  }
  return ann;
}

std::string annotate(const FunctionRecord& record, const StaticAnnotation& static_ann,
                     const DynamicAnnotation& dynamic_ann) {
  std::vector<std::string> lines;
  for (const auto& [api, description] : static_ann.api_notes)
    lines.push_back("/* API: " + api + ": " + one_line(description) + " */");
  for (const auto& [literal, note] : static_ann.string_notes)
    lines.push_back("/* STR: " + one_line(literal) + ": " + note + " */");
  for (const auto& [callee, summary] : dynamic_ann.callee_summaries)
    lines.push_back("/* CALLEE " + callee + ": " + one_line(summary) + " */");
  if (lines.empty()) return record.body;  // (+) with identity elements

  std::string out = record.body;
  while (!out.empty() && out.back() == '\n') out.pop_back();
  out += '\n';
  for (const auto& line : lines) {
    out += '\n';
    out += line;
  }
  return out;
}

}  // namespace funcsum::annotator
