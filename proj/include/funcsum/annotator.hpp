#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "funcsum/corpus.hpp"

namespace funcsum::annotator {

using corpus::ApiNameSet;
using corpus::FunctionRecord;
using corpus::LabeledToken;
using fcg::FunctionId;

// Pluggable sequence labeler; the rule-based reference implementation is
// below, a model-backed one can slot in behind the same contract.
class TokenLabeler {
 public:
  virtual ~TokenLabeler() = default;
  virtual std::vector<LabeledToken> label(const std::vector<std::string>& tokens) const = 0;
};

// Labeling rules:
//   ApiCall   - identifier immediately followed by '(' and present in the
//               API knowledge set
//   StringLit - string literal whose unquoted content is >= 4 chars or
//               looks like a path, URL, registry key, or format string
//   Normal    - everything else
class RuleBasedLabeler : public TokenLabeler {
 public:
  explicit RuleBasedLabeler(ApiNameSet api_names) : api_names_(std::move(api_names)) {}
  std::vector<LabeledToken> label(const std::vector<std::string>& tokens) const override;

 private:
  ApiNameSet api_names_;
};

std::vector<LabeledToken> label_tokens(const std::vector<std::string>& tokens,
                                       const ApiNameSet& api_names);

// True when a string literal's content is significant on its own (special
// pattern), regardless of length.
bool is_special_string(std::string_view content);

// Why a literal was labeled significant; feeds the string notes.
std::string_view string_note(std::string_view content);

// Offline retrieval knowledge base: identifier -> ranked code snippets.
struct RetrievalKb {
  // Ranks strictly increasing per key; kept sorted ascending.
  std::map<std::string, std::vector<std::pair<std::string, int>>> entries;

  // Loads {"identifier": [{"snippet": s, "rank": n}, ...]}. Throws
  // ParseError / ValidationError on malformed or rank-violating input.
  static RetrievalKb from_json(std::string_view text);
  static RetrievalKb from_file(const std::string& path);
};

// API documentation map: identifier -> one-line description.
using ApiDocs = std::map<std::string, std::string>;
ApiDocs api_docs_from_file(const std::string& path);

inline constexpr std::size_t kMaxRetrieved = 3;
inline constexpr std::size_t kMinSnippetTokens = 10;

// Drops snippets under kMinSnippetTokens tokens, with unbalanced
// delimiters, or duplicating an earlier snippet.
std::vector<std::string> filter_snippets(const std::vector<std::string>& snippets);

// Top-3 snippets by rank for the identifier, then filtered. Empty when the
// key is absent.
std::vector<std::string> retrieve(const std::string& identifier, const RetrievalKb& kb);

struct StaticAnnotation {
  std::vector<std::pair<std::string, std::string>> api_notes;     // (api, description)
  std::vector<std::pair<std::string, std::string>> string_notes;  // (literal, note)
  std::vector<std::string> retrieved;                             // <= kMaxRetrieved total

  bool empty() const { return api_notes.empty() && string_notes.empty() && retrieved.empty(); }
};

struct DynamicAnnotation {
  std::vector<std::pair<FunctionId, std::string>> callee_summaries;

  bool empty() const { return callee_summaries.empty(); }
};

// Builds the static annotation from the labeled body. labels must align
// one-to-one with the tokenization of record.body (AlignmentError ->
// ValidationError). Retrieval runs over ApiCall identifiers in
// first-appearance order, capped at kMaxRetrieved across the function.
// Undocumented APIs echo their identifier as the description.
StaticAnnotation compose_static(const FunctionRecord& record,
                                const std::vector<LabeledToken>& labels, const RetrievalKb& kb,
                                const ApiDocs& api_docs);

// One entry per distinct callee that already has a summary, in
// record.callees order. Callees without summaries are omitted.
DynamicAnnotation compose_dynamic(const FunctionRecord& record,
                                  const std::map<FunctionId, std::string>& summaries);

// Renders body (+) annotations: the body, one blank line, then one comment
// line per note in section order API, STR, CALLEE. Empty annotations leave
// the body untouched.
std::string annotate(const FunctionRecord& record, const StaticAnnotation& static_ann,
                     const DynamicAnnotation& dynamic_ann);

}  // namespace funcsum::annotator
