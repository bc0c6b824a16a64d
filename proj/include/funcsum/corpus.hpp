#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "funcsum/call_graph.hpp"
#include "funcsum/metrics.hpp"

namespace funcsum::corpus {

using fcg::FunctionId;

enum class StripLevel { NotStripped, DemiStripped, AllStripped };

// One pseudocode function as ingested from a decompiler export.
struct FunctionRecord {
  FunctionId id;
  std::string name;
  std::string body;
  std::vector<FunctionId> callees;
  std::optional<std::string> summary;
  StripLevel strip_level = StripLevel::NotStripped;
};

struct Diagnostic {
  std::size_t line;  // 1-based input line, 0 when not line-bound
  std::string message;
};

struct IngestResult {
  std::vector<FunctionRecord> records;
  std::vector<Diagnostic> diagnostics;
};

// JSON-lines corpus: one record per line,
//   {"id": s, "name": s, "body": s, "callees": [s], "summary": s|null}
// Malformed lines are skipped with a diagnostic naming the line number;
// callees that resolve to no record id get a dangling-callee warning.
IngestResult ingest_corpus(std::string_view text);

// Reads and ingests; an unreadable path is fatal (throws ConfigError).
IngestResult load_corpus_file(const std::string& path);

void write_corpus(std::ostream& out, const std::vector<FunctionRecord>& records);

enum class RejectReason { Duplicate, TooShort, Malformed };
std::string_view to_string(RejectReason reason);

inline constexpr std::size_t kMinBodyLines = 5;

struct FilterResult {
  std::vector<FunctionRecord> kept;
  std::vector<std::pair<FunctionRecord, RejectReason>> rejected;
};

// Drops exact duplicates (after whitespace normalization, first stays),
// bodies under kMinBodyLines newline-delimited lines, and bodies with
// formatting issues (unbalanced delimiters or invalid UTF-8).
FilterResult filter_corpus(std::vector<FunctionRecord> records);

std::string normalize_whitespace(std::string_view text);
bool valid_utf8(std::string_view text);

using ApiNameSet = std::set<std::string>;

// Deterministic replacement symbol for a function id: sub_ + 6 hex digits.
std::string stripped_name(std::uint64_t seed, const FunctionId& id);

// Symbol stripping.
//   DemiStripped: the function's own name (record field, definition, and
//   recursive call sites) becomes stripped_name(seed, id).
//   AllStripped: additionally every local identifier becomes v1, v2, ... in
//   first-appearance order and callee references become their stripped
//   forms. Keywords, string literals, and names in preserved_apis survive.
// The body is otherwise byte-identical. Record ids double as the lexical
// names bodies use for calls, so callee rewrites key on callee ids.
// Throws ValidationError when the record is already stripped.
FunctionRecord strip(const FunctionRecord& record, StripLevel level, std::uint64_t seed,
                     const ApiNameSet* preserved_apis = nullptr);

enum class TokenLabel { Normal, ApiCall, StringLit };

inline char label_code(TokenLabel label) {
  switch (label) {
    case TokenLabel::ApiCall: return 'A';
    case TokenLabel::StringLit: return 'S';
    default: return 'N';
  }
}

struct LabeledToken {
  std::string text;
  TokenLabel label = TokenLabel::Normal;
};

// Sentence pair with a score label for evaluation-model training.
struct EvasPair {
  std::string generated;  // s_g
  std::string reference;  // s_r
  metrics::Polarity polarity;
  double score = 0.0;
};

struct EvasRatio {
  int positive = 1;
  int negative = 1;
};

// Positive pairs pair each function's summary with a deterministic
// meaning-preserving perturbation of itself; negative pairs draw summaries
// of two different functions, uniformly by seed. One positive per
// summarized record; negatives scaled to the requested ratio (rounding
// resolves toward the positive side). Requires >= 2 summarized records.
std::vector<EvasPair> build_evas_pairs(const std::vector<FunctionRecord>& records, EvasRatio ratio,
                                       std::uint64_t seed, const metrics::MetricParams& params);

// The perturbation family used for positive pairs, exposed for tests:
// article deletion, "the code"/"this function" prefix toggling, or
// comma-clause rotation, selected by the rng draw.
std::string perturb_summary(std::string_view summary, std::uint64_t draw);

}  // namespace funcsum::corpus
