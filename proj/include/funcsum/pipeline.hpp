#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "funcsum/annotator.hpp"
#include "funcsum/call_graph.hpp"
#include "funcsum/corpus.hpp"

namespace funcsum::pipeline {

using corpus::FunctionRecord;
using fcg::CallGraph;
using fcg::FunctionId;
using fcg::ProcessingList;

inline constexpr std::size_t kDefaultBudgetWords = 40;
inline constexpr const char* kFailurePlaceholder = "summary unavailable";

// One-sentence summarizer. Implementations must return a single non-empty
// line of at most budget_words words; transport problems surface as
// TransportError/ProtocolError.
class SummarizerBackend {
 public:
  virtual ~SummarizerBackend() = default;
  virtual std::string summarize(const std::string& annotated, std::size_t budget_words) const = 0;
};

// Deterministic extractive stand-in: reads the annotation block back and
// fills the template
//   "calls <apis>; uses <strings>; relies on callees: <4-word summaries>"
// falling back to "performs internal computation" for bare bodies.
class MockBackend : public SummarizerBackend {
 public:
  std::string summarize(const std::string& annotated, std::size_t budget_words) const override;
};

std::string truncate_words(std::string_view text, std::size_t max_words);
std::string collapse_to_line(std::string_view text);

enum class FunctionStatus { Ok, Failed };

struct TranscriptEntry {
  FunctionId id;
  std::string input;  // annotated text fed to the backend
  std::string summary;
  std::int64_t elapsed_ms = 0;
  FunctionStatus status = FunctionStatus::Ok;
};

struct PipelineRun {
  ProcessingList order;
  std::map<FunctionId, std::string> summaries;
  std::vector<TranscriptEntry> transcript;  // in processing order
  std::size_t failure_count = 0;
};

struct PipelineConfig {
  annotator::ApiNameSet api_names;
  annotator::RetrievalKb retrieval_kb;
  annotator::ApiDocs api_docs;
  std::size_t budget_words = kDefaultBudgetWords;
  // Real per-function timing in the transcript; off by default so exports
  // stay byte-reproducible.
  bool record_timing = false;
};

// Walks resort(graph), annotating each function with its labeled tokens
// and the callee summaries committed so far, then summarizes. A backend
// failure marks the function Failed with a placeholder summary and the run
// continues. Throws ValidationError when graph vertices are missing from
// the corpus.
PipelineRun run_pipeline(const std::vector<FunctionRecord>& corpus, const CallGraph& graph,
                         const SummarizerBackend& backend, const PipelineConfig& config);

// Transcript as JSON-lines: {"id","input","summary","elapsed_ms","status"}.
std::string transcript_to_jsonl(const PipelineRun& run);

}  // namespace funcsum::pipeline
