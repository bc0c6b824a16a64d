#include "funcsum/pipeline.hpp"

#include <chrono>
#include <sstream>

#include <json.hpp>

#include "funcsum/errors.hpp"
#include "funcsum/lexer.hpp"

namespace funcsum::pipeline {

namespace {

// Pulls the payload out of an annotation-block line: matches
// "/* <tag>: payload */" (API/STR) or "/* CALLEE id: payload */".
bool block_line_payload(std::string_view line, std::string_view prefix, std::string* payload) {
  if (line.substr(0, prefix.size()) != prefix) return false;
  if (line.size() < prefix.size() + 3 || line.substr(line.size() - 3) != " */") return false;
  *payload = std::string(line.substr(prefix.size(), line.size() - prefix.size() - 3));
  return true;
}

std::vector<std::string> first_words(std::string_view text, std::size_t n) {
  std::istringstream in{std::string(text)};
  std::vector<std::string> words;
  std::string w;
  while (words.size() < n && in >> w) words.push_back(w);
  return words;
}

}  // namespace

std::string collapse_to_line(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (c == '\n' || c == '\r') {
      pending_space = !out.empty();
    } else {
      if (pending_space) out += ' ';
      pending_space = false;
      out += c;
    }
  }
  return out;
}

std::string truncate_words(std::string_view text, std::size_t max_words) {
  std::istringstream in{std::string(text)};
  std::string out, word;
  std::size_t count = 0;
  while (count < max_words && in >> word) {
    if (count) out += ' ';
    out += word;
    ++count;
  }
  return out;
}

std::string MockBackend::summarize(const std::string& annotated,
                                   std::size_t budget_words) const {
  std::vector<std::string> apis, strings, callee_fragments;
  std::istringstream in(annotated);
  std::string line;
  while (std::getline(in, line)) {
    std::string payload;
    if (block_line_payload(line, "/* API: ", &payload)) {
      // payload is "name: description"; the name is enough for the sketch
      apis.push_back(payload.substr(0, payload.find(": ")));
    } else if (block_line_payload(line, "/* STR: ", &payload)) {
      std::size_t split = payload.rfind(": ");
      strings.push_back(split == std::string::npos ? payload : payload.substr(0, split));
    } else if (block_line_payload(line, "/* CALLEE ", &payload)) {
      std::size_t split = payload.find(": ");
      std::string summary = split == std::string::npos ? payload : payload.substr(split + 2);
      std::string fragment;
      for (const auto& w : first_words(summary, 4)) {
        if (!fragment.empty()) fragment += ' ';
        fragment += w;
      }
      if (!fragment.empty()) callee_fragments.push_back(fragment);
    }
  }

  auto join = [](const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) {
      if (!out.empty()) out += ", ";
      out += p;
    }
    return out;
  };

  std::vector<std::string> sections;
  if (!apis.empty()) sections.push_back("calls " + join(apis));
  if (!strings.empty()) sections.push_back("uses " + join(strings));
  if (!callee_fragments.empty())
    sections.push_back("relies on callees: " + join(callee_fragments));

  std::string summary;
  for (const auto& s : sections) {
    if (!summary.empty()) summary += "; ";
    summary += s;
  }
  if (summary.empty()) summary = "performs internal computation";
  return truncate_words(collapse_to_line(summary), budget_words);
}

PipelineRun run_pipeline(const std::vector<FunctionRecord>& corpus, const CallGraph& graph,
                         const SummarizerBackend& backend, const PipelineConfig& config) {
  std::map<FunctionId, const FunctionRecord*> by_id;
  for (const auto& record : corpus) by_id.emplace(record.id, &record);
  std::vector<FunctionId> dangling;
  for (const auto& v : graph.vertices) {
    if (!by_id.count(v)) dangling.push_back(v);
  }
  if (!dangling.empty()) {
    std::string msg = "graph vertices missing from corpus:";
    for (const auto& id : dangling) msg += " " + id;
    throw ValidationError(msg);
  }

  const annotator::RuleBasedLabeler labeler(config.api_names);

  PipelineRun run;
  run.order = fcg::resort(graph);
  for (const FunctionId& id : run.order.order) {
    const FunctionRecord& record = *by_id.at(id);
    const auto started = std::chrono::steady_clock::now();

    const auto tokens = lexer::tokenize_pseudocode(record.body);
    const auto labels = labeler.label(tokens);
    const auto static_ann =
        annotator::compose_static(record, labels, config.retrieval_kb, config.api_docs);
    const auto dynamic_ann = annotator::compose_dynamic(record, run.summaries);

    TranscriptEntry entry;
    entry.id = id;
    entry.input = annotator::annotate(record, static_ann, dynamic_ann);
    try {
      entry.summary = backend.summarize(entry.input, config.budget_words);
      entry.status = FunctionStatus::Ok;
    } catch (const std::runtime_error&) {
      // Degrade per function; partial output beats an aborted run.
      entry.summary = kFailurePlaceholder;
      entry.status = FunctionStatus::Failed;
      ++run.failure_count;
    }
    if (config.record_timing) {
      entry.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - started)
                             .count();
    }
    run.summaries[id] = entry.summary;
    run.transcript.push_back(std::move(entry));
  }
  return run;
}

std::string transcript_to_jsonl(const PipelineRun& run) {
  std::string out;
  for (const auto& entry : run.transcript) {
    nlohmann::ordered_json doc;
    doc["id"] = entry.id;
    doc["input"] = entry.input;
    doc["summary"] = entry.summary;
    doc["elapsed_ms"] = entry.elapsed_ms;
    doc["status"] = entry.status == FunctionStatus::Ok ? "ok" : "failed";
    out += doc.dump();
    out += '\n';
  }
  return out;
}

}  // namespace funcsum::pipeline
