#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "funcsum/annotator.hpp"
#include "funcsum/metrics.hpp"

namespace funcsum::cli {

struct BackendConfig {
  std::string kind = "mock";  // "mock" | "http"
  std::string url;
  std::string model;
  std::string key_env;
  std::size_t budget_words = 40;
  int retries = 2;
};

// Batch-run configuration. Relative paths resolve against the config
// file's directory so runs are reproducible from anywhere.
struct RunConfig {
  std::string corpus_path;
  std::string graph_path;
  std::string graph_format = "auto";  // auto | json | dot
  std::string api_names_path;         // optional newline-delimited identifiers
  std::string api_docs_path;          // optional JSON {api: description}
  std::string retrieval_kb_path;      // optional JSON {api: [{snippet, rank}]}
  BackendConfig backend;
  metrics::MetricParams metric_params;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  bool record_timing = false;
};

// Parses and validates; unknown keys, bad types, missing input files, and
// unusable values all throw ConfigError.
RunConfig load_run_config(const std::string& path);

// The echo written next to run outputs for reproducibility.
nlohmann::ordered_json run_config_to_json(const RunConfig& config);

// Newline-delimited API identifier list; blank lines ignored.
annotator::ApiNameSet load_api_names(const std::string& path);

}  // namespace funcsum::cli
