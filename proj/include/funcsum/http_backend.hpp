#pragma once

#include <string>

#include "funcsum/pipeline.hpp"

namespace funcsum::pipeline {

struct HttpBackendConfig {
  std::string url;      // e.g. http://127.0.0.1:8080/v1/complete
  std::string model;
  std::string key_env;  // env var holding the bearer token; empty = no auth
  int retries = 2;      // extra attempts after the first
  // Backoff before retry k (milliseconds); exposed so tests stay fast.
  std::vector<int> backoff_ms = {500, 2000};
};

// Generic JSON-over-HTTP bridge: POSTs {"model", "prompt", "max_tokens"}
// where the prompt is a fixed instruction prefix plus the annotated text,
// and returns the first "text" string field found in the response,
// collapsed to one line and truncated to the word budget.
//
// Non-2xx or unreachable after retries -> TransportError; a 2xx response
// without a text field -> ProtocolError.
class HttpBackend : public SummarizerBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config);

  std::string summarize(const std::string& annotated, std::size_t budget_words) const override;

 private:
  HttpBackendConfig config_;
  std::string host_base_;  // scheme://host:port
  std::string path_;
  std::string api_key_;
};

}  // namespace funcsum::pipeline
