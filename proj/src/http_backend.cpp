#include "funcsum/http_backend.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "funcsum/errors.hpp"

namespace funcsum::pipeline {

namespace {

using nlohmann::json;

constexpr const char* kInstructionPrefix =
    "Summarize the following decompiled function in one sentence, naming the "
    "behavior it implements:\n\n";

// Depth-first hunt for the first string-valued "text" field. Objects are
// visited in key order, arrays by index.
bool find_text_field(const json& node, std::string* out) {
  if (node.is_object()) {
    auto it = node.find("text");
    if (it != node.end() && it->is_string()) {
      *out = it->get<std::string>();
      return true;
    }
    for (const auto& [key, value] : node.items()) {
      if (find_text_field(value, out)) return true;
    }
  } else if (node.is_array()) {
    for (const auto& value : node) {
      if (find_text_field(value, out)) return true;
    }
  }
  return false;
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  const std::string& url = config_.url;
  std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("backend url needs a scheme: " + url);
  std::size_t path_start = url.find('/', scheme_end + 3);
  host_base_ = path_start == std::string::npos ? url : url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);

  if (!config_.key_env.empty()) {
    const char* key = std::getenv(config_.key_env.c_str());
    if (!key || !*key)
      throw ConfigError("api key environment variable not set: " + config_.key_env);
    api_key_ = key;
  }
}

std::string HttpBackend::summarize(const std::string& annotated,
                                   std::size_t budget_words) const {
  json request;
  request["model"] = config_.model;
  request["prompt"] = kInstructionPrefix + annotated;
  request["max_tokens"] = budget_words;
  const std::string body = request.dump();

  std::string last_error;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0) {
      int slot = attempt - 1;
      int wait = slot < static_cast<int>(config_.backoff_ms.size())
                     ? config_.backoff_ms[slot]
                     : config_.backoff_ms.empty() ? 500 : config_.backoff_ms.back();
      std::this_thread::sleep_for(std::chrono::milliseconds(wait));
    }
    httplib::Client client(host_base_);
    client.set_connection_timeout(10);
    client.set_read_timeout(60);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    auto response = client.Post(path_, headers, body, "application/json");
    if (!response) {
      last_error = "no response (" + httplib::to_string(response.error()) + ")";
      continue;
    }
    if (response->status < 200 || response->status >= 300) {
      last_error = "http status " + std::to_string(response->status);
      continue;
    }
    json doc;
    try {
      doc = json::parse(response->body);
    } catch (const json::parse_error& e) {
      throw ProtocolError(std::string("backend returned unparseable JSON: ") + e.what());
    }
    std::string text;
    if (!find_text_field(doc, &text)) throw ProtocolError("backend response has no text field");
    std::string line = truncate_words(collapse_to_line(text), budget_words);
    if (line.empty()) throw ProtocolError("backend returned an empty summary");
    return line;
  }
  throw TransportError("backend unreachable after " + std::to_string(config_.retries + 1) +
                       " attempts: " + last_error);
}

}  // namespace funcsum::pipeline
