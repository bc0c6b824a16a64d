#include "funcsum/run_config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "funcsum/errors.hpp"

namespace funcsum::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) throw ConfigError("unknown config key \"" + key + "\" in " + where);
  }
}

std::string resolve(const fs::path& base, const std::string& path) {
  if (path.empty()) return path;
  fs::path p(path);
  return p.is_absolute() ? p.string() : (base / p).lexically_normal().string();
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) return;
  if (!fs::exists(path)) throw ConfigError(std::string(what) + " does not exist: " + path);
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();

  json doc;
  try {
    doc = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown_keys(doc,
                      {"corpus", "graph", "graph_format", "api_names", "api_docs",
                       "retrieval_kb", "backend", "metrics", "output_dir", "seed",
                       "record_timing"},
                      "config");

  RunConfig config;
  const fs::path base = fs::path(path).parent_path();
  auto get_string = [&](const json& obj, const char* key, std::string* out) {
    if (!obj.contains(key)) return;
    if (!obj[key].is_string()) throw ConfigError(std::string(key) + " must be a string");
    *out = obj[key].get<std::string>();
  };

  get_string(doc, "corpus", &config.corpus_path);
  get_string(doc, "graph", &config.graph_path);
  get_string(doc, "graph_format", &config.graph_format);
  get_string(doc, "api_names", &config.api_names_path);
  get_string(doc, "api_docs", &config.api_docs_path);
  get_string(doc, "retrieval_kb", &config.retrieval_kb_path);
  get_string(doc, "output_dir", &config.output_dir);
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer())
      throw ConfigError("seed must be an integer");
    config.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("record_timing")) {
    if (!doc["record_timing"].is_boolean()) throw ConfigError("record_timing must be a boolean");
    config.record_timing = doc["record_timing"].get<bool>();
  }

  if (doc.contains("backend")) {
    const json& b = doc["backend"];
    if (!b.is_object()) throw ConfigError("backend must be an object");
    reject_unknown_keys(b, {"kind", "url", "model", "key_env", "budget_words", "retries"},
                        "backend");
    get_string(b, "kind", &config.backend.kind);
    get_string(b, "url", &config.backend.url);
    get_string(b, "model", &config.backend.model);
    get_string(b, "key_env", &config.backend.key_env);
    if (b.contains("budget_words")) {
      if (!b["budget_words"].is_number_unsigned())
        throw ConfigError("budget_words must be a non-negative integer");
      config.backend.budget_words = b["budget_words"].get<std::size_t>();
    }
    if (b.contains("retries")) {
      if (!b["retries"].is_number_integer()) throw ConfigError("retries must be an integer");
      config.backend.retries = b["retries"].get<int>();
    }
  }

  if (doc.contains("metrics")) {
    const json& m = doc["metrics"];
    if (!m.is_object()) throw ConfigError("metrics must be an object");
    reject_unknown_keys(
        m, {"bleu_max_n", "rouge_beta", "meteor_beta", "meteor_gamma", "meteor_theta", "p_semantic"},
        "metrics");
    auto get_double = [&](const char* key, double* out) {
      if (!m.contains(key)) return;
      if (!m[key].is_number()) throw ConfigError(std::string(key) + " must be a number");
      *out = m[key].get<double>();
    };
    if (m.contains("bleu_max_n")) {
      if (!m["bleu_max_n"].is_number_integer()) throw ConfigError("bleu_max_n must be an integer");
      config.metric_params.bleu_max_n = m["bleu_max_n"].get<int>();
    }
    get_double("rouge_beta", &config.metric_params.rouge_beta);
    get_double("meteor_beta", &config.metric_params.meteor_beta);
    get_double("meteor_gamma", &config.metric_params.meteor_gamma);
    get_double("meteor_theta", &config.metric_params.meteor_theta);
    get_double("p_semantic", &config.metric_params.p_semantic);
  }

  // Resolve and validate.
  config.corpus_path = resolve(base, config.corpus_path);
  config.graph_path = resolve(base, config.graph_path);
  config.api_names_path = resolve(base, config.api_names_path);
  config.api_docs_path = resolve(base, config.api_docs_path);
  config.retrieval_kb_path = resolve(base, config.retrieval_kb_path);
  config.output_dir = resolve(base, config.output_dir);

  if (config.corpus_path.empty()) throw ConfigError("config needs a \"corpus\" path");
  if (config.graph_path.empty()) throw ConfigError("config needs a \"graph\" path");
  require_file(config.corpus_path, "corpus");
  require_file(config.graph_path, "graph");
  require_file(config.api_names_path, "api_names");
  require_file(config.api_docs_path, "api_docs");
  require_file(config.retrieval_kb_path, "retrieval_kb");

  if (config.backend.kind != "mock" && config.backend.kind != "http")
    throw ConfigError("unknown backend kind: " + config.backend.kind);
  if (config.backend.kind == "http" && config.backend.url.empty())
    throw ConfigError("http backend needs a url");
  if (config.backend.budget_words == 0) throw ConfigError("budget_words must be >= 1");
  if (config.backend.retries < 0) throw ConfigError("retries must be >= 0");
  if (config.graph_format != "auto" && config.graph_format != "json" &&
      config.graph_format != "dot")
    throw ConfigError("graph_format must be auto, json, or dot");
  try {
    config.metric_params.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  return config;
}

ordered_json run_config_to_json(const RunConfig& config) {
  ordered_json doc;
  doc["corpus"] = config.corpus_path;
  doc["graph"] = config.graph_path;
  doc["graph_format"] = config.graph_format;
  doc["api_names"] = config.api_names_path;
  doc["api_docs"] = config.api_docs_path;
  doc["retrieval_kb"] = config.retrieval_kb_path;
  doc["backend"] = {{"kind", config.backend.kind},
                    {"url", config.backend.url},
                    {"model", config.backend.model},
                    {"key_env", config.backend.key_env},
                    {"budget_words", config.backend.budget_words},
                    {"retries", config.backend.retries}};
  doc["metrics"] = {{"bleu_max_n", config.metric_params.bleu_max_n},
                    {"rouge_beta", config.metric_params.rouge_beta},
                    {"meteor_beta", config.metric_params.meteor_beta},
                    {"meteor_gamma", config.metric_params.meteor_gamma},
                    {"meteor_theta", config.metric_params.meteor_theta},
                    {"p_semantic", config.metric_params.p_semantic}};
  doc["output_dir"] = config.output_dir;
  doc["seed"] = config.seed;
  doc["record_timing"] = config.record_timing;
  return doc;
}

annotator::ApiNameSet load_api_names(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read api name list: " + path);
  annotator::ApiNameSet names;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    std::size_t start = 0;
    while (start < line.size() && std::isspace(static_cast<unsigned char>(line[start]))) ++start;
    if (start < line.size()) names.insert(line.substr(start));
  }
  return names;
}

}  // namespace funcsum::cli
