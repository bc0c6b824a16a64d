#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "funcsum/annotator.hpp"
#include "funcsum/call_graph.hpp"
#include "funcsum/corpus.hpp"
#include "funcsum/errors.hpp"
#include "funcsum/graph_io.hpp"
#include "funcsum/http_backend.hpp"
#include "funcsum/lexer.hpp"
#include "funcsum/metrics.hpp"
#include "funcsum/pipeline.hpp"
#include "funcsum/run_config.hpp"

namespace {

namespace fs = std::filesystem;
using namespace funcsum;
using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

bool blank(std::string_view text) {
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

fcg::GraphFormat pick_graph_format(const std::string& flag, const std::string& path,
                                   std::string_view content) {
  if (flag == "json") return fcg::GraphFormat::Json;
  if (flag == "dot") return fcg::GraphFormat::Dot;
  const std::string ext = fs::path(path).extension().string();
  if (ext == ".json") return fcg::GraphFormat::Json;
  if (ext == ".dot" || ext == ".gv") return fcg::GraphFormat::Dot;
  return fcg::sniff_graph_format(content);
}

void print_diagnostics(const std::vector<corpus::Diagnostic>& diagnostics) {
  for (const auto& d : diagnostics) {
    if (d.line > 0)
      std::cerr << "corpus line " << d.line << ": " << d.message << '\n';
    else
      std::cerr << "corpus: " << d.message << '\n';
  }
}

struct MetricFlags {
  metrics::MetricParams params;
  std::string stopwords_path;

  void attach(CLI::App* cmd) {
    cmd->add_option("--bleu-max-n", params.bleu_max_n, "Largest n-gram order for BLEU");
    cmd->add_option("--rouge-beta", params.rouge_beta, "Recall weight for ROUGE-L");
    cmd->add_option("--meteor-beta", params.meteor_beta, "Recall weight for METEOR");
    cmd->add_option("--meteor-gamma", params.meteor_gamma, "METEOR fragmentation scale");
    cmd->add_option("--meteor-theta", params.meteor_theta, "METEOR fragmentation exponent");
    cmd->add_option("--p-semantic", params.p_semantic, "Semantic share of the score label");
    cmd->add_option("--stopwords", stopwords_path, "Newline-delimited stopword file");
  }

  metrics::MetricParams resolve() {
    if (!stopwords_path.empty()) {
      std::istringstream in(read_file(stopwords_path));
      std::string word;
      while (in >> word) params.stopwords.insert(word);
    }
    params.validate();
    return params;
  }
};

// ---- resort ----------------------------------------------------------------

int cmd_resort(const std::string& graph_path, const std::string& format_flag, bool as_json) {
  const std::string text = read_file(graph_path);
  std::vector<std::string> order;
  if (!blank(text)) {
    auto graph = fcg::parse_call_graph(text, pick_graph_format(format_flag, graph_path, text));
    order = fcg::resort(graph).order;
  }
  if (as_json) {
    std::cout << ordered_json(order).dump() << '\n';
  } else {
    for (const auto& id : order) std::cout << id << '\n';
  }
  return 0;
}

// ---- summarize -------------------------------------------------------------

int cmd_summarize(const std::string& config_path, bool timing_flag) {
  cli::RunConfig config = cli::load_run_config(config_path);
  if (timing_flag) config.record_timing = true;

  auto ingest = corpus::load_corpus_file(config.corpus_path);
  print_diagnostics(ingest.diagnostics);

  const std::string graph_text = read_file(config.graph_path);
  auto graph = fcg::parse_call_graph(
      graph_text, pick_graph_format(config.graph_format, config.graph_path, graph_text));

  pipeline::PipelineConfig pipe_config;
  pipe_config.budget_words = config.backend.budget_words;
  pipe_config.record_timing = config.record_timing;
  if (!config.api_names_path.empty())
    pipe_config.api_names = cli::load_api_names(config.api_names_path);
  if (!config.api_docs_path.empty())
    pipe_config.api_docs = annotator::api_docs_from_file(config.api_docs_path);
  if (!config.retrieval_kb_path.empty())
    pipe_config.retrieval_kb = annotator::RetrievalKb::from_file(config.retrieval_kb_path);

  std::unique_ptr<pipeline::SummarizerBackend> backend;
  if (config.backend.kind == "http") {
    pipeline::HttpBackendConfig http;
    http.url = config.backend.url;
    http.model = config.backend.model;
    http.key_env = config.backend.key_env;
    http.retries = config.backend.retries;
    backend = std::make_unique<pipeline::HttpBackend>(http);
  } else {
    backend = std::make_unique<pipeline::MockBackend>();
  }

  auto run = pipeline::run_pipeline(ingest.records, graph, *backend, pipe_config);

  fs::create_directories(config.output_dir);
  const fs::path out(config.output_dir);
  write_file((out / "transcript.jsonl").string(), pipeline::transcript_to_jsonl(run));
  ordered_json summaries;
  for (const auto& [id, summary] : run.summaries) summaries[id] = summary;
  write_file((out / "summaries.json").string(), summaries.dump(2) + "\n");
  write_file((out / "config_echo.json").string(), cli::run_config_to_json(config).dump(2) + "\n");

  std::cout << "summarized " << run.transcript.size() << " functions ("
            << run.failure_count << " failed) -> " << config.output_dir << '\n';
  return 0;
}

// ---- evaluate --------------------------------------------------------------

std::map<std::string, std::string> load_references(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("references are not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("references must be a JSON object of id -> sentence");
  std::map<std::string, std::string> refs;
  for (const auto& [id, value] : doc.items()) {
    if (!value.is_string()) throw ConfigError("reference for \"" + id + "\" must be a string");
    refs[id] = value.get<std::string>();
  }
  return refs;
}

std::vector<std::pair<std::string, std::string>> load_transcript_summaries(
    const std::string& path) {
  const std::string text = read_file(path);
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw funcsum::ParseError(std::string("bad transcript record: ") + e.what(), line_no);
    }
    if (!doc.is_object() || !doc.contains("id") || !doc.contains("summary"))
      throw funcsum::ParseError("transcript records need id and summary fields", line_no);
    out.emplace_back(doc["id"].get<std::string>(), doc["summary"].get<std::string>());
  }
  return out;
}

std::string bias_probe_csv(int size, const metrics::MetricParams& params) {
  auto grid = metrics::bleu_bias_probe(size, params);
  std::ostringstream csv;
  csv << "cand_len\\ref_len";
  for (int r = 1; r <= size; ++r) csv << ',' << r;
  csv << '\n';
  csv.precision(10);
  std::size_t i = 0;
  for (int c = 1; c <= size; ++c) {
    csv << c;
    for (int r = 1; r <= size; ++r) csv << ',' << grid[i++].bleu;
    csv << '\n';
  }
  return csv.str();
}

int cmd_evaluate(const std::string& transcript_path, const std::string& references_path,
                 const std::string& out_path, int bias_probe, bool pit, MetricFlags& flags) {
  const auto params = flags.resolve();
  if (bias_probe > 0) {
    const std::string csv = bias_probe_csv(bias_probe, params);
    if (out_path.empty())
      std::cout << csv;
    else
      write_file(out_path, csv);
    return 0;
  }
  if (transcript_path.empty() || references_path.empty())
    throw ConfigError("evaluate needs --transcript and --references (or --bias-probe)");

  auto candidates = load_transcript_summaries(transcript_path);
  auto references = load_references(references_path);
  auto report = metrics::evaluate_corpus(candidates, references, params, pit);

  ordered_json doc;
  doc["per_function"] = ordered_json::array();
  for (const auto& entry : report.per_function) {
    doc["per_function"].push_back({{"id", entry.id},
                                   {"bleu", entry.report.bleu},
                                   {"rouge_l", entry.report.rouge_l},
                                   {"meteor", entry.report.meteor},
                                   {"struc", entry.report.struc}});
  }
  auto metric_block = [](const metrics::MetricReport& r) {
    return ordered_json{
        {"bleu", r.bleu}, {"rouge_l", r.rouge_l}, {"meteor", r.meteor}, {"struc", r.struc}};
  };
  doc["mean"] = metric_block(report.mean);
  doc["variance"] = metric_block(report.variance);
  doc["avg_summary_words"] = report.avg_summary_words;
  doc["unmatched"] = report.unmatched;

  const std::string rendered = doc.dump(2) + "\n";
  if (out_path.empty())
    std::cout << rendered;
  else
    write_file(out_path, rendered);
  return 0;
}

// ---- dataset ---------------------------------------------------------------

std::vector<corpus::FunctionRecord> load_records(const std::string& path) {
  auto ingest = corpus::load_corpus_file(path);
  print_diagnostics(ingest.diagnostics);
  return std::move(ingest.records);
}

int cmd_dataset_filter(const std::string& corpus_path, const std::string& kept_path,
                       const std::string& rejected_path) {
  auto result = corpus::filter_corpus(load_records(corpus_path));
  std::ostringstream kept;
  corpus::write_corpus(kept, result.kept);
  write_file(kept_path, kept.str());
  if (!rejected_path.empty()) {
    std::string log;
    for (const auto& [record, reason] : result.rejected) {
      ordered_json doc;
      doc["id"] = record.id;
      doc["reason"] = corpus::to_string(reason);
      log += doc.dump() + "\n";
    }
    write_file(rejected_path, log);
  }
  std::cout << "kept " << result.kept.size() << ", rejected " << result.rejected.size() << '\n';
  return 0;
}

int cmd_dataset_strip(const std::string& corpus_path, const std::string& level_flag,
                      std::uint64_t seed, const std::string& out_path,
                      const std::string& api_file) {
  corpus::StripLevel level;
  if (level_flag == "demi")
    level = corpus::StripLevel::DemiStripped;
  else if (level_flag == "all")
    level = corpus::StripLevel::AllStripped;
  else
    throw ConfigError("--level must be demi or all");

  corpus::ApiNameSet apis;
  if (!api_file.empty()) apis = cli::load_api_names(api_file);

  auto records = load_records(corpus_path);
  std::vector<corpus::FunctionRecord> stripped;
  stripped.reserve(records.size());
  for (const auto& record : records)
    stripped.push_back(corpus::strip(record, level, seed, api_file.empty() ? nullptr : &apis));

  std::ostringstream out;
  corpus::write_corpus(out, stripped);
  write_file(out_path, out.str());
  std::cout << "stripped " << stripped.size() << " records (" << level_flag << ")\n";
  return 0;
}

int cmd_dataset_csl(const std::string& corpus_path, const std::string& api_file,
                    const std::string& out_path) {
  const auto apis = cli::load_api_names(api_file);
  auto records = load_records(corpus_path);
  std::string out;
  for (const auto& record : records) {
    const auto tokens = lexer::tokenize_pseudocode(record.body);
    const auto labeled = annotator::label_tokens(tokens, apis);
    ordered_json doc;
    doc["tokens"] = tokens;
    auto& labels = doc["labels"] = ordered_json::array();
    for (const auto& t : labeled) labels.push_back(std::string(1, corpus::label_code(t.label)));
    out += doc.dump() + "\n";
  }
  write_file(out_path, out);
  std::cout << "labeled " << records.size() << " records\n";
  return 0;
}

int cmd_dataset_evas(const std::string& corpus_path, const std::string& ratio_flag,
                     std::uint64_t seed, const std::string& out_path, MetricFlags& flags) {
  corpus::EvasRatio ratio;
  {
    std::size_t colon = ratio_flag.find(':');
    try {
      if (colon == std::string::npos) throw std::invalid_argument("no colon");
      ratio.positive = std::stoi(ratio_flag.substr(0, colon));
      ratio.negative = std::stoi(ratio_flag.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("--ratio must look like 1:1");
    }
  }
  const auto params = flags.resolve();
  auto pairs = corpus::build_evas_pairs(load_records(corpus_path), ratio, seed, params);

  std::string out;
  std::size_t positives = 0;
  for (const auto& pair : pairs) {
    ordered_json doc;
    doc["s_g"] = pair.generated;
    doc["s_r"] = pair.reference;
    doc["score"] = pair.score;
    doc["polarity"] = pair.polarity == metrics::Polarity::Positive ? "pos" : "neg";
    if (pair.polarity == metrics::Polarity::Positive) ++positives;
    out += doc.dump() + "\n";
  }
  write_file(out_path, out);
  std::cout << "built " << positives << " positive / " << (pairs.size() - positives)
            << " negative pairs\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Call-graph-ordered function summarization toolkit"};
  app.require_subcommand(1);

  // resort
  auto* resort_cmd = app.add_subcommand("resort", "Print the callee-first processing order");
  std::string resort_graph, resort_format = "auto";
  bool resort_json = false;
  resort_cmd->add_option("graph", resort_graph, "Call-graph file (JSON or DOT)")->required();
  resort_cmd->add_option("--format", resort_format, "Graph format: auto, json, dot");
  resort_cmd->add_flag("--json", resort_json, "Emit a JSON array instead of one id per line");

  // summarize
  auto* summarize_cmd = app.add_subcommand("summarize", "Run the summarization pipeline");
  std::string summarize_config;
  bool summarize_timing = false;
  summarize_cmd->add_option("--config", summarize_config, "Run configuration JSON")->required();
  summarize_cmd->add_flag("--timing", summarize_timing,
                          "Record real per-function times (breaks byte reproducibility)");

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score summaries against references");
  std::string eval_transcript, eval_references, eval_out;
  int eval_bias_probe = 0;
  bool eval_pit = false;
  MetricFlags eval_flags;
  evaluate_cmd->add_option("--transcript", eval_transcript, "Transcript JSON-lines file");
  evaluate_cmd->add_option("--references", eval_references, "JSON object of id -> reference");
  evaluate_cmd->add_option("--out", eval_out, "Report destination (stdout when omitted)");
  evaluate_cmd->add_option("--bias-probe", eval_bias_probe,
                           "Emit an NxN zero-overlap BLEU grid as CSV instead of a report");
  evaluate_cmd->add_flag("--pit", eval_pit, "Normalize metrics by empirical CDF");
  eval_flags.attach(evaluate_cmd);

  // dataset
  auto* dataset_cmd = app.add_subcommand("dataset", "Corpus construction utilities");
  dataset_cmd->require_subcommand(1);

  auto* filter_cmd = dataset_cmd->add_subcommand("filter", "Apply the corpus filtering rules");
  std::string filter_corpus_path, filter_kept, filter_rejected;
  filter_cmd->add_option("--corpus", filter_corpus_path, "Input corpus JSON-lines")->required();
  filter_cmd->add_option("--kept", filter_kept, "Output file for kept records")->required();
  filter_cmd->add_option("--rejected", filter_rejected, "Rejection log (id + reason)");

  auto* strip_cmd = dataset_cmd->add_subcommand("strip", "Strip symbols from a corpus");
  std::string strip_corpus_path, strip_level, strip_out, strip_api_file;
  std::uint64_t strip_seed = 0;
  strip_cmd->add_option("--corpus", strip_corpus_path, "Input corpus JSON-lines")->required();
  strip_cmd->add_option("--level", strip_level, "demi or all")->required();
  strip_cmd->add_option("--seed", strip_seed, "Seed for the replacement names");
  strip_cmd->add_option("--out", strip_out, "Output corpus file")->required();
  strip_cmd->add_option("--api-file", strip_api_file, "API names preserved by all-strip");

  auto* csl_cmd = dataset_cmd->add_subcommand("csl", "Export the token-label dataset");
  std::string csl_corpus_path, csl_api_file, csl_out;
  csl_cmd->add_option("--corpus", csl_corpus_path, "Input corpus JSON-lines")->required();
  csl_cmd->add_option("--api-file", csl_api_file, "API knowledge list")->required();
  csl_cmd->add_option("--out", csl_out, "Output JSON-lines file")->required();

  auto* evas_cmd = dataset_cmd->add_subcommand("evas", "Build scored sentence pairs");
  std::string evas_corpus_path, evas_ratio = "1:1", evas_out;
  std::uint64_t evas_seed = 0;
  MetricFlags evas_flags;
  evas_cmd->add_option("--corpus", evas_corpus_path, "Input corpus JSON-lines")->required();
  evas_cmd->add_option("--ratio", evas_ratio, "positive:negative ratio");
  evas_cmd->add_option("--seed", evas_seed, "Sampling seed");
  evas_cmd->add_option("--out", evas_out, "Output JSON-lines file")->required();
  evas_flags.attach(evas_cmd);

  try {
    app.parse(argc, argv);

    if (resort_cmd->parsed()) return cmd_resort(resort_graph, resort_format, resort_json);
    if (summarize_cmd->parsed()) return cmd_summarize(summarize_config, summarize_timing);
    if (evaluate_cmd->parsed())
      return cmd_evaluate(eval_transcript, eval_references, eval_out, eval_bias_probe, eval_pit,
                          eval_flags);
    if (dataset_cmd->parsed()) {
      if (filter_cmd->parsed())
        return cmd_dataset_filter(filter_corpus_path, filter_kept, filter_rejected);
      if (strip_cmd->parsed())
        return cmd_dataset_strip(strip_corpus_path, strip_level, strip_seed, strip_out,
                                 strip_api_file);
      if (csl_cmd->parsed()) return cmd_dataset_csl(csl_corpus_path, csl_api_file, csl_out);
      if (evas_cmd->parsed())
        return cmd_dataset_evas(evas_corpus_path, evas_ratio, evas_seed, evas_out, evas_flags);
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const funcsum::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
