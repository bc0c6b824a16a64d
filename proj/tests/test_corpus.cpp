#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <regex>
#include <sstream>

#include "funcsum/corpus.hpp"
#include "funcsum/errors.hpp"
#include "funcsum/lexer.hpp"

using namespace funcsum;
using namespace funcsum::corpus;

namespace {

std::string five_line_body(const std::string& name, const std::string& callee = "") {
  std::string body = "int " + name + "(int a)\n{\n  int v = a + 1;\n";
  if (!callee.empty()) body += "  v = " + callee + "(v);\n";
  body += "  return v;\n}";
  return body;
}

FunctionRecord make_record(const std::string& id, std::string body,
                           std::vector<std::string> callees = {},
                           std::optional<std::string> summary = std::nullopt) {
  FunctionRecord r;
  r.id = id;
  r.name = id;
  r.body = std::move(body);
  r.callees = std::move(callees);
  r.summary = std::move(summary);
  return r;
}

}  // namespace

// ---- ingest -----------------------------------------------------------------

TEST_CASE("three valid lines ingest as three records") {
  std::string text =
      R"({"id":"a","name":"a","body":"x","callees":[],"summary":null})" "\n"
      R"({"id":"b","name":"b","body":"y","callees":["a"],"summary":"does y"})" "\n"
      R"({"id":"c","name":"c","body":"z","callees":[]})" "\n";
  auto result = ingest_corpus(text);
  REQUIRE(result.records.size() == 3);
  CHECK(result.records[1].summary == "does y");
  CHECK_FALSE(result.records[0].summary.has_value());
  CHECK(result.diagnostics.empty());
}

TEST_CASE("a line missing body is skipped with its line number") {
  std::string text =
      R"({"id":"a","name":"a","body":"x"})" "\n"
      R"({"id":"b","name":"b"})" "\n"
      R"({"id":"c","name":"c","body":"z"})" "\n";
  auto result = ingest_corpus(text);
  CHECK(result.records.size() == 2);
  REQUIRE(result.diagnostics.size() == 1);
  CHECK(result.diagnostics[0].line == 2);
  CHECK(result.diagnostics[0].message.find("body") != std::string::npos);
}

TEST_CASE("unknown callees load with a dangling warning") {
  std::string text = R"({"id":"a","name":"a","body":"x","callees":["ext_lib_call"]})" "\n";
  auto result = ingest_corpus(text);
  REQUIRE(result.records.size() == 1);
  REQUIRE(result.diagnostics.size() == 1);
  CHECK(result.diagnostics[0].message.find("ext_lib_call") != std::string::npos);
}

TEST_CASE("unparseable json lines are reported, not fatal") {
  auto result = ingest_corpus("{not json}\n" R"({"id":"a","name":"a","body":"x"})" "\n");
  CHECK(result.records.size() == 1);
  REQUIRE_FALSE(result.diagnostics.empty());
  CHECK(result.diagnostics[0].line == 1);
}

// ---- filter -----------------------------------------------------------------

TEST_CASE("four-line bodies are rejected as too short") {
  auto r4 = make_record("short", "int f()\n{\n  return 0;\n}");
  auto r5 = make_record("ok", five_line_body("ok"));
  auto result = filter_corpus({r4, r5});
  REQUIRE(result.kept.size() == 1);
  CHECK(result.kept[0].id == "ok");
  REQUIRE(result.rejected.size() == 1);
  CHECK(result.rejected[0].second == RejectReason::TooShort);
}

TEST_CASE("duplicate bodies keep the first occurrence") {
  auto a = make_record("first", five_line_body("f"));
  auto b = make_record("second", five_line_body("f"));
  b.body += "\n";  // whitespace-only difference still counts as duplicate
  auto result = filter_corpus({a, b});
  REQUIRE(result.kept.size() == 1);
  CHECK(result.kept[0].id == "first");
  REQUIRE(result.rejected.size() == 1);
  CHECK(result.rejected[0].first.id == "second");
  CHECK(result.rejected[0].second == RejectReason::Duplicate);
}

TEST_CASE("unbalanced delimiters are malformed") {
  auto bad = make_record("bad", "int f()\n{\n  int x = g(;\n  return x;\n}\n}");
  auto result = filter_corpus({bad});
  REQUIRE(result.rejected.size() == 1);
  CHECK(result.rejected[0].second == RejectReason::Malformed);
}

TEST_CASE("non-utf8 bytes are malformed") {
  std::string body = five_line_body("f");
  body += char(0xff);
  auto result = filter_corpus({make_record("binary", body)});
  REQUIRE(result.rejected.size() == 1);
  CHECK(result.rejected[0].second == RejectReason::Malformed);
}

TEST_CASE("filtering is idempotent") {
  std::vector<FunctionRecord> records{
      make_record("a", five_line_body("a")),
      make_record("b", five_line_body("b", "a")),
      make_record("dup", five_line_body("a")),
      make_record("tiny", "x\ny"),
  };
  auto first = filter_corpus(records);
  auto second = filter_corpus(first.kept);
  CHECK(second.rejected.empty());
  REQUIRE(second.kept.size() == first.kept.size());
  for (std::size_t i = 0; i < second.kept.size(); ++i)
    CHECK(second.kept[i].id == first.kept[i].id);
}

// ---- strip ------------------------------------------------------------------

TEST_CASE("demi-strip renames exactly the function's own name") {
  auto record = make_record("initLevel", five_line_body("initLevel"));
  auto stripped = strip(record, StripLevel::DemiStripped, 7);
  CHECK(std::regex_match(stripped.name, std::regex("sub_[0-9A-F]{6}")));
  CHECK(stripped.strip_level == StripLevel::DemiStripped);

  // token streams differ only where the old name stood
  auto before = lexer::tokenize_pseudocode(record.body);
  auto after = lexer::tokenize_pseudocode(stripped.body);
  REQUIRE(before.size() == after.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (before[i] == "initLevel") {
      CHECK(after[i] == stripped.name);
    } else {
      CHECK(after[i] == before[i]);
    }
  }
}

TEST_CASE("all-strip is deterministic for a seed") {
  auto record = make_record("worker", five_line_body("worker", "helper"), {"helper"});
  auto once = strip(record, StripLevel::AllStripped, 42);
  auto twice = strip(record, StripLevel::AllStripped, 42);
  CHECK(once.body == twice.body);
  CHECK(once.name == twice.name);
  auto other_seed = strip(record, StripLevel::AllStripped, 43);
  CHECK(once.name != other_seed.name);
}

TEST_CASE("all-strip renames locals positionally and preserves literals") {
  ApiNameSet apis{"CreateFileA"};
  auto record = make_record(
      "dropper",
      "void dropper(void)\n{\n  char *path = \"cmd.exe\";\n  HANDLE h = CreateFileA(path);\n"
      "  helper(h);\n  return;\n}",
      {"helper"});
  auto stripped = strip(record, StripLevel::AllStripped, 7, &apis);

  CHECK(stripped.body.find("cmd.exe") != std::string::npos);
  CHECK(stripped.body.find("CreateFileA") != std::string::npos);
  CHECK(stripped.body.find("helper") == std::string::npos);
  CHECK(stripped.body.find("path") == std::string::npos);
  CHECK(stripped.body.find("v1") != std::string::npos);

  // no original local identifier survives
  auto after = lexer::tokenize_pseudocode(stripped.body);
  for (const auto& t : after) {
    CHECK(t != "path");
    CHECK(t != "h");
    CHECK(t != "dropper");
    CHECK(t != "helper");
  }
  // callee got its own deterministic stripped form
  CHECK(stripped.body.find(stripped_name(7, "helper")) != std::string::npos);
}

TEST_CASE("stripping an already-stripped record is a precondition error") {
  auto record = make_record("f", five_line_body("f"));
  auto demi = strip(record, StripLevel::DemiStripped, 1);
  CHECK_THROWS_AS(strip(demi, StripLevel::AllStripped, 1), ValidationError);
}

TEST_CASE("keywords survive all-strip") {
  auto record = make_record("calc", five_line_body("calc"));
  auto stripped = strip(record, StripLevel::AllStripped, 3);
  CHECK(stripped.body.find("int") != std::string::npos);
  CHECK(stripped.body.find("return") != std::string::npos);
}

// ---- perturbations and evas pairs --------------------------------------------

TEST_CASE("perturbation family") {
  CHECK(perturb_summary("opens a socket", 0) == "opens socket");       // article deletion
  CHECK(perturb_summary("opens socket", 1) == "the code opens socket");  // prefix toggle
  CHECK(perturb_summary("The code opens socket", 1) == "opens socket");
  CHECK(perturb_summary("reads config, sends beacon", 2) == "sends beacon, reads config");
  // fallbacks land on the prefix toggle
  CHECK(perturb_summary("plain words here", 0) == "the code plain words here");
  CHECK(perturb_summary("single", 2) == "the code single");
}

TEST_CASE("evas ratio 1:1 gives equal counts") {
  std::vector<FunctionRecord> records;
  for (int i = 0; i < 10; ++i) {
    auto r = make_record("f" + std::to_string(i), five_line_body("f"));
    r.summary = "does thing number " + std::to_string(i) + " to the host";
    records.push_back(r);
  }
  auto pairs = build_evas_pairs(records, {1, 1}, 5, metrics::MetricParams{});
  std::size_t pos = 0, neg = 0;
  for (const auto& p : pairs) (p.polarity == metrics::Polarity::Positive ? pos : neg)++;
  CHECK(pos == 10);
  CHECK(neg == 10);
}

TEST_CASE("evas ratios scale negatives, rounding toward positive") {
  std::vector<FunctionRecord> records;
  for (int i = 0; i < 5; ++i) {
    auto r = make_record("f" + std::to_string(i), five_line_body("f"));
    r.summary = "summary " + std::to_string(i);
    records.push_back(r);
  }
  auto pairs = build_evas_pairs(records, {2, 3}, 5, metrics::MetricParams{});
  std::size_t pos = 0, neg = 0;
  for (const auto& p : pairs) (p.polarity == metrics::Polarity::Positive ? pos : neg)++;
  CHECK(pos == 5);
  CHECK(neg == 7);  // floor(5 * 3 / 2)
}

TEST_CASE("evas scores respect the polarity bounds") {
  metrics::MetricParams params;
  std::vector<FunctionRecord> records;
  for (int i = 0; i < 8; ++i) {
    auto r = make_record("f" + std::to_string(i), five_line_body("f"));
    r.summary = "function " + std::to_string(i) + " configures the channel, then reports status";
    records.push_back(r);
  }
  auto pairs = build_evas_pairs(records, {1, 1}, 11, params);
  for (const auto& p : pairs) {
    if (p.polarity == metrics::Polarity::Positive) {
      CHECK(p.score >= params.p_semantic - 1e-12);
      CHECK(p.score <= 1.0 + 1e-12);
    } else {
      CHECK(p.score >= 0.0);
      CHECK(p.score <= 1.0 - params.p_semantic + 1e-12);
    }
  }
}

TEST_CASE("evas pairs are deterministic for a seed") {
  std::vector<FunctionRecord> records;
  for (int i = 0; i < 6; ++i) {
    auto r = make_record("f" + std::to_string(i), five_line_body("f"));
    r.summary = "does work on item " + std::to_string(i);
    records.push_back(r);
  }
  auto a = build_evas_pairs(records, {1, 1}, 9, metrics::MetricParams{});
  auto b = build_evas_pairs(records, {1, 1}, 9, metrics::MetricParams{});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].generated == b[i].generated);
    CHECK(a[i].reference == b[i].reference);
    CHECK(a[i].score == b[i].score);
  }
}

TEST_CASE("fewer than two summaries is an error") {
  std::vector<FunctionRecord> records{make_record("only", five_line_body("only"))};
  records[0].summary = "alone";
  CHECK_THROWS_AS(build_evas_pairs(records, {1, 1}, 0, metrics::MetricParams{}), ValidationError);
}

// ---- helpers ------------------------------------------------------------------

TEST_CASE("whitespace normalization collapses runs") {
  CHECK(normalize_whitespace("  a\t b\n\nc ") == "a b c");
  CHECK(normalize_whitespace("") == "");
}

TEST_CASE("round-trip through write_corpus and ingest") {
  std::vector<FunctionRecord> records{
      make_record("a", five_line_body("a"), {"b"}, "does a"),
      make_record("b", five_line_body("b")),
  };
  std::ostringstream out;
  write_corpus(out, records);
  auto back = ingest_corpus(out.str());
  REQUIRE(back.records.size() == 2);
  CHECK(back.records[0].body == records[0].body);
  CHECK(back.records[0].summary == records[0].summary);
  CHECK(back.records[0].callees == records[0].callees);
}
