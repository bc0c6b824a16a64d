#include "funcsum/graph_io.hpp"

#include <algorithm>
#include <cctype>

#include <json.hpp>

#include "funcsum/errors.hpp"

namespace funcsum::fcg {

namespace {

// Entries default per document; dedup preserves first mention.
void finalize_entries(CallGraph& g, std::vector<FunctionId> declared) {
  std::vector<FunctionId> entries;
  for (auto& e : declared) {
    if (!g.has_vertex(e)) throw ValidationError("entry vertex not declared: " + e);
    if (std::find(entries.begin(), entries.end(), e) == entries.end())
      entries.push_back(std::move(e));
  }
  if (entries.empty() && !g.vertices.empty()) {
    std::set<FunctionId> called;
    for (const auto& [from, to] : g.edges) called.insert(to);
    for (const auto& v : g.vertices) {
      if (!called.count(v)) entries.push_back(v);
    }
    if (entries.empty()) entries.push_back(*g.vertices.begin());
  }
  g.entries = std::move(entries);
}

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(), text.begin() + std::min(offset, text.size()), '\n'));
}

CallGraph parse_json_graph(std::string_view input) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(input);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), line_of_offset(input, e.byte));
  }
  if (!doc.is_object()) throw ParseError("call-graph document must be a JSON object");

  CallGraph g;
  if (doc.contains("vertices")) {
    if (!doc["vertices"].is_array()) throw ParseError("\"vertices\" must be an array");
    for (const auto& v : doc["vertices"]) {
      if (!v.is_string()) throw ParseError("vertex ids must be strings");
      g.vertices.insert(v.get<FunctionId>());
    }
  }
  if (doc.contains("edges")) {
    if (!doc["edges"].is_array()) throw ParseError("\"edges\" must be an array");
    for (const auto& e : doc["edges"]) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
        throw ParseError("each edge must be a [caller, callee] string pair");
      FunctionId from = e[0].get<FunctionId>();
      FunctionId to = e[1].get<FunctionId>();
      if (!g.has_vertex(from)) throw ValidationError("edge endpoint not declared: " + from);
      if (!g.has_vertex(to)) throw ValidationError("edge endpoint not declared: " + to);
      g.edges.insert({std::move(from), std::move(to)});
    }
  }
  std::vector<FunctionId> declared;
  if (doc.contains("entries")) {
    if (!doc["entries"].is_array()) throw ParseError("\"entries\" must be an array");
    for (const auto& e : doc["entries"]) {
      if (!e.is_string()) throw ParseError("entry ids must be strings");
      declared.push_back(e.get<FunctionId>());
    }
  }
  finalize_entries(g, std::move(declared));
  return g;
}

// --- DOT subset ------------------------------------------------------------

struct DotToken {
  enum Kind { Id, Symbol, End } kind;
  std::string text;
  std::size_t line;
};

class DotLexer {
 public:
  explicit DotLexer(std::string_view src) : src_(src) {}

  DotToken next() {
    skip_blanks();
    if (pos_ >= src_.size()) return {DotToken::End, "", line_};
    char c = src_[pos_];
    std::size_t line = line_;
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
      std::size_t start = pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                    src_[pos_] == '_' || src_[pos_] == '.'))
        ++pos_;
      return {DotToken::Id, std::string(src_.substr(start, pos_ - start)), line};
    }
    if (c == '"') {
      ++pos_;
      std::string text;
      while (pos_ < src_.size() && src_[pos_] != '"') {
        if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) ++pos_;
        if (src_[pos_] == '\n') ++line_;
        text += src_[pos_++];
      }
      if (pos_ >= src_.size()) throw ParseError("unterminated quoted id", line);
      ++pos_;
      return {DotToken::Id, std::move(text), line};
    }
    if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
      pos_ += 2;
      return {DotToken::Symbol, "->", line};
    }
    ++pos_;
    return {DotToken::Symbol, std::string(1, c), line};
  }

 private:
  void skip_blanks() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
        pos_ += 2;
        while (pos_ + 1 < src_.size() && !(src_[pos_] == '*' && src_[pos_ + 1] == '/')) {
          if (src_[pos_] == '\n') ++line_;
          ++pos_;
        }
        if (pos_ + 1 >= src_.size()) throw ParseError("unterminated comment", line_);
        pos_ += 2;
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

CallGraph parse_dot_graph(std::string_view input) {
  DotLexer lexer(input);
  auto expect = [&](const char* what, auto pred) {
    DotToken t = lexer.next();
    if (!pred(t)) throw ParseError(std::string("expected ") + what, t.line);
    return t;
  };

  expect("\"digraph\"", [](const DotToken& t) { return t.kind == DotToken::Id && t.text == "digraph"; });
  DotToken t = lexer.next();
  if (t.kind == DotToken::Id) t = lexer.next();  // optional graph name
  if (!(t.kind == DotToken::Symbol && t.text == "{")) throw ParseError("expected '{'", t.line);

  CallGraph g;
  std::vector<FunctionId> declared_entries;

  auto skip_attr_list = [&](DotToken& tok) {
    while (tok.kind == DotToken::Symbol && tok.text == "[") {
      int depth = 1;
      while (depth > 0) {
        DotToken inner = lexer.next();
        if (inner.kind == DotToken::End) throw ParseError("unterminated attribute list", inner.line);
        if (inner.kind == DotToken::Symbol && inner.text == "[") ++depth;
        if (inner.kind == DotToken::Symbol && inner.text == "]") --depth;
      }
      tok = lexer.next();
    }
  };

  t = lexer.next();
  while (!(t.kind == DotToken::Symbol && t.text == "}")) {
    if (t.kind == DotToken::End) throw ParseError("expected '}' before end of input", t.line);
    if (t.kind != DotToken::Id) throw ParseError("expected node id, got '" + t.text + "'", t.line);

    std::string head = t.text;
    t = lexer.next();
    if (t.kind == DotToken::Symbol && t.text == "=") {
      // Graph attribute; only entry="name" is meaningful, others ignored.
      DotToken value = expect("attribute value", [](const DotToken& v) { return v.kind == DotToken::Id; });
      if (head == "entry") declared_entries.push_back(value.text);
      t = lexer.next();
    } else {
      g.vertices.insert(head);
      while (t.kind == DotToken::Symbol && t.text == "->") {
        DotToken target = expect("node id after '->'", [](const DotToken& v) { return v.kind == DotToken::Id; });
        g.vertices.insert(target.text);
        g.edges.insert({head, target.text});
        head = target.text;
        t = lexer.next();
      }
      skip_attr_list(t);
    }
    if (t.kind == DotToken::Symbol && t.text == ";") t = lexer.next();
  }

  finalize_entries(g, std::move(declared_entries));
  return g;
}

}  // namespace

GraphFormat sniff_graph_format(std::string_view input) {
  for (char c : input) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c == '{' ? GraphFormat::Json : GraphFormat::Dot;
  }
  return GraphFormat::Json;
}

CallGraph parse_call_graph(std::string_view input, GraphFormat format) {
  CallGraph g = format == GraphFormat::Json ? parse_json_graph(input) : parse_dot_graph(input);
  validate(g);
  return g;
}

}  // namespace funcsum::fcg
