#include "funcsum/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "funcsum/errors.hpp"
#include "funcsum/lexer.hpp"

namespace funcsum::corpus {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

FunctionRecord record_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("record must be a JSON object");
  FunctionRecord record;
  for (const char* field : {"id", "name", "body"}) {
    if (!doc.contains(field) || !doc[field].is_string())
      throw ParseError(std::string("missing or non-string field \"") + field + "\"");
  }
  record.id = doc["id"].get<std::string>();
  record.name = doc["name"].get<std::string>();
  record.body = doc["body"].get<std::string>();
  if (record.id.empty()) throw ParseError("record id must be non-empty");
  if (doc.contains("callees")) {
    if (!doc["callees"].is_array()) throw ParseError("\"callees\" must be an array");
    for (const auto& c : doc["callees"]) {
      if (!c.is_string()) throw ParseError("callee ids must be strings");
      record.callees.push_back(c.get<std::string>());
    }
  }
  if (doc.contains("summary") && !doc["summary"].is_null()) {
    if (!doc["summary"].is_string()) throw ParseError("\"summary\" must be a string or null");
    record.summary = doc["summary"].get<std::string>();
  }
  return record;
}

ordered_json record_to_json(const FunctionRecord& record) {
  ordered_json doc;
  doc["id"] = record.id;
  doc["name"] = record.name;
  doc["body"] = record.body;
  doc["callees"] = record.callees;
  if (record.summary)
    doc["summary"] = *record.summary;
  else
    doc["summary"] = nullptr;
  return doc;
}

std::size_t body_line_count(std::string_view body) {
  if (body.empty()) return 0;
  std::size_t lines = 1 + static_cast<std::size_t>(std::count(body.begin(), body.end(), '\n'));
  if (body.back() == '\n') --lines;  // trailing newline closes the last line
  return lines;
}

// Identifiers that survive all-stripping: language keywords plus the type
// and convention names decompilers emit.
const std::unordered_set<std::string>& keyword_set() {
  static const std::unordered_set<std::string> kKeywords = {
      "if", "else", "while", "for", "do", "switch", "case", "default", "break", "continue",
      "goto", "return", "sizeof", "struct", "union", "enum", "typedef", "static", "extern",
      "const", "volatile", "register", "signed", "unsigned", "void", "char", "short", "int",
      "long", "float", "double", "bool", "true", "false", "NULL", "nullptr", "wchar_t",
      "int8_t", "int16_t", "int32_t", "int64_t", "uint8_t", "uint16_t", "uint32_t", "uint64_t",
      "size_t", "ssize_t", "intptr_t", "uintptr_t", "ptrdiff_t", "va_list", "FILE",
      // decompiler-flavored types and conventions
      "BYTE", "WORD", "DWORD", "QWORD", "BOOL", "CHAR", "UCHAR", "USHORT", "UINT", "ULONG",
      "LONG", "INT", "HANDLE", "HMODULE", "HKEY", "HWND", "SOCKET", "LPVOID", "PVOID",
      "LPSTR", "LPCSTR", "LPWSTR", "LPCWSTR", "LPBYTE", "LPDWORD", "WCHAR", "LPCVOID",
      "_BYTE", "_WORD", "_DWORD", "_QWORD", "_OWORD", "_UNKNOWN", "__int8", "__int16",
      "__int32", "__int64", "__fastcall", "__stdcall", "__cdecl", "__thiscall", "__usercall",
      "__userpurge", "__noreturn", "__declspec", "WINAPI", "CALLBACK",
  };
  return kKeywords;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Platform-stable bounded draw; std distributions are not portable.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

bool starts_with_ci(std::string_view text, std::string_view prefix) {
  if (text.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i])))
      return false;
  }
  return true;
}

}  // namespace

IngestResult ingest_corpus(std::string_view text) {
  IngestResult result;
  std::set<FunctionId> ids;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    std::string_view line =
        end == std::string_view::npos ? text.substr(start) : text.substr(start, end - start);
    ++line_no;
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;

    std::string_view trimmed = line;
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
      trimmed.remove_suffix(1);
    if (trimmed.empty()) continue;

    try {
      json doc = json::parse(trimmed);
      FunctionRecord record = record_from_json(doc);
      if (!ids.insert(record.id).second) {
        result.diagnostics.push_back({line_no, "duplicate record id \"" + record.id + "\", line skipped"});
        continue;
      }
      result.records.push_back(std::move(record));
    } catch (const json::parse_error& e) {
      result.diagnostics.push_back({line_no, std::string("unparseable record: ") + e.what()});
    } catch (const ParseError& e) {
      result.diagnostics.push_back({line_no, e.what()});
    }
  }
  // Dangling callees are legitimate (library calls) but worth surfacing.
  for (const auto& record : result.records) {
    for (const auto& callee : record.callees) {
      if (!ids.count(callee)) {
        result.diagnostics.push_back(
            {0, "record \"" + record.id + "\" references unknown callee \"" + callee + "\""});
      }
    }
  }
  return result;
}

IngestResult load_corpus_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read corpus file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ingest_corpus(buffer.str());
}

void write_corpus(std::ostream& out, const std::vector<FunctionRecord>& records) {
  for (const auto& record : records) out << record_to_json(record).dump() << '\n';
}

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::Duplicate: return "Duplicate";
    case RejectReason::TooShort: return "TooShort";
    case RejectReason::Malformed: return "Malformed";
  }
  return "Unknown";
}

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out += ' ';
      pending_space = false;
      out += c;
    }
  }
  return out;
}

bool valid_utf8(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    std::size_t extra;
    if (c < 0x80) {
      extra = 0;
    } else if ((c & 0xe0) == 0xc0) {
      extra = 1;
      if (c < 0xc2) return false;  // overlong
    } else if ((c & 0xf0) == 0xe0) {
      extra = 2;
    } else if ((c & 0xf8) == 0xf0) {
      extra = 3;
      if (c > 0xf4) return false;  // beyond U+10FFFF
    } else {
      return false;
    }
    for (std::size_t k = 1; k <= extra; ++k) {
      if (i + k >= text.size() || (static_cast<unsigned char>(text[i + k]) & 0xc0) != 0x80)
        return false;
    }
    i += extra + 1;
  }
  return true;
}

FilterResult filter_corpus(std::vector<FunctionRecord> records) {
  FilterResult result;
  std::unordered_set<std::string> seen_bodies;
  for (auto& record : records) {
    if (body_line_count(record.body) < kMinBodyLines) {
      result.rejected.emplace_back(std::move(record), RejectReason::TooShort);
      continue;
    }
    if (!valid_utf8(record.body) || !lexer::delimiters_balanced(record.body)) {
      result.rejected.emplace_back(std::move(record), RejectReason::Malformed);
      continue;
    }
    if (!seen_bodies.insert(normalize_whitespace(record.body)).second) {
      result.rejected.emplace_back(std::move(record), RejectReason::Duplicate);
      continue;
    }
    result.kept.push_back(std::move(record));
  }
  return result;
}

std::string stripped_name(std::uint64_t seed, const FunctionId& id) {
  std::uint64_t h = splitmix64(seed);
  for (unsigned char c : id) h = splitmix64(h ^ c);
  static const char* kHex = "0123456789ABCDEF";
  std::string name = "sub_";
  for (int shift = 20; shift >= 0; shift -= 4) name += kHex[(h >> shift) & 0xf];
  return name;
}

FunctionRecord strip(const FunctionRecord& record, StripLevel level, std::uint64_t seed,
                     const ApiNameSet* preserved_apis) {
  if (record.strip_level != StripLevel::NotStripped)
    throw ValidationError("record \"" + record.id + "\" is already stripped");
  if (level == StripLevel::NotStripped) return record;

  const std::string own_stripped = stripped_name(seed, record.id);

  std::map<std::string, std::string> renames;  // identifier -> replacement
  renames[record.name] = own_stripped;
  renames[record.id] = own_stripped;
  if (level == StripLevel::AllStripped) {
    for (const auto& callee : record.callees) {
      if (callee == record.id) continue;
      renames[callee] = stripped_name(seed, callee);
    }
  }

  const auto tokens = lexer::lex(record.body);
  int next_local = 1;
  std::string body;
  body.reserve(record.body.size());
  std::size_t copied = 0;
  for (const auto& token : tokens) {
    if (token.kind != lexer::TokenKind::Identifier) continue;
    std::string replacement;
    auto it = renames.find(token.text);
    if (it != renames.end()) {
      replacement = it->second;
    } else if (level == StripLevel::AllStripped) {
      if (keyword_set().count(token.text)) continue;
      if (preserved_apis && preserved_apis->count(token.text)) continue;
      replacement = "v" + std::to_string(next_local++);
      renames[token.text] = replacement;
    } else {
      continue;
    }
    body.append(record.body, copied, token.offset - copied);
    body.append(replacement);
    copied = token.offset + token.text.size();
  }
  body.append(record.body, copied, record.body.size() - copied);

  FunctionRecord out = record;
  out.name = own_stripped;
  out.body = std::move(body);
  out.strip_level = level;
  return out;
}

std::string perturb_summary(std::string_view summary, std::uint64_t draw) {
  const std::string text(summary);
  const std::uint64_t kind = draw % 3;

  auto prefix_toggle = [&]() -> std::string {
    for (std::string_view prefix : {"the code ", "this function "}) {
      if (starts_with_ci(text, prefix)) return text.substr(prefix.size());
    }
    return "the code " + text;
  };

  if (kind == 0) {
    // Article deletion: drop the first standalone a/an/the.
    std::istringstream words(text);
    std::vector<std::string> parts;
    std::string w;
    while (words >> w) parts.push_back(w);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      std::string lower = parts[i];
      std::transform(lower.begin(), lower.end(), lower.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      if ((lower == "a" || lower == "an" || lower == "the") && parts.size() > 1) {
        parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(i));
        std::string joined;
        for (std::size_t k = 0; k < parts.size(); ++k) {
          if (k) joined += ' ';
          joined += parts[k];
        }
        return joined;
      }
    }
    return prefix_toggle();
  }
  if (kind == 2) {
    // Comma-clause rotation: "x, y, z" -> "y, z, x".
    std::vector<std::string> clauses;
    std::size_t start = 0;
    const std::string sep = ", ";
    for (std::size_t pos = text.find(sep); pos != std::string::npos;
         pos = text.find(sep, start)) {
      clauses.push_back(text.substr(start, pos - start));
      start = pos + sep.size();
    }
    clauses.push_back(text.substr(start));
    if (clauses.size() >= 2) {
      std::rotate(clauses.begin(), clauses.begin() + 1, clauses.end());
      std::string joined;
      for (std::size_t k = 0; k < clauses.size(); ++k) {
        if (k) joined += sep;
        joined += clauses[k];
      }
      return joined;
    }
    return prefix_toggle();
  }
  return prefix_toggle();
}

std::vector<EvasPair> build_evas_pairs(const std::vector<FunctionRecord>& records, EvasRatio ratio,
                                       std::uint64_t seed, const metrics::MetricParams& params) {
  params.validate();
  if (ratio.positive < 1 || ratio.negative < 0)
    throw ValidationError("ratio must have positive >= 1 and negative >= 0");

  std::vector<const FunctionRecord*> summarized;
  for (const auto& record : records) {
    if (record.summary && !record.summary->empty()) summarized.push_back(&record);
  }
  if (summarized.size() < 2)
    throw ValidationError("need at least 2 summarized records to build pairs");

  std::mt19937_64 rng(seed);
  std::vector<EvasPair> pairs;

  for (const auto* record : summarized) {
    const std::string& reference = *record->summary;
    EvasPair pair;
    pair.generated = perturb_summary(reference, rng());
    pair.reference = reference;
    pair.polarity = metrics::Polarity::Positive;
    pair.score = metrics::score_label(pair.generated, pair.reference, pair.polarity, params);
    pairs.push_back(std::move(pair));
  }

  // Negatives scaled by the ratio; flooring leaves the positive side ahead
  // when the ratio does not divide evenly.
  const std::size_t n_negative =
      summarized.size() * static_cast<std::size_t>(ratio.negative) /
      static_cast<std::size_t>(ratio.positive);
  for (std::size_t k = 0; k < n_negative; ++k) {
    std::uint64_t i = bounded(rng, summarized.size());
    std::uint64_t j = bounded(rng, summarized.size() - 1);
    if (j >= i) ++j;  // uniform over pairs with i != j
    EvasPair pair;
    pair.generated = *summarized[i]->summary;
    pair.reference = *summarized[j]->summary;
    pair.polarity = metrics::Polarity::Negative;
    pair.score = metrics::score_label(pair.generated, pair.reference, pair.polarity, params);
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

}  // namespace funcsum::corpus
