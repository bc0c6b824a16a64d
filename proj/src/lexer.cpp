#include "funcsum/lexer.hpp"

#include <array>
#include <cctype>

#include "funcsum/errors.hpp"

namespace funcsum::lexer {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

// Longest first so maximal munch falls out of a linear scan.
constexpr std::array<std::string_view, 39> kOperators = {
    "<<=", ">>=", "...", "->*", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=",
    "&&",  "||",  "+=",  "-=",  "*=", "/=", "%=", "&=", "|=", "^=", "::", "+",  "-",
    "*",   "/",   "%",   "=",   "<",  ">",  "!",  "&",  "|",  "^",  "~",  "?",  ".",
};

// Single-char punctuation not covered above.
constexpr std::string_view kPunct = ":;,()[]{}#@\\";

// Consumes a quoted literal starting at `pos` (source[pos] is the quote).
// Returns one past the closing quote. A raw newline or EOF inside the
// literal is an error; decompiler output never spans literals over lines.
std::size_t scan_quoted(std::string_view src, std::size_t pos, char quote) {
  const std::size_t start = pos;
  ++pos;
  while (pos < src.size()) {
    char c = src[pos];
    if (c == '\\' && pos + 1 < src.size()) {
      pos += 2;
      continue;
    }
    if (c == '\n') break;
    ++pos;
    if (c == quote) return pos;
  }
  throw ParseError("unterminated " + std::string(quote == '"' ? "string" : "character") +
                   " literal at offset " + std::to_string(start));
}

// Number tokens are unsigned lexically; a leading '-' stays an operator.
// Accepts hex/bin prefixes, suffixes, '.', and signed exponents
// (1e+5, 0x1p-3) via a single alnum/dot run.
std::size_t scan_number(std::string_view src, std::size_t pos) {
  while (pos < src.size()) {
    char c = src[pos];
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '.') {
      char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      ++pos;
      if ((lower == 'e' || lower == 'p') && pos < src.size() &&
          (src[pos] == '+' || src[pos] == '-')) {
        ++pos;
      }
      continue;
    }
    break;
  }
  return pos;
}

// Skips whitespace and comments; returns npos-like src.size() at end.
// Unterminated block comments extend to EOF (truncated exports are common).
std::size_t skip_blanks(std::string_view src, std::size_t pos) {
  while (pos < src.size()) {
    char c = src[pos];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else if (c == '/' && pos + 1 < src.size() && src[pos + 1] == '/') {
      while (pos < src.size() && src[pos] != '\n') ++pos;
    } else if (c == '/' && pos + 1 < src.size() && src[pos + 1] == '*') {
      pos += 2;
      while (pos + 1 < src.size() && !(src[pos] == '*' && src[pos + 1] == '/')) ++pos;
      pos = pos + 1 < src.size() ? pos + 2 : src.size();
    } else {
      break;
    }
  }
  return pos;
}

}  // namespace

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> tokens;
  std::size_t pos = 0;
  while ((pos = skip_blanks(src, pos)) < src.size()) {
    const std::size_t start = pos;
    char c = src[pos];
    if (is_ident_start(c)) {
      while (pos < src.size() && is_ident_char(src[pos])) ++pos;
      tokens.push_back({std::string(src.substr(start, pos - start)), TokenKind::Identifier, start});
    } else if (is_digit(c) || (c == '.' && pos + 1 < src.size() && is_digit(src[pos + 1]))) {
      pos = scan_number(src, pos);
      tokens.push_back({std::string(src.substr(start, pos - start)), TokenKind::Number, start});
    } else if (c == '"' || c == '\'') {
      pos = scan_quoted(src, pos, c);
      tokens.push_back({std::string(src.substr(start, pos - start)),
                        c == '"' ? TokenKind::StringLit : TokenKind::CharLit, start});
    } else {
      std::string_view rest = src.substr(pos);
      std::string_view matched;
      for (std::string_view op : kOperators) {
        if (rest.substr(0, op.size()) == op) {
          matched = op;
          break;
        }
      }
      if (!matched.empty()) {
        pos += matched.size();
      } else if (kPunct.find(c) != std::string_view::npos) {
        ++pos;
      } else {
        // Unknown byte (extended charset, stray control char): emit it as a
        // one-byte operator token rather than failing the whole function.
        ++pos;
      }
      tokens.push_back({std::string(src.substr(start, pos - start)), TokenKind::Operator, start});
    }
  }
  return tokens;
}

std::vector<std::string> tokenize_pseudocode(std::string_view source) {
  std::vector<std::string> out;
  for (auto& tok : lex(source)) out.push_back(std::move(tok.text));
  return out;
}

bool is_identifier(std::string_view text) {
  if (text.empty() || !is_ident_start(text[0])) return false;
  for (char c : text.substr(1))
    if (!is_ident_char(c)) return false;
  return true;
}

bool is_string_literal(std::string_view text) {
  return text.size() >= 2 && text.front() == '"' && text.back() == '"';
}

bool delimiters_balanced(std::string_view source) {
  std::vector<char> stack;
  std::vector<Token> tokens;
  try {
    tokens = lex(source);
  } catch (const ParseError&) {
    return false;  // unterminated literal counts as a formatting issue
  }
  for (const auto& tok : tokens) {
    if (tok.kind != TokenKind::Operator || tok.text.size() != 1) continue;
    switch (tok.text[0]) {
      case '(': stack.push_back(')'); break;
      case '{': stack.push_back('}'); break;
      case '[': stack.push_back(']'); break;
      case ')':
      case '}':
      case ']':
        if (stack.empty() || stack.back() != tok.text[0]) return false;
        stack.pop_back();
        break;
      default: break;
    }
  }
  return stack.empty();
}

}  // namespace funcsum::lexer
