#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace funcsum::lexer {

enum class TokenKind {
  Identifier,
  Number,
  StringLit,  // quotes included in text
  CharLit,    // quotes included in text
  Operator,   // operators and punctuation
};

struct Token {
  std::string text;
  TokenKind kind;
  std::size_t offset;  // byte offset into the source
};

// Lexes C-like decompiler pseudocode. Comments and whitespace are dropped.
// Throws ParseError (with the byte offset of the opening quote) on an
// unterminated string or character literal.
std::vector<Token> lex(std::string_view source);

// Token texts only; what downstream labeling and dataset export consume.
std::vector<std::string> tokenize_pseudocode(std::string_view source);

bool is_identifier(std::string_view text);
bool is_string_literal(std::string_view text);

// Delimiter balance scan for {} () [], skipping comments and literals.
// Returns false on mismatch, unclosed delimiters, or an unterminated literal.
bool delimiters_balanced(std::string_view source);

}  // namespace funcsum::lexer
