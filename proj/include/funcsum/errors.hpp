#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace funcsum {

// Input document could not be parsed. Carries a 1-based line and column
// where known; 0 means "not applicable" (e.g. byte-offset-only sources).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, std::size_t line = 0, std::size_t column = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) +
                                          (column > 0 ? ":" + std::to_string(column) : "") +
                                          ": " + message
                                    : message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// A well-formed document violated a semantic invariant (dangling edge
// endpoint, unknown entry vertex, precondition breach, ...).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& message) : std::runtime_error(message) {}
};

// Run configuration is unusable (missing file, unknown backend kind, ...).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& message) : std::runtime_error(message) {}
};

// HTTP backend could not reach the endpoint (after retries).
class TransportError : public std::runtime_error {
 public:
  explicit TransportError(const std::string& message) : std::runtime_error(message) {}
};

// Endpoint answered but not in the expected shape.
class ProtocolError : public std::runtime_error {
 public:
  explicit ProtocolError(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace funcsum
