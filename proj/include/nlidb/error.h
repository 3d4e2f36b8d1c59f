#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nlidb {

// Base for every error raised by the engine. `stage` names the pipeline step
// that failed so callers can surface it without string matching.
class Error : public std::runtime_error {
 public:
  Error(std::string stage, const std::string &message)
      : std::runtime_error(message), stage_(std::move(stage)) {}

  const std::string &stage() const { return stage_; }

 private:
  std::string stage_;
};

// Malformed input text. line/column are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(std::string stage, const std::string &message, size_t line,
             size_t column = 0)
      : Error(std::move(stage), Format(message, line, column)),
        line_(line),
        column_(column) {}

  size_t line() const { return line_; }
  size_t column() const { return column_; }

 private:
  static std::string Format(const std::string &message, size_t line,
                            size_t column) {
    if (line == 0) return message;
    std::string out = "line " + std::to_string(line);
    if (column != 0) out += ", column " + std::to_string(column);
    return out + ": " + message;
  }

  size_t line_;
  size_t column_;
};

}  // namespace nlidb
