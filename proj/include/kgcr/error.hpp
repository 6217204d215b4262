#pragma once

#include <stdexcept>
#include <string>

namespace kgcr {

// Domain error with a stable machine-readable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

// Parse error carrying a source position.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column)
      : Error("PARSE_ERROR",
              message + " at line " + std::to_string(line) + ", column " +
                  std::to_string(column)),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace kgcr
