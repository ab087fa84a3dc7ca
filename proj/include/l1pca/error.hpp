#pragma once

#include <stdexcept>
#include <string>

namespace l1pca {

enum class ErrorKind {
  kInvalidInput,
  kDimensionMismatch,
  kPrecondition,
  kDiverged,
  kDegenerateUpdate,
  kRefused,
  kParse,
  kIo,
  kUndefinedMetric,
  kConfig,
};

const char* to_string(ErrorKind kind);

// Base error for everything the library throws on bad input or numerical
// failure. The kind lets the CLI map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorKind::kParse,
              "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace l1pca
