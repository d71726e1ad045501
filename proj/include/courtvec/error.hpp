#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace courtvec {

enum class ErrorKind {
  parse,
  lineup,
  registry,
  outcome,
  unmapped_event,
  duplicate,
  value,
  argument,
  divergence,
  checkpoint,
  support,
  degenerate_dimension,
  sample_size,
  degenerate_model,
  unknown_player,
  resolution,
  io,
};

const char* to_string(ErrorKind kind);

// Single exception type for every failure the library reports. Callers that
// need to branch (HTTP status, exit code) switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace courtvec
