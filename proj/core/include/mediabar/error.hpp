#pragma once

#include <stdexcept>
#include <string>

namespace mediabar {

enum class ErrorKind {
  Parse,        // malformed input document
  Schema,       // well-formed but violates a contract
  Io,           // unreadable / short / truncated file
  Format,       // unsupported media encoding
  Precondition, // caller violated an operation precondition
  Degenerate,   // numerically degenerate result (zero vector, empty filter)
  Usage,        // bad command line / configuration
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mediabar
