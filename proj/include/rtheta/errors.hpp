#pragma once

#include <stdexcept>
#include <string>

namespace rtheta {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// complexity_model
class DomainError : public Error { using Error::Error; };
class OverflowError : public Error { using Error::Error; };

// fitter / embedding
class InsufficientData : public Error { using Error::Error; };
class EmptyInput : public Error { using Error::Error; };

// harness
class ProfilerUnavailable : public Error { using Error::Error; };
class SpawnError : public Error { using Error::Error; };
class CompilerUnavailable : public Error { using Error::Error; };

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string line)
      : Error(what + ": '" + line + "'"), line_(std::move(line)) {}
  /// The offending input line, verbatim.
  const std::string& line() const noexcept { return line_; }

 private:
  std::string line_;
};

// dataset
class MalformedFile : public Error { using Error::Error; };
class SchemaMismatch : public Error { using Error::Error; };
class IOError : public Error { using Error::Error; };
class DegenerateStratum : public Error { using Error::Error; };

}  // namespace rtheta
