#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mqm {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidParam : Error { using Error::Error; };
struct InvalidWord : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct SupportViolation : Error { using Error::Error; };
struct IntegrationDiverged : Error { using Error::Error; };
struct PathTooCoarse : Error { using Error::Error; };
struct PresentationMismatch : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct SizeExceeded : Error { using Error::Error; };
struct SolveFailed : Error { using Error::Error; };
struct SolverFailure : Error { using Error::Error; };
struct BoxTouchesEdge : Error { using Error::Error; };

// Expression parser failure: byte offset into the source plus what would
// have been accepted there.
struct ParseError : Error {
  std::size_t offset;
  std::string expected;
  ParseError(std::size_t off, std::string exp);
};

// Configuration failure: dotted path to the offending key and its line.
struct ConfigError : Error {
  std::string path;
  int line;
  ConfigError(std::string path_, int line_, const std::string& what_);
};

// Per-job failure recorded by the runner; the run continues.
struct JobError : Error {
  std::string job;
  JobError(std::string job_, const std::string& what_);
};

}  // namespace mqm
