#include "mqm/errors.hpp"

namespace mqm {

ParseError::ParseError(std::size_t off, std::string exp)
    : Error("parse error at byte " + std::to_string(off) + ": expected " + exp),
      offset(off),
      expected(std::move(exp)) {}

ConfigError::ConfigError(std::string path_, int line_, const std::string& what_)
    : Error("config error at '" + path_ + "' (line " + std::to_string(line_) + "): " + what_),
      path(std::move(path_)),
      line(line_) {}

JobError::JobError(std::string job_, const std::string& what_)
    : Error("job '" + job_ + "' failed: " + what_), job(std::move(job_)) {}

}  // namespace mqm
