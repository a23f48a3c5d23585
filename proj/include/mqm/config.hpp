#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mqm/fields.hpp"
#include "mqm/homotopy.hpp"

namespace mqm {

// Job description as written in the config file. Field/rep parameters are
// names resolved against the declared entities.
struct JobSpec {
  std::string name;
  std::string kind;
  int line = 0;
  std::map<std::string, std::string> str_params;
  std::map<std::string, double> num_params;
  std::map<std::string, std::vector<double>> list_params;
  std::map<std::string, std::vector<std::string>> strlist_params;
};

struct RunConfig {
  std::string source_text;
  Manifold manifold;
  std::vector<int> grids{256, 512};
  int order = 2;
  int steps = 256;
  std::uint64_t seed = 12345;
  std::map<std::string, ScalarField> scalars;
  std::map<std::string, VectorField> vectors;
  std::map<std::string, Pi1Representation> reps;
  std::vector<JobSpec> jobs;
};

// Strict block-structured text: `key = value` lines, `section name { ... }`
// blocks, values are numbers, identifiers, quoted strings, or bracketed
// lists. Unknown keys and malformed entities fail with the dotted key path
// and the line number; all expressions and representations are validated
// before any job runs.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace mqm
