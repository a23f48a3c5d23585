#pragma once

#include "mqm/config.hpp"
#include "mqm/report.hpp"

namespace mqm {

struct RunOptions {
  std::string out_dir = ".";
  int workers = 1;
  std::optional<std::uint64_t> seed;  // overrides the config seed
  bool strict_tolerance = false;      // per-job tolerances may only tighten
  bool timestamp = true;
  // Restrict to a job-kind family: "" = all, "verify", "spectrum".
  std::string kind_filter;
};

struct JobResult {
  std::string name;
  std::string kind;
  bool pass = false;
  bool errored = false;
  std::string message;
  std::vector<ResidualRecord> records;
  std::vector<double> eigenvalues;
  std::string verdict;
  std::string csv_file;
};

struct RunResult {
  std::vector<JobResult> jobs;
  int exit_code = 0;
  std::string report_path;
};

RunResult run(const RunConfig& config, const RunOptions& opt);

}  // namespace mqm
