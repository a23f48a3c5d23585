#pragma once

#include <map>
#include <string>
#include <vector>

#include "mqm/types.hpp"

namespace mqm {

// One measured residual. `residual` is relative to `scale` where a natural
// scale exists (params carry "relative" = "true"), absolute otherwise.
struct ResidualRecord {
  std::string check;
  std::map<std::string, std::string> params;
  std::string resolution;
  double residual = 0.0;
  double scale = 0.0;
  std::string norm_kind;  // "spectral" | "frobenius" | "probe-max-l2" | "max-abs"
};

std::string to_json(const ResidualRecord& r);

struct CheckReport {
  std::string check;
  std::vector<ResidualRecord> records;
  std::vector<double> ratios;  // residual[i] / residual[i+1] across resolutions
  bool pass = false;
  std::string detail;
};

// CSV helpers: header plus preformatted rows, written atomically
// (temp file + rename), LF line endings, floats at 17 significant digits.
void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows, bool timestamp);

std::string fnv1a_hex(const std::string& data);

}  // namespace mqm
