#include "mqm/report.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "mqm/errors.hpp"

namespace mqm {

std::string to_json(const ResidualRecord& r) {
  nlohmann::json j;
  j["check"] = r.check;
  j["params"] = r.params;
  j["resolution"] = r.resolution;
  j["residual"] = r.residual;
  j["scale"] = r.scale;
  j["norm_kind"] = r.norm_kind;
  return j.dump();
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows, bool timestamp) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    if (timestamp) {
      const auto now = std::chrono::system_clock::now();
      const std::time_t t = std::chrono::system_clock::to_time_t(now);
      char buf[32];
      std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
      out << "# generated " << buf << "\n";
    }
    out << header << "\n";
    for (const std::string& row : rows) out << row << "\n";
    if (!out) throw Error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace mqm
