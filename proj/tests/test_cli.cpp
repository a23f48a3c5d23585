#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "mqm/report.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

struct CliResult {
  int code = -1;
  std::string out, err;
};

fs::path work_dir() {
  const fs::path d = fs::temp_directory_path() / "mqm-cli-test";
  fs::create_directories(d);
  return d;
}

CliResult run_cli(const std::string& args) {
  const char* exe = MQM_CLI_PATH;  // injected by the build
  const fs::path d = work_dir();
  const fs::path out = d / "stdout.txt", err = d / "stderr.txt";
  const std::string cmd = std::string("\"") + exe + "\" " + args + " > \"" +
                          out.string() + "\" 2> \"" + err.string() + "\"";
  const int raw = std::system(cmd.c_str());
  CliResult r;
  if (raw != -1 && WIFEXITED(raw)) r.code = WEXITSTATUS(raw);
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

const char* kBaseConfig = R"cfg(# build a small verification run
manifold {
  kind = circle
  length = 6.283185307179586
}
grids = [32, 64]
order = 2

vector one { x = "1" }
vector two { x = "2" }
rep half { angles = [3.141592653589793] }

job flat-bracket {
  kind = verify-lie
  v = one
  w = two
}
job ground {
  kind = spectrum
  rep = half
  n = 64
  k = 3
}
)cfg";

}  // namespace

TEST_CASE("a passing run exits 0 and writes csv plus report") {
  const fs::path d = work_dir() / "pass";
  fs::remove_all(d);
  fs::create_directories(d);
  const fs::path cfg = d / "run.conf";
  spit(cfg, kBaseConfig);

  const CliResult r = run_cli("report \"" + cfg.string() + "\" --out \"" +
                              (d / "out").string() + "\"");
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS") != std::string::npos);
  CHECK(r.out.find("flat-bracket") != std::string::npos);

  const std::string lie_csv = slurp(d / "out" / "flat-bracket.csv");
  CHECK(lie_csv.find("check,params,resolution,norm_kind,residual,scale") !=
        std::string::npos);
  CHECK(lie_csv.find('\r') == std::string::npos);

  const std::string spec_csv = slurp(d / "out" / "ground.csv");
  CHECK(spec_csv.find("index,eigenvalue,residual,group") != std::string::npos);
  // three eigenvalue rows; the lowest twisted level sits at 1/8
  std::istringstream lines(spec_csv);
  std::string line;
  int rows = 0;
  double first_ev = -1.0;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("index", 0) == 0) continue;
    ++rows;
    if (rows == 1) {
      const auto c1 = line.find(','), c2 = line.find(',', line.find(',') + 1);
      first_ev = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    }
  }
  CHECK(rows == 3);
  CHECK(first_ev == doctest::Approx(0.125).epsilon(1e-3));

  const nlohmann::json rep = nlohmann::json::parse(slurp(d / "out" / "report.json"));
  CHECK(rep["config_hash"] == mqm::fnv1a_hex(kBaseConfig));
  CHECK(rep["jobs"].size() == 2);
  CHECK(rep["jobs"][0]["pass"] == true);
  CHECK(rep["jobs"][1]["eigenvalues"].size() == 3);
}

TEST_CASE("rerunning without timestamps is byte-identical") {
  const fs::path d = work_dir() / "determinism";
  fs::remove_all(d);
  fs::create_directories(d);
  const fs::path cfg = d / "run.conf";
  spit(cfg, kBaseConfig);

  for (const char* sub : {"a", "b"}) {
    const CliResult r =
        run_cli("report \"" + cfg.string() + "\" --no-timestamp --out \"" +
                (d / sub).string() + "\"");
    REQUIRE(r.code == 0);
  }
  for (const char* name : {"flat-bracket.csv", "ground.csv", "report.json"}) {
    const std::string a = slurp(d / "a" / name);
    const std::string b = slurp(d / "b" / name);
    CHECK(a == b);
    CHECK_FALSE(a.empty());
  }
}

TEST_CASE("subcommands filter the job list") {
  const fs::path d = work_dir() / "filter";
  fs::remove_all(d);
  fs::create_directories(d);
  const fs::path cfg = d / "run.conf";
  spit(cfg, kBaseConfig);

  const CliResult r = run_cli("spectrum \"" + cfg.string() + "\" --out \"" +
                              (d / "out").string() + "\"");
  CHECK(r.code == 0);
  const nlohmann::json rep = nlohmann::json::parse(slurp(d / "out" / "report.json"));
  REQUIRE(rep["jobs"].size() == 1);
  CHECK(rep["jobs"][0]["kind"] == "spectrum");
  CHECK_FALSE(fs::exists(d / "out" / "flat-bracket.csv"));
}

TEST_CASE("a failing tolerance exits 1") {
  const fs::path d = work_dir() / "fail";
  fs::remove_all(d);
  fs::create_directories(d);
  const std::string config = R"cfg(manifold {
  kind = circle
  length = 6.283185307179586
}
scalar window {
  expr = "bump((x - 3)/1.5)"
  support = [1.5, 4.5]
}
vector drift { x = "0.8 + 0.3*sin(x)" }
job impossible {
  kind = verify-lr
  f = window
  v = drift
  grids = [32, 64]
  tol = 1e-15
}
)cfg";
  const fs::path cfg = d / "run.conf";
  spit(cfg, config);
  const CliResult r = run_cli("verify \"" + cfg.string() + "\" --out \"" +
                              (d / "out").string() + "\"");
  CHECK(r.code == 1);
  CHECK(r.out.find("FAIL") != std::string::npos);
  const nlohmann::json rep = nlohmann::json::parse(slurp(d / "out" / "report.json"));
  CHECK(rep["jobs"][0]["pass"] == false);
  CHECK(rep["jobs"][0]["errored"] == false);
}

TEST_CASE("strict tolerance clamps loose per-job settings") {
  const fs::path d = work_dir() / "strict";
  fs::remove_all(d);
  fs::create_directories(d);
  const std::string config = R"cfg(manifold {
  kind = circle
  length = 6.283185307179586
}
scalar window {
  # amplitude puts the fine-grid residual between the built-in tolerance
  # (1e-3) and the loose per-job one, so only the strict run fails
  expr = "5 * bump((x - 3)/1.5)"
  support = [1.5, 4.5]
}
vector drift { x = "0.8 + 0.3*sin(x)" }
job coarse {
  kind = verify-lr
  f = window
  v = drift
  grids = [32, 64]
  tol = 0.05
}
)cfg";
  const fs::path cfg = d / "run.conf";
  spit(cfg, config);
  const CliResult loose = run_cli("verify \"" + cfg.string() + "\" --out \"" +
                                  (d / "loose").string() + "\"");
  CHECK(loose.code == 0);
  const CliResult strict =
      run_cli("verify \"" + cfg.string() + "\" --strict-tolerance --out \"" +
              (d / "strict").string() + "\"");
  CHECK(strict.code == 1);
}

TEST_CASE("config errors exit 2 with the key path and line") {
  const fs::path d = work_dir() / "badkey";
  fs::remove_all(d);
  fs::create_directories(d);
  const fs::path cfg = d / "run.conf";
  spit(cfg, "manifold {\n  kind = circle\n  length = 6.28\n  bogus = 3\n}\n");
  const CliResult r = run_cli("report \"" + cfg.string() + "\"");
  CHECK(r.code == 2);
  CHECK(r.err.find("manifold.bogus") != std::string::npos);
  CHECK(r.err.find("line 4") != std::string::npos);
}

TEST_CASE("invalid representations are rejected at parse time") {
  const fs::path d = work_dir() / "badrep";
  fs::remove_all(d);
  fs::create_directories(d);
  const fs::path cfg = d / "run.conf";
  spit(cfg,
       "manifold {\n  kind = circle\n  length = 6.283185307179586\n}\n"
       "rep stretch {\n  dim = 1\n  a = [2, 0]\n}\n");
  const CliResult r = run_cli("report \"" + cfg.string() + "\"");
  CHECK(r.code == 2);
  CHECK(r.err.find("unitary") != std::string::npos);
}

TEST_CASE("unknown field references are rejected at parse time") {
  const fs::path d = work_dir() / "badref";
  fs::remove_all(d);
  fs::create_directories(d);
  const fs::path cfg = d / "run.conf";
  spit(cfg,
       "manifold {\n  kind = circle\n  length = 6.283185307179586\n}\n"
       "vector one { x = \"1\" }\n"
       "job j { kind = verify-lie\n  v = one\n  w = nothere\n}\n");
  const CliResult r = run_cli("report \"" + cfg.string() + "\"");
  CHECK(r.code == 2);
  CHECK(r.err.find("nothere") != std::string::npos);
}

TEST_CASE("a missing config file exits 2") {
  const CliResult r = run_cli("report /definitely/not/here.conf");
  CHECK(r.code == 2);
}

TEST_CASE("duplicate job names are rejected") {
  const fs::path d = work_dir() / "dup";
  fs::remove_all(d);
  fs::create_directories(d);
  const fs::path cfg = d / "run.conf";
  spit(cfg,
       "manifold {\n  kind = circle\n  length = 6.283185307179586\n}\n"
       "vector one { x = \"1\" }\n"
       "job j { kind = verify-lie\n  v = one\n  w = one\n}\n"
       "job j { kind = verify-lie\n  v = one\n  w = one\n}\n");
  const CliResult r = run_cli("report \"" + cfg.string() + "\"");
  CHECK(r.code == 2);
  CHECK(r.err.find("duplicate") != std::string::npos);
}
