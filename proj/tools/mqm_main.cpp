#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mqm/runner.hpp"

namespace {

int run_mode(const std::string& config_path, const mqm::RunOptions& opt) {
  mqm::RunConfig cfg;
  try {
    cfg = mqm::load_config(config_path);
  } catch (const mqm::ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  mqm::RunResult res;
  try {
    res = mqm::run(cfg, opt);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  for (const mqm::JobResult& j : res.jobs) {
    const char* status = j.errored ? "ERROR" : (j.pass ? "PASS" : "FAIL");
    std::printf("job %s [%s]: %s%s%s\n", j.name.c_str(), j.kind.c_str(), status,
                j.message.empty() ? "" : " - ", j.message.c_str());
  }
  std::printf("report: %s\n", res.report_path.c_str());
  return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verification suites and spectra for twisted sections over "
               "identified domains"};
  app.require_subcommand(1);

  std::string config_path;
  mqm::RunOptions opt;
  std::uint64_t seed_value = 0;
  bool no_timestamp = false;
  std::vector<CLI::Option*> seed_opts;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "configuration file")->required();
    sub->add_option("-o,--out", opt.out_dir,
                    "output directory for CSV files and report.json");
    sub->add_option("-j,--jobs", opt.workers, "number of worker threads")
        ->check(CLI::PositiveNumber);
    seed_opts.push_back(
        sub->add_option("--seed", seed_value, "override the config seed"));
    sub->add_flag("--strict-tolerance", opt.strict_tolerance,
                  "per-job tolerances may only tighten the defaults");
    sub->add_flag("--no-timestamp", no_timestamp,
                  "omit generation timestamps for reproducible output");
  };

  CLI::App* verify =
      app.add_subcommand("verify", "run the verify-* and equivalence jobs");
  CLI::App* spectrum =
      app.add_subcommand("spectrum", "run the spectrum and sweep jobs");
  CLI::App* report = app.add_subcommand("report", "run every job");
  add_common(verify);
  add_common(spectrum);
  add_common(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (const CLI::Option* o : seed_opts)
    if (o->count() > 0) opt.seed = seed_value;
  opt.timestamp = !no_timestamp;
  if (verify->parsed()) opt.kind_filter = "verify";
  else if (spectrum->parsed()) opt.kind_filter = "spectrum";
  else if (report->parsed()) opt.kind_filter = "";

  return run_mode(config_path, opt);
}
