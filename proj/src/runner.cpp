#include "mqm/runner.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "mqm/errors.hpp"
#include "mqm/spectra.hpp"

namespace fs = std::filesystem;

namespace mqm {

namespace {

bool kind_matches(const std::string& filter, const std::string& kind) {
  if (filter.empty()) return true;
  if (filter == "verify")
    return kind.rfind("verify-", 0) == 0 || kind == "equivalence";
  if (filter == "spectrum") return kind == "spectrum" || kind == "sweep";
  return filter == kind;
}

std::string join_params(const std::map<std::string, std::string>& params) {
  std::string out;
  for (const auto& [k, v] : params) {
    if (!out.empty()) out += ";";
    out += k + "=" + v;
  }
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += "\"";
  return out;
}

void append_record_rows(std::vector<std::string>& rows,
                        const std::vector<ResidualRecord>& records) {
  for (const ResidualRecord& r : records) {
    std::string row = csv_escape(r.check);
    row += "," + csv_escape(join_params(r.params));
    row += "," + csv_escape(r.resolution);
    row += "," + csv_escape(r.norm_kind);
    row += "," + fmt17(r.residual);
    row += "," + fmt17(r.scale);
    rows.push_back(std::move(row));
  }
}

void append_spectrum_rows(std::vector<std::string>& rows, const std::string& prefix,
                          const SpectrumResult& sr) {
  for (std::size_t i = 0; i < sr.eigenvalues.size(); ++i) {
    std::string row = prefix;
    row += std::to_string(i);
    row += "," + fmt17(sr.eigenvalues[i]);
    row += "," + fmt17(sr.residuals[i]);
    row += "," + std::to_string(sr.degeneracy_group[i]);
    rows.push_back(std::move(row));
  }
}

struct JobContext {
  const RunConfig& cfg;
  const JobSpec& job;
  const RunOptions& opt;

  double num(const char* key, double dflt) const {
    const auto it = job.num_params.find(key);
    return it == job.num_params.end() ? dflt : it->second;
  }
  bool has_num(const char* key) const { return job.num_params.count(key) > 0; }
  const std::string& str(const char* key) const {
    const auto it = job.str_params.find(key);
    if (it == job.str_params.end())
      throw JobError(job.name, std::string("missing parameter '") + key + "'");
    return it->second;
  }
  const ScalarField& scalar(const char* key) const {
    return cfg.scalars.at(str(key));
  }
  const VectorField& vector(const char* key) const {
    return cfg.vectors.at(str(key));
  }
  const Pi1Representation& rep(const char* key) const {
    return cfg.reps.at(str(key));
  }
  std::vector<int> grids() const {
    const auto it = job.list_params.find("grids");
    if (it == job.list_params.end()) return cfg.grids;
    std::vector<int> out;
    for (const double v : it->second) out.push_back(static_cast<int>(v));
    return out;
  }
  int order() const { return static_cast<int>(num("order", cfg.order)); }
  int steps() const { return static_cast<int>(num("steps", cfg.steps)); }
  std::uint64_t seed() const { return opt.seed.value_or(cfg.seed); }
  // `n` may be a single size (square in 2-d) or a per-axis pair.
  std::array<int, 2> grid_n() const {
    const auto lit = job.list_params.find("n");
    if (lit != job.list_params.end()) {
      const auto& l = lit->second;
      if (l.size() == 1) {
        const int n0 = static_cast<int>(l[0]);
        return {n0, n0};
      }
      if (l.size() != 2)
        throw JobError(job.name, "n must be one size or a per-axis pair");
      return {static_cast<int>(l[0]), static_cast<int>(l[1])};
    }
    const int n0 = static_cast<int>(num("n", cfg.grids.back()));
    return {n0, n0};
  }
  // Per-job tolerances may only tighten the built-in default in strict mode.
  double tol(double dflt) const {
    const double t = num("tol", dflt);
    return opt.strict_tolerance ? std::min(t, dflt) : t;
  }
};

void from_report(JobResult& out, const CheckReport& rep) {
  out.pass = rep.pass;
  out.records = rep.records;
  out.message = rep.detail;
}

JobResult execute(const JobContext& c) {
  const RunConfig& cfg = c.cfg;
  const JobSpec& job = c.job;
  const Manifold& m = cfg.manifold;
  JobResult out;
  out.name = job.name;
  out.kind = job.kind;

  std::vector<std::string> rows;
  std::string header = "check,params,resolution,norm_kind,residual,scale";

  if (job.kind == "verify-lr") {
    LrCheckOptions o;
    o.resolutions = c.grids();
    o.order = c.order();
    o.tol = c.tol(o.tol);
    from_report(out, check_lr_relation(m, c.scalar("f"), c.vector("v"), o));
    append_record_rows(rows, out.records);
  } else if (job.kind == "verify-resolvent") {
    ResolventCheckOptions o;
    o.resolution = static_cast<int>(c.num("n", o.resolution));
    o.order = c.order();
    from_report(out, check_resolvent_identities(m, c.vector("v"), o));
    append_record_rows(rows, out.records);
  } else if (job.kind == "verify-covariance") {
    CovarianceCheckOptions o;
    o.resolutions = c.grids();
    o.order = c.order();
    o.steps = c.steps();
    o.seed = c.seed();
    from_report(out, check_covariance(m, c.vector("v"), c.num("lambda", 0.0),
                                      c.scalar("f"), c.vector("w"), o));
    append_record_rows(rows, out.records);
  } else if (job.kind == "verify-lie") {
    LieCheckOptions o;
    o.resolutions = c.grids();
    o.order = c.order();
    o.seed = c.seed();
    from_report(out, check_lie_relations(m, c.vector("v"), c.vector("w"), o));
    append_record_rows(rows, out.records);
  } else if (job.kind == "verify-cocycle") {
    const RepSpace s = build_space(m, c.rep("rep"), c.grid_n());
    CocycleCheckOptions o;
    o.samples = static_cast<int>(c.num("samples", o.samples));
    o.steps = c.steps();
    o.tol = c.tol(o.tol);
    o.seed = c.seed();
    from_report(out, check_cocycle(s, c.vector("g"), c.num("lambda_g", 0.0),
                                   c.vector("h"), c.num("lambda_h", 0.0), o));
    append_record_rows(rows, out.records);
  } else if (job.kind == "verify-local") {
    const RepSpace s = build_space(m, c.rep("rep"), c.grid_n());
    const auto& bl = job.list_params.at("box");
    if (static_cast<int>(bl.size()) != 2 * m.dim)
      throw JobError(job.name, "box needs lo/hi per axis");
    Box box;
    box.dim = m.dim;
    for (int a = 0; a < m.dim; ++a) {
      box.lo[a] = bl[static_cast<std::size_t>(2 * a)];
      box.hi[a] = bl[static_cast<std::size_t>(2 * a + 1)];
    }
    LocalCheckOptions o;
    o.tol = c.tol(o.tol);
    o.seed = c.seed();
    from_report(out, check_locally_schroedinger(s, box, o));
    append_record_rows(rows, out.records);
  } else if (job.kind == "spectrum") {
    const RepSpace s = build_space(m, c.rep("rep"), c.grid_n());
    const ScalarField* V = nullptr;
    if (job.str_params.count("potential")) V = &c.scalar("potential");
    const SpectrumResult sr =
        spectrum(s, V, c.order(), static_cast<int>(c.num("k", 1.0)));
    header = "index,eigenvalue,residual,group";
    append_spectrum_rows(rows, "", sr);
    out.eigenvalues = sr.eigenvalues;
    out.pass = true;
    std::ostringstream msg;
    msg << sr.solver << " solver, max residual " << fmt17(sr.max_residual);
    out.message = msg.str();
  } else if (job.kind == "sweep") {
    std::vector<Pi1Representation> reps;
    for (const std::string& rn : job.strlist_params.at("reps"))
      reps.push_back(cfg.reps.at(rn));
    const std::vector<SpectrumResult> srs = theta_sweep(
        m, reps, c.grid_n(), static_cast<int>(c.num("k", 1.0)), c.order());
    header = "rep,index,eigenvalue,residual,group";
    double worst = 0.0;
    for (const SpectrumResult& sr : srs) {
      append_spectrum_rows(rows, csv_escape(sr.rep_summary) + ",", sr);
      out.eigenvalues.insert(out.eigenvalues.end(), sr.eigenvalues.begin(),
                             sr.eigenvalues.end());
      worst = std::max(worst, sr.max_residual);
    }
    out.pass = true;
    out.message = std::to_string(srs.size()) + " representations, max residual " +
                  fmt17(worst);
  } else if (job.kind == "equivalence") {
    const std::array<int, 2> n = c.grid_n();
    const RepSpace s1 = build_space(m, c.rep("rep1"), n);
    const RepSpace s2 = build_space(m, c.rep("rep2"), n);
    std::vector<HomotopyClass> classes;
    if (const auto it = job.strlist_params.find("classes");
        it != job.strlist_params.end())
      for (const std::string& cw : it->second)
        classes.push_back(
            reduce(m.presentation, word_from_string(m.presentation, cw)));
    const EquivalenceResult er = check_equivalence(s1, s2, classes);
    out.verdict = er.verdict;
    if (const auto it = job.str_params.find("expect");
        it != job.str_params.end())
      out.pass = er.verdict == it->second;
    else
      out.pass = er.verdict != "inconclusive";
    std::ostringstream msg;
    msg << er.verdict << " (max trace diff " << fmt17(er.max_trace_diff)
        << ", max eigenvalue diff " << fmt17(er.max_eig_diff) << ")";
    out.message = msg.str();
    header = "class,trace1_re,trace1_im,trace2_re,trace2_im";
    for (std::size_t i = 0; i < er.classes.size(); ++i) {
      std::string row = csv_escape(er.classes[i].str());
      row += "," + fmt17(er.traces1[i].real());
      row += "," + fmt17(er.traces1[i].imag());
      row += "," + fmt17(er.traces2[i].real());
      row += "," + fmt17(er.traces2[i].imag());
      rows.push_back(std::move(row));
    }
    ResidualRecord tr;
    tr.check = "equivalence-trace";
    tr.resolution = std::to_string(n[0]) + "x" + std::to_string(n[1]);
    tr.residual = er.max_trace_diff;
    tr.norm_kind = "max-abs";
    out.records.push_back(tr);
    tr.check = "equivalence-spectrum";
    tr.residual = er.max_eig_diff;
    out.records.push_back(tr);
  } else {
    throw JobError(job.name, "unknown job kind '" + job.kind + "'");
  }

  const fs::path csv = fs::path(c.opt.out_dir) / (job.name + ".csv");
  write_csv(csv.string(), header, rows, c.opt.timestamp);
  out.csv_file = job.name + ".csv";
  return out;
}

}  // namespace

RunResult run(const RunConfig& config, const RunOptions& opt) {
  fs::create_directories(opt.out_dir);

  std::vector<const JobSpec*> picked;
  for (const JobSpec& j : config.jobs)
    if (kind_matches(opt.kind_filter, j.kind)) picked.push_back(&j);

  RunResult result;
  result.jobs.resize(picked.size());

  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= picked.size()) break;
      const JobSpec& job = *picked[i];
      try {
        result.jobs[i] = execute(JobContext{config, job, opt});
      } catch (const std::exception& e) {
        JobResult bad;
        bad.name = job.name;
        bad.kind = job.kind;
        bad.errored = true;
        bad.message = e.what();
        result.jobs[i] = std::move(bad);
      }
    }
  };
  const int workers = std::max(1, opt.workers);
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  bool all_pass = true;
  for (const JobResult& j : result.jobs)
    if (j.errored || !j.pass) all_pass = false;
  result.exit_code = all_pass ? 0 : 1;

  nlohmann::json doc;
  doc["version"] = "0.1.0";
  doc["config_hash"] = fnv1a_hex(config.source_text);
  doc["manifold"] = config.manifold.spec.str();
  if (opt.timestamp) {
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    doc["generated"] = buf;
  }
  doc["jobs"] = nlohmann::json::array();
  for (const JobResult& j : result.jobs) {
    nlohmann::json jj;
    jj["name"] = j.name;
    jj["kind"] = j.kind;
    jj["pass"] = j.pass;
    jj["errored"] = j.errored;
    jj["message"] = j.message;
    jj["csv"] = j.csv_file;
    if (!j.verdict.empty()) jj["verdict"] = j.verdict;
    if (!j.eigenvalues.empty()) jj["eigenvalues"] = j.eigenvalues;
    jj["records"] = nlohmann::json::array();
    for (const ResidualRecord& r : j.records)
      jj["records"].push_back(nlohmann::json::parse(to_json(r)));
    doc["jobs"].push_back(std::move(jj));
  }

  const fs::path rp = fs::path(opt.out_dir) / "report.json";
  const fs::path tmp = rp.string() + ".tmp";
  {
    std::ofstream outf(tmp, std::ios::binary | std::ios::trunc);
    if (!outf) throw Error("cannot open '" + tmp.string() + "' for writing");
    outf << doc.dump(2) << "\n";
    if (!outf) throw Error("failed writing '" + tmp.string() + "'");
  }
  fs::rename(tmp, rp);
  result.report_path = rp.string();
  return result;
}

}  // namespace mqm
