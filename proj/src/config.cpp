#include "mqm/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace mqm {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string unquote(const std::string& s, const std::string& path, int line) {
  if (s.size() >= 2 && s.front() == '"') {
    if (s.back() != '"')
      throw ConfigError(path, line, "unterminated quoted value");
    return s.substr(1, s.size() - 2);
  }
  if (!s.empty() && s.back() == '"')
    throw ConfigError(path, line, "unterminated quoted value");
  return s;
}

bool parse_num(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

struct RawEntry {
  int line = 0;
  bool is_list = false;
  std::string value;
  std::vector<std::string> items;
};

struct RawSection {
  std::string type, name;
  int line = 0;
  std::map<std::string, RawEntry> entries;
};

struct RawConfig {
  std::map<std::string, RawEntry> top;
  std::vector<RawSection> sections;
};

void insert_entry(std::map<std::string, RawEntry>& into, const std::string& path,
                  const std::string& key, RawEntry entry) {
  const int line = entry.line;
  if (!into.emplace(key, std::move(entry)).second)
    throw ConfigError(path + "." + key, line, "duplicate key");
}

RawConfig lex(const std::string& text) {
  RawConfig rc;
  RawSection* cur = nullptr;
  std::istringstream is(text);
  std::string raw;
  int lineno = 0;
  const auto path_of = [&cur]() -> std::string {
    if (!cur) return "(top)";
    return cur->name.empty() ? cur->type : cur->type + "." + cur->name;
  };
  const auto split_segments = [](const std::string& line) {
    // blocks may open, hold one entry, and close on a single line; braces
    // inside quoted values stay literal
    std::vector<std::string> segs;
    std::string cur;
    bool q = false;
    for (const char ch : line) {
      if (ch == '"') q = !q;
      if (!q && ch == '{') {
        cur += ch;
        segs.push_back(trim(cur));
        cur.clear();
        continue;
      }
      if (!q && ch == '}') {
        if (!trim(cur).empty()) segs.push_back(trim(cur));
        segs.push_back("}");
        cur.clear();
        continue;
      }
      cur += ch;
    }
    if (!trim(cur).empty()) segs.push_back(trim(cur));
    return segs;
  };
  const auto handle = [&](const std::string& line, const int lineno) {
    if (line == "}") {
      if (!cur) throw ConfigError("(top)", lineno, "unmatched '}'");
      cur = nullptr;
      return;
    }
    if (line.back() == '{') {
      if (cur)
        throw ConfigError(path_of(), lineno, "blocks do not nest; missing '}'?");
      std::istringstream hs(trim(line.substr(0, line.size() - 1)));
      std::string type, name, extra;
      hs >> type >> name >> extra;
      if (type.empty())
        throw ConfigError("(top)", lineno, "block header needs a section type");
      if (!extra.empty())
        throw ConfigError(type, lineno, "unexpected token '" + extra +
                                            "' in block header");
      rc.sections.push_back(RawSection{type, name, lineno, {}});
      cur = &rc.sections.back();
      return;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path_of(), lineno,
                        "expected 'key = value', a block header, or '}'");
    const std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty() || key.find(' ') != std::string::npos)
      throw ConfigError(path_of(), lineno, "malformed key '" + key + "'");
    if (val.empty())
      throw ConfigError(path_of() + "." + key, lineno, "missing value");
    RawEntry e;
    e.line = lineno;
    if (val.front() == '[') {
      if (val.back() != ']')
        throw ConfigError(path_of() + "." + key, lineno,
                          "list must close with ']' on the same line");
      e.is_list = true;
      const std::string inner = trim(val.substr(1, val.size() - 2));
      if (!inner.empty()) {
        std::size_t start = 0;
        bool item_q = false;
        for (std::size_t i = 0; i <= inner.size(); ++i) {
          if (i < inner.size() && inner[i] == '"') item_q = !item_q;
          if (i == inner.size() || (inner[i] == ',' && !item_q)) {
            e.items.push_back(unquote(trim(inner.substr(start, i - start)),
                                      path_of() + "." + key, lineno));
            start = i + 1;
          }
        }
      }
    } else {
      e.value = unquote(val, path_of() + "." + key, lineno);
    }
    insert_entry(cur ? cur->entries : rc.top, path_of(), key, std::move(e));
  };
  while (std::getline(is, raw)) {
    ++lineno;
    std::string line;
    bool inq = false;
    for (const char c : raw) {
      if (c == '"') inq = !inq;
      if (c == '#' && !inq) break;
      line += c;
    }
    for (const std::string& seg : split_segments(trim(line))) handle(seg, lineno);
  }
  if (cur)
    throw ConfigError(path_of(), lineno, "unterminated block (missing '}')");
  return rc;
}

// Typed access with unknown-key detection.
struct Reader {
  const RawSection& sec;
  std::string path;
  std::set<std::string> used;

  Reader(const RawSection& s, std::string p) : sec(s), path(std::move(p)) {}

  const RawEntry* find(const std::string& key) {
    const auto it = sec.entries.find(key);
    if (it == sec.entries.end()) return nullptr;
    used.insert(key);
    return &it->second;
  }
  const RawEntry& need(const std::string& key) {
    const RawEntry* e = find(key);
    if (!e) throw ConfigError(path + "." + key, sec.line, "missing required key");
    return *e;
  }
  double num(const std::string& key, const RawEntry& e) const {
    if (e.is_list)
      throw ConfigError(path + "." + key, e.line, "expected a number, got a list");
    double v;
    if (!parse_num(e.value, v))
      throw ConfigError(path + "." + key, e.line,
                        "expected a number, got '" + e.value + "'");
    return v;
  }
  std::vector<double> numlist(const std::string& key, const RawEntry& e) const {
    if (!e.is_list)
      throw ConfigError(path + "." + key, e.line, "expected a bracketed list");
    std::vector<double> out;
    for (const std::string& s : e.items) {
      double v;
      if (!parse_num(s, v))
        throw ConfigError(path + "." + key, e.line,
                          "expected numbers in the list, got '" + s + "'");
      out.push_back(v);
    }
    return out;
  }
  void finish() const {
    for (const auto& [key, e] : sec.entries)
      if (used.find(key) == used.end())
        throw ConfigError(path + "." + key, e.line, "unknown key");
  }
};

int to_int(const std::string& path, int line, double v, const char* what) {
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw ConfigError(path, line, std::string(what) + " must be an integer");
  return static_cast<int>(v);
}

std::optional<Box> box_from_list(const Manifold& m, const std::string& path,
                                 const RawEntry& e, const std::vector<double>& v) {
  Box b;
  b.dim = m.dim;
  if (static_cast<int>(v.size()) != 2 * m.dim)
    throw ConfigError(path, e.line,
                      "box needs " + std::to_string(2 * m.dim) +
                          " numbers (lo/hi per axis), got " +
                          std::to_string(v.size()));
  for (int a = 0; a < m.dim; ++a) {
    b.lo[a] = v[static_cast<std::size_t>(2 * a)];
    b.hi[a] = v[static_cast<std::size_t>(2 * a + 1)];
  }
  return b;
}

Expr parse_expr_at(const std::string& path, const RawEntry& e) {
  try {
    return parse_expr(e.value);
  } catch (const ParseError& pe) {
    throw ConfigError(path, e.line, pe.what());
  }
}

ManifoldKind kind_from_name(const std::string& s, const std::string& path, int line) {
  if (s == "line") return ManifoldKind::Line;
  if (s == "circle") return ManifoldKind::Circle;
  if (s == "torus") return ManifoldKind::Torus;
  if (s == "annulus") return ManifoldKind::Annulus;
  if (s == "klein-bottle") return ManifoldKind::KleinBottle;
  throw ConfigError(path, line,
                    "unknown manifold kind '" + s +
                        "' (one of line, circle, torus, annulus, klein-bottle)");
}

Manifold build_manifold(const RawSection& sec) {
  Reader r(sec, "manifold");
  const RawEntry& ke = r.need("kind");
  const ManifoldKind kind = kind_from_name(ke.value, "manifold.kind", ke.line);
  ManifoldSpec spec;
  switch (kind) {
    case ManifoldKind::Line:
      spec = ManifoldSpec::line(r.num("halfwidth", r.need("halfwidth")));
      break;
    case ManifoldKind::Circle:
      spec = ManifoldSpec::circle(r.num("length", r.need("length")));
      break;
    case ManifoldKind::Torus:
      spec = ManifoldSpec::torus(r.num("length1", r.need("length1")),
                                 r.num("length2", r.need("length2")));
      break;
    case ManifoldKind::Annulus:
      spec = ManifoldSpec::annulus(r.num("length", r.need("length")),
                                   r.num("width", r.need("width")));
      break;
    case ManifoldKind::KleinBottle:
      spec = ManifoldSpec::klein_bottle(r.num("length1", r.need("length1")),
                                        r.num("length2", r.need("length2")));
      break;
  }
  r.finish();
  try {
    return make_manifold(spec);
  } catch (const Error& err) {
    throw ConfigError("manifold", sec.line, err.what());
  }
}

struct ParamSpec {
  const char* key;
  char type;  // 's' string, 'n' number, 'l' number list, 'S' string list,
              // 'x' number or number list
  bool required;
};

const std::map<std::string, std::vector<ParamSpec>>& job_kind_table() {
  static const std::map<std::string, std::vector<ParamSpec>> table = {
      {"verify-lr",
       {{"f", 's', true},
        {"v", 's', true},
        {"tol", 'n', false},
        {"order", 'n', false},
        {"grids", 'l', false}}},
      {"verify-resolvent",
       {{"v", 's', true}, {"n", 'n', false}, {"order", 'n', false}}},
      {"verify-covariance",
       {{"v", 's', true},
        {"lambda", 'n', true},
        {"f", 's', true},
        {"w", 's', true},
        {"order", 'n', false},
        {"grids", 'l', false},
        {"steps", 'n', false}}},
      {"verify-lie",
       {{"v", 's', true},
        {"w", 's', true},
        {"order", 'n', false},
        {"grids", 'l', false}}},
      {"verify-cocycle",
       {{"rep", 's', true},
        {"g", 's', true},
        {"lambda_g", 'n', true},
        {"h", 's', true},
        {"lambda_h", 'n', true},
        {"samples", 'n', false},
        {"steps", 'n', false},
        {"tol", 'n', false},
        {"n", 'x', false}}},
      {"verify-local",
       {{"rep", 's', true},
        {"box", 'l', true},
        {"n", 'x', false},
        {"tol", 'n', false}}},
      {"spectrum",
       {{"rep", 's', true},
        {"k", 'n', true},
        {"n", 'x', false},
        {"potential", 's', false},
        {"order", 'n', false}}},
      {"sweep",
       {{"reps", 'S', true},
        {"k", 'n', true},
        {"n", 'x', false},
        {"order", 'n', false}}},
      {"equivalence",
       {{"rep1", 's', true},
        {"rep2", 's', true},
        {"n", 'x', false},
        {"classes", 'S', false},
        {"expect", 's', false}}},
  };
  return table;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  const RawConfig rc = lex(text);
  RunConfig cfg;
  cfg.source_text = text;

  // manifold first: everything else validates against it
  const RawSection* msec = nullptr;
  for (const RawSection& s : rc.sections) {
    if (s.type != "manifold") continue;
    if (msec) throw ConfigError("manifold", s.line, "only one manifold section");
    if (!s.name.empty())
      throw ConfigError("manifold", s.line, "the manifold section takes no name");
    msec = &s;
  }
  if (!msec) throw ConfigError("(top)", 1, "missing the manifold section");
  cfg.manifold = build_manifold(*msec);
  const Manifold& m = cfg.manifold;

  for (const auto& [key, e] : rc.top) {
    Reader r(*msec, "(top)");  // only for its typed conversion helpers
    const std::string path = "(top)." + key;
    if (key == "grids") {
      cfg.grids.clear();
      for (const double v : r.numlist(key, e))
        cfg.grids.push_back(to_int(path, e.line, v, "grid size"));
      if (cfg.grids.empty())
        throw ConfigError(path, e.line, "grids list must not be empty");
    } else if (key == "order") {
      cfg.order = to_int(path, e.line, r.num(key, e), "order");
      if (cfg.order != 2 && cfg.order != 4)
        throw ConfigError(path, e.line, "order must be 2 or 4");
    } else if (key == "steps") {
      cfg.steps = to_int(path, e.line, r.num(key, e), "steps");
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(r.num(key, e));
    } else {
      throw ConfigError(path, e.line, "unknown key");
    }
  }

  std::set<std::string> job_names;
  for (const RawSection& s : rc.sections) {
    if (s.type == "manifold") continue;
    const std::string path = s.name.empty() ? s.type : s.type + "." + s.name;
    if (s.type == "scalar" || s.type == "vector" || s.type == "rep" ||
        s.type == "job") {
      if (s.name.empty())
        throw ConfigError(s.type, s.line, s.type + " sections need a name");
    } else {
      throw ConfigError(s.type, s.line,
                        "unknown section type (one of manifold, scalar, vector, "
                        "rep, job)");
    }
    Reader r(s, path);
    if (s.type == "scalar") {
      if (cfg.scalars.count(s.name))
        throw ConfigError(path, s.line, "duplicate scalar name");
      const Expr e = parse_expr_at(path + ".expr", r.need("expr"));
      bool potential = false;
      if (const RawEntry* pe = r.find("potential")) {
        if (pe->value == "true") potential = true;
        else if (pe->value == "false") potential = false;
        else
          throw ConfigError(path + ".potential", pe->line,
                            "expected true or false");
      }
      std::optional<Box> box;
      if (const RawEntry* be = r.find("support"))
        box = box_from_list(m, path + ".support", *be, r.numlist("support", *be));
      r.finish();
      try {
        cfg.scalars.emplace(s.name, potential ? make_potential(m, e)
                                              : make_scalar_field(m, e, box));
      } catch (const Error& err) {
        throw ConfigError(path, s.line, err.what());
      }
    } else if (s.type == "vector") {
      if (cfg.vectors.count(s.name))
        throw ConfigError(path, s.line, "duplicate vector name");
      std::array<Expr, 2> comp;
      comp[0] = parse_expr_at(path + ".x", r.need("x"));
      if (m.dim == 2) comp[1] = parse_expr_at(path + ".y", r.need("y"));
      else if (r.find("y"))
        throw ConfigError(path + ".y", s.line,
                          "1-d manifolds take only an x component");
      std::optional<Box> box;
      if (const RawEntry* be = r.find("support"))
        box = box_from_list(m, path + ".support", *be, r.numlist("support", *be));
      r.finish();
      try {
        cfg.vectors.emplace(s.name, make_vector_field(m, comp, box));
      } catch (const Error& err) {
        throw ConfigError(path, s.line, err.what());
      }
    } else if (s.type == "rep") {
      if (cfg.reps.count(s.name))
        throw ConfigError(path, s.line, "duplicate rep name");
      try {
        if (const RawEntry* ae = r.find("angles")) {
          const std::vector<double> angles = r.numlist("angles", *ae);
          r.finish();
          cfg.reps.emplace(s.name, rep_from_angles(m, angles, s.name));
        } else {
          const int dim = to_int(path + ".dim", s.line,
                                 r.num("dim", r.need("dim")), "fiber dimension");
          std::vector<Mat> gens;
          for (const std::string& gname : m.presentation.generators) {
            const RawEntry& ge = r.need(gname);
            const std::vector<double> flat = r.numlist(gname, ge);
            if (static_cast<int>(flat.size()) != 2 * dim * dim)
              throw ConfigError(path + "." + gname, ge.line,
                                "generator matrix needs " +
                                    std::to_string(2 * dim * dim) +
                                    " numbers (re,im row-major)");
            Mat g(dim, dim);
            for (int i = 0; i < dim; ++i)
              for (int j = 0; j < dim; ++j)
                g(i, j) = cxd(flat[static_cast<std::size_t>(2 * (i * dim + j))],
                              flat[static_cast<std::size_t>(2 * (i * dim + j) + 1)]);
            gens.push_back(std::move(g));
          }
          r.finish();
          cfg.reps.emplace(s.name, rep_from_matrices(m, dim, gens, s.name));
        }
      } catch (const ConfigError&) {
        throw;
      } catch (const Error& err) {
        throw ConfigError(path, s.line, err.what());
      }
    } else {  // job
      if (!job_names.insert(s.name).second)
        throw ConfigError(path, s.line, "duplicate job name");
      JobSpec job;
      job.name = s.name;
      job.line = s.line;
      const RawEntry& ke = r.need("kind");
      job.kind = ke.value;
      const auto kit = job_kind_table().find(job.kind);
      if (kit == job_kind_table().end()) {
        std::string kinds;
        for (const auto& [k, v] : job_kind_table()) {
          if (!kinds.empty()) kinds += ", ";
          kinds += k;
        }
        throw ConfigError(path + ".kind", ke.line,
                          "unknown job kind '" + job.kind + "' (one of " + kinds +
                              ")");
      }
      for (const ParamSpec& ps : kit->second) {
        const RawEntry* e = ps.required ? &r.need(ps.key) : r.find(ps.key);
        if (!e) continue;
        const std::string kp = path + "." + ps.key;
        switch (ps.type) {
          case 's':
            if (e->is_list)
              throw ConfigError(kp, e->line, "expected a single value");
            job.str_params[ps.key] = e->value;
            break;
          case 'n':
            job.num_params[ps.key] = r.num(ps.key, *e);
            break;
          case 'l':
            job.list_params[ps.key] = r.numlist(ps.key, *e);
            break;
          case 'S':
            if (!e->is_list)
              throw ConfigError(kp, e->line, "expected a bracketed list");
            job.strlist_params[ps.key] = e->items;
            break;
          case 'x':
            if (e->is_list) job.list_params[ps.key] = r.numlist(ps.key, *e);
            else job.num_params[ps.key] = r.num(ps.key, *e);
            break;
        }
      }
      r.finish();
      // resolve references now so a bad name fails before any job runs
      const auto want_vec = [&](const char* key) {
        const auto it = job.str_params.find(key);
        if (it != job.str_params.end() && !cfg.vectors.count(it->second))
          throw ConfigError(path + "." + key, s.line,
                            "unknown vector field '" + it->second + "'");
      };
      const auto want_scal = [&](const char* key) {
        const auto it = job.str_params.find(key);
        if (it != job.str_params.end() && !cfg.scalars.count(it->second))
          throw ConfigError(path + "." + key, s.line,
                            "unknown scalar field '" + it->second + "'");
      };
      const auto want_rep = [&](const char* key) {
        const auto it = job.str_params.find(key);
        if (it != job.str_params.end() && !cfg.reps.count(it->second))
          throw ConfigError(path + "." + key, s.line,
                            "unknown rep '" + it->second + "'");
      };
      want_vec("v");
      want_vec("w");
      want_vec("g");
      want_vec("h");
      want_scal("f");
      want_scal("potential");
      want_rep("rep");
      want_rep("rep1");
      want_rep("rep2");
      if (const auto it = job.strlist_params.find("reps");
          it != job.strlist_params.end())
        for (const std::string& rn : it->second)
          if (!cfg.reps.count(rn))
            throw ConfigError(path + ".reps", s.line, "unknown rep '" + rn + "'");
      if (const auto it = job.strlist_params.find("classes");
          it != job.strlist_params.end())
        for (const std::string& cw : it->second) {
          try {
            reduce(m.presentation, word_from_string(m.presentation, cw));
          } catch (const Error& err) {
            throw ConfigError(path + ".classes", s.line, err.what());
          }
        }
      if (const auto it = job.str_params.find("expect");
          it != job.str_params.end())
        if (it->second != "equivalent" && it->second != "distinct")
          throw ConfigError(path + ".expect", s.line,
                            "expected 'equivalent' or 'distinct'");
      cfg.jobs.push_back(std::move(job));
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, 0, "cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace mqm
