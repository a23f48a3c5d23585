#include "mqm/homotopy.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace mqm {

PresKind pres_kind(const Pi1Presentation& p) {
  if (p.generators.empty()) return PresKind::Trivial;
  if (p.generators.size() == 1) return PresKind::FreeZ;
  return p.abelian ? PresKind::Z2 : PresKind::KleinGroup;
}

static int kind_generators(PresKind k) {
  switch (k) {
    case PresKind::Trivial: return 0;
    case PresKind::FreeZ: return 1;
    case PresKind::Z2:
    case PresKind::KleinGroup: return 2;
  }
  return 0;
}

HomotopyClass HomotopyClass::generator(PresKind k, int index, int sign) {
  if (index < 0 || index >= kind_generators(k))
    throw InvalidWord("generator index " + std::to_string(index + 1) +
                      " out of range for this deck group");
  if (sign != 1 && sign != -1) throw InvalidWord("generator sign must be +1 or -1");
  HomotopyClass c{k, 0, 0};
  (index == 0 ? c.m : c.n) = sign;
  return c;
}

HomotopyClass HomotopyClass::compose(const HomotopyClass& other) const {
  if (kind != other.kind)
    throw InvalidWord("cannot compose classes from different deck groups");
  HomotopyClass c{kind, 0, 0};
  if (kind == PresKind::KleinGroup) {
    // (a^m b^n)(a^m' b^n') = a^{m + (-1)^n m'} b^{n + n'}
    c.m = m + ((n & 1LL) ? -other.m : other.m);
    c.n = n + other.n;
  } else {
    c.m = m + other.m;
    c.n = n + other.n;
  }
  return c;
}

HomotopyClass HomotopyClass::inverse() const {
  HomotopyClass c{kind, 0, 0};
  if (kind == PresKind::KleinGroup) {
    c.m = (n & 1LL) ? m : -m;
    c.n = -n;
  } else {
    c.m = -m;
    c.n = -n;
  }
  return c;
}

HomotopyClass HomotopyClass::power(long long e) const {
  if (kind != PresKind::KleinGroup) return HomotopyClass{kind, m * e, n * e};
  HomotopyClass base = e >= 0 ? *this : inverse();
  long long reps = e >= 0 ? e : -e;
  HomotopyClass c = identity(kind);
  for (long long i = 0; i < reps; ++i) c = c.compose(base);
  return c;
}

static void append_power(std::string& out, const std::string& name, long long e) {
  if (e == 0) return;
  if (!out.empty()) out += ' ';
  out += name;
  if (e != 1) out += "^" + std::to_string(e);
}

std::string HomotopyClass::str() const {
  std::string out;
  append_power(out, "a", m);
  append_power(out, "b", n);
  return out.empty() ? "e" : out;
}

HomotopyClass reduce(const Pi1Presentation& p, const Word& word) {
  const PresKind k = pres_kind(p);
  HomotopyClass c = HomotopyClass::identity(k);
  for (int letter : word) {
    if (letter == 0) throw InvalidWord("letter 0 is not a generator index");
    const int gen = std::abs(letter) - 1;
    if (gen >= p.n_generators())
      throw InvalidWord("generator index " + std::to_string(std::abs(letter)) +
                        " out of range for this presentation");
    c = c.compose(HomotopyClass::generator(k, gen, letter > 0 ? 1 : -1));
  }
  return c;
}

Word word_from_string(const Pi1Presentation& p, const std::string& text) {
  Word out;
  std::istringstream is(text);
  std::string tok;
  while (is >> tok) {
    if (tok == "e" || tok == "1") continue;
    std::string name = tok;
    long long power = 1;
    if (auto caret = tok.find('^'); caret != std::string::npos) {
      name = tok.substr(0, caret);
      const std::string ex = tok.substr(caret + 1);
      char* end = nullptr;
      power = std::strtoll(ex.c_str(), &end, 10);
      if (ex.empty() || end != ex.c_str() + ex.size())
        throw InvalidWord("bad exponent '" + ex + "' in word token '" + tok + "'");
    }
    int gen = -1;
    for (int i = 0; i < p.n_generators(); ++i)
      if (p.generators[static_cast<std::size_t>(i)] == name) gen = i;
    if (gen < 0) throw InvalidWord("unknown generator '" + name + "' in word");
    const int letter = (gen + 1) * (power >= 0 ? 1 : -1);
    for (long long i = 0; i < std::llabs(power); ++i) out.push_back(letter);
  }
  return out;
}

// --- path tracking ---------------------------------------------------------

namespace {

double seg_dist(const Pt& a, const Pt& b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Peel the edge crossings of one short segment, earliest first, pulling the
// segment back to the sheet reached so far.
void segment_letters(const Manifold& m, const Pt& a, const Pt& b,
                     const HomotopyClass& wa, const HomotopyClass& wb, Word& out,
                     int depth) {
  if (wa == wb) return;
  if (depth > 6)
    throw PathTooCoarse("could not resolve the crossing order of one segment");
  const Pt pa = deck_action(m, wa.inverse(), a);
  const Pt pb = deck_action(m, wa.inverse(), b);
  double best_t = std::numeric_limits<double>::infinity();
  int best_axis = -1, best_sign = 0;
  for (int ax = 0; ax < m.dim; ++ax) {
    if (!m.edges[ax].identified) continue;
    const double lo = m.domain.lo[ax], hi = m.domain.hi[ax];
    double t;
    int sign;
    if (pb[ax] >= hi && pb[ax] > pa[ax]) {
      t = (hi - pa[ax]) / (pb[ax] - pa[ax]);
      sign = 1;
    } else if (pb[ax] < lo && pb[ax] < pa[ax]) {
      t = (lo - pa[ax]) / (pb[ax] - pa[ax]);
      sign = -1;
    } else {
      continue;
    }
    if (t < best_t) {
      best_t = t;
      best_axis = ax;
      best_sign = sign;
    }
  }
  if (best_axis < 0)
    throw PathTooCoarse("sheet changed without a detectable edge crossing");
  const int gen = m.edges[best_axis].generator;
  out.push_back((gen + 1) * best_sign);
  const HomotopyClass wa2 =
      wa.compose(HomotopyClass::generator(m.pk(), gen, best_sign));
  segment_letters(m, a, b, wa2, wb, out, depth + 1);
}

}  // namespace

TrackResult track_crossings(const Manifold& m, const std::vector<Pt>& cover_path) {
  TrackResult out;
  out.cls = HomotopyClass::identity(m.pk());
  if (cover_path.size() < 2) return out;

  double min_edge = std::numeric_limits<double>::infinity();
  for (int a = 0; a < m.dim; ++a) min_edge = std::min(min_edge, m.extent(a));
  const double max_step = min_edge / 4.0;

  HomotopyClass w_prev = reduce_to_domain(m, cover_path[0]).cls;
  const HomotopyClass w0_inv = w_prev.inverse();
  for (std::size_t i = 1; i < cover_path.size(); ++i) {
    const double step = seg_dist(cover_path[i - 1], cover_path[i], m.dim);
    if (!(step < max_step))
      throw PathTooCoarse("path step " + std::to_string(i) + " has length " +
                          fmt17(step) + ", needs < " + fmt17(max_step));
    const HomotopyClass w_cur = reduce_to_domain(m, cover_path[i]).cls;
    if (w_cur != w_prev)
      segment_letters(m, cover_path[i - 1], cover_path[i], w_prev, w_cur,
                      out.letters, 0);
    w_prev = w_cur;
  }

  out.cls = w0_inv.compose(w_prev);
  HomotopyClass folded = HomotopyClass::identity(m.pk());
  for (int letter : out.letters)
    folded = folded.compose(
        HomotopyClass::generator(m.pk(), std::abs(letter) - 1, letter > 0 ? 1 : -1));
  if (folded != out.cls)
    throw PathTooCoarse("crossing letters do not compose to the endpoint class");
  return out;
}

// --- representations -------------------------------------------------------

bool Pi1Representation::is_trivial() const {
  if (fiber_dim != 1) return false;
  for (const Mat& g : gen)
    if ((g - Mat::Identity(1, 1)).norm() != 0.0) return false;
  return true;
}

double rep_validation_residual(const Pi1Representation& r) {
  const int k = r.fiber_dim;
  double worst = 0.0;
  const Mat id = Mat::Identity(k, k);
  for (const Mat& g : r.gen)
    worst = std::max(worst, (g.adjoint() * g - id).norm());
  for (const Word& w : r.presentation.relations) {
    Mat prod = id;
    for (int letter : w) {
      const std::size_t gi = static_cast<std::size_t>(std::abs(letter) - 1);
      prod = prod * (letter > 0 ? r.gen[gi] : Mat(r.gen[gi].adjoint()));
    }
    worst = std::max(worst, (prod - id).norm());
  }
  return worst;
}

static void validate_rep(const Pi1Representation& r) {
  const int k = r.fiber_dim;
  const Mat id = Mat::Identity(k, k);
  for (std::size_t gi = 0; gi < r.gen.size(); ++gi) {
    const double u = (r.gen[gi].adjoint() * r.gen[gi] - id).norm();
    if (!(u <= 1e-12))
      throw InvalidParam("generator " + r.presentation.generators[gi] +
                         " is not unitary (deviation " + fmt17(u) + ")");
  }
  for (const Word& w : r.presentation.relations) {
    Mat prod = id;
    std::string wstr;
    for (int letter : w) {
      const std::size_t gi = static_cast<std::size_t>(std::abs(letter) - 1);
      prod = prod * (letter > 0 ? r.gen[gi] : Mat(r.gen[gi].adjoint()));
      if (!wstr.empty()) wstr += ' ';
      wstr += r.presentation.generators[gi] + (letter > 0 ? "" : "^-1");
    }
    const double u = (prod - id).norm();
    if (!(u <= 1e-12))
      throw InvalidParam("matrices violate the relation " + wstr +
                         " = e (deviation " + fmt17(u) + ")");
  }
}

Pi1Representation rep_from_angles(const Manifold& m, const std::vector<double>& angles,
                                  const std::string& label) {
  const int ng = m.presentation.n_generators();
  if (static_cast<int>(angles.size()) != ng)
    throw InvalidParam("expected " + std::to_string(ng) + " angle(s) for " +
                       kind_name(m.spec.kind) + ", got " +
                       std::to_string(angles.size()));
  Pi1Representation r;
  r.presentation = m.presentation;
  r.kind = m.pk();
  r.fiber_dim = 1;
  std::string auto_label = "theta(";
  const double two_pi = 2.0 * M_PI;
  for (int i = 0; i < ng; ++i) {
    const double th = std::remainder(angles[static_cast<std::size_t>(i)], two_pi);
    Mat g(1, 1);
    g(0, 0) = std::polar(1.0, th);
    r.gen.push_back(g);
    if (i) auto_label += ',';
    auto_label += fmt17(th);
  }
  r.label = label.empty() ? auto_label + ")" : label;
  validate_rep(r);
  return r;
}

Pi1Representation rep_from_matrices(const Manifold& m, int fiber_dim,
                                    const std::vector<Mat>& gen,
                                    const std::string& label) {
  const int ng = m.presentation.n_generators();
  if (static_cast<int>(gen.size()) != ng)
    throw InvalidParam("expected " + std::to_string(ng) + " generator matrix(es) for " +
                       kind_name(m.spec.kind) + ", got " + std::to_string(gen.size()));
  if (fiber_dim < 1) throw InvalidParam("fiber dimension must be at least 1");
  for (const Mat& g : gen)
    if (g.rows() != fiber_dim || g.cols() != fiber_dim)
      throw InvalidParam("generator matrices must be " + std::to_string(fiber_dim) +
                         "x" + std::to_string(fiber_dim));
  Pi1Representation r;
  r.presentation = m.presentation;
  r.kind = m.pk();
  r.fiber_dim = fiber_dim;
  r.gen = gen;
  r.label = label.empty() ? "matrix-rep(dim=" + std::to_string(fiber_dim) + ")" : label;
  validate_rep(r);
  return r;
}

Pi1Representation trivial_rep(const Manifold& m) {
  Pi1Representation r;
  r.presentation = m.presentation;
  r.kind = m.pk();
  r.fiber_dim = 1;
  for (int i = 0; i < m.presentation.n_generators(); ++i)
    r.gen.push_back(Mat::Identity(1, 1));
  r.label = "trivial";
  return r;
}

static Mat matpow(const Mat& g, long long e) {
  const Mat id = Mat::Identity(g.rows(), g.cols());
  if (e == 0) return id;
  Mat base = e > 0 ? g : Mat(g.adjoint());
  long long k = e > 0 ? e : -e;
  Mat acc = id;
  while (k > 0) {
    if (k & 1LL) acc = acc * base;
    base = base * base;
    k >>= 1;
  }
  return acc;
}

Mat evaluate_rep(const Pi1Representation& r, const HomotopyClass& c) {
  if (c.kind != r.kind)
    throw InvalidWord("homotopy class belongs to a different deck group");
  if (r.gen.empty()) return Mat::Identity(r.fiber_dim, r.fiber_dim);
  Mat out = matpow(r.gen[0], c.m);
  if (r.gen.size() > 1 && c.n != 0) out = out * matpow(r.gen[1], c.n);
  return out;
}

std::vector<cxd> conjugacy_invariants(const Pi1Representation& r,
                                      const std::vector<HomotopyClass>& classes) {
  std::vector<cxd> out;
  out.reserve(classes.size());
  for (const HomotopyClass& c : classes) out.push_back(evaluate_rep(r, c).trace());
  return out;
}

std::vector<HomotopyClass> default_probe_classes(const Manifold& m) {
  const PresKind k = m.pk();
  std::vector<HomotopyClass> out;
  switch (k) {
    case PresKind::Trivial:
      out.push_back(HomotopyClass::identity(k));
      break;
    case PresKind::FreeZ:
      for (long long mm = -2; mm <= 2; ++mm) out.push_back(HomotopyClass{k, mm, 0});
      break;
    case PresKind::Z2:
    case PresKind::KleinGroup:
      for (long long mm = -2; mm <= 2; ++mm)
        for (long long nn = -2; nn <= 2; ++nn)
          out.push_back(HomotopyClass{k, mm, nn});
      break;
  }
  return out;
}

}  // namespace mqm
