#include "mqm/manifold.hpp"

#include <cmath>
#include <cstdio>

namespace mqm {

std::string fmt17(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string kind_name(ManifoldKind k) {
  switch (k) {
    case ManifoldKind::Line: return "line";
    case ManifoldKind::Circle: return "circle";
    case ManifoldKind::Torus: return "torus";
    case ManifoldKind::Annulus: return "annulus";
    case ManifoldKind::KleinBottle: return "klein-bottle";
  }
  return "?";
}

ManifoldSpec ManifoldSpec::line(double X) {
  ManifoldSpec s;
  s.kind = ManifoldKind::Line;
  s.X = X;
  return s;
}

ManifoldSpec ManifoldSpec::circle(double L) {
  ManifoldSpec s;
  s.kind = ManifoldKind::Circle;
  s.L = L;
  return s;
}

ManifoldSpec ManifoldSpec::torus(double L1, double L2) {
  ManifoldSpec s;
  s.kind = ManifoldKind::Torus;
  s.L1 = L1;
  s.L2 = L2;
  return s;
}

ManifoldSpec ManifoldSpec::annulus(double L, double W) {
  ManifoldSpec s;
  s.kind = ManifoldKind::Annulus;
  s.L = L;
  s.W = W;
  return s;
}

ManifoldSpec ManifoldSpec::klein_bottle(double L1, double L2) {
  ManifoldSpec s;
  s.kind = ManifoldKind::KleinBottle;
  s.L1 = L1;
  s.L2 = L2;
  return s;
}

std::string ManifoldSpec::str() const {
  switch (kind) {
    case ManifoldKind::Line: return "line(X=" + fmt17(X) + ")";
    case ManifoldKind::Circle: return "circle(L=" + fmt17(L) + ")";
    case ManifoldKind::Torus:
      return "torus(L1=" + fmt17(L1) + ",L2=" + fmt17(L2) + ")";
    case ManifoldKind::Annulus:
      return "annulus(L=" + fmt17(L) + ",W=" + fmt17(W) + ")";
    case ManifoldKind::KleinBottle:
      return "klein-bottle(L1=" + fmt17(L1) + ",L2=" + fmt17(L2) + ")";
  }
  return "?";
}

static void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw InvalidParam(std::string(name) + " must be a positive finite length");
}

Manifold make_manifold(const ManifoldSpec& spec) {
  Manifold m;
  m.spec = spec;
  switch (spec.kind) {
    case ManifoldKind::Line:
      require_positive(spec.X, "X");
      m.dim = 1;
      m.domain = Box{{-spec.X, 0.0}, {spec.X, 0.0}, 1};
      m.presentation = Pi1Presentation{{}, {}, true};
      break;
    case ManifoldKind::Circle:
      require_positive(spec.L, "L");
      m.dim = 1;
      m.domain = Box{{0.0, 0.0}, {spec.L, 0.0}, 1};
      m.edges[0] = EdgeRule{true, 0, false};
      m.presentation = Pi1Presentation{{"a"}, {}, true};
      break;
    case ManifoldKind::Torus:
      require_positive(spec.L1, "L1");
      require_positive(spec.L2, "L2");
      m.dim = 2;
      m.domain = Box{{0.0, 0.0}, {spec.L1, spec.L2}, 2};
      m.edges[0] = EdgeRule{true, 0, false};
      m.edges[1] = EdgeRule{true, 1, false};
      m.presentation = Pi1Presentation{{"a", "b"}, {Word{1, 2, -1, -2}}, true};
      break;
    case ManifoldKind::Annulus:
      require_positive(spec.L, "L");
      require_positive(spec.W, "W");
      m.dim = 2;
      m.domain = Box{{0.0, 0.0}, {spec.L, spec.W}, 2};
      m.edges[0] = EdgeRule{true, 0, false};
      m.presentation = Pi1Presentation{{"a"}, {}, true};
      break;
    case ManifoldKind::KleinBottle:
      require_positive(spec.L1, "L1");
      require_positive(spec.L2, "L2");
      m.dim = 2;
      m.domain = Box{{0.0, 0.0}, {spec.L1, spec.L2}, 2};
      m.edges[0] = EdgeRule{true, 0, false};
      m.edges[1] = EdgeRule{true, 1, true};
      // b a b^-1 a = e, i.e. b a b^-1 = a^-1
      m.presentation = Pi1Presentation{{"a", "b"}, {Word{2, 1, -2, 1}}, false};
      break;
  }
  return m;
}

Grid make_grid(const Manifold& m, const std::array<int, 2>& n) {
  Grid g;
  g.m = m;
  g.dim = m.dim;
  for (int a = 0; a < m.dim; ++a) {
    if (n[a] < 8)
      throw InvalidParam("grid needs at least 8 points per axis, got " +
                         std::to_string(n[a]));
    g.n[a] = n[a];
    g.h[a] = m.extent(a) / static_cast<double>(n[a]);
  }
  if (m.dim == 1) {
    g.n[1] = 1;
    g.h[1] = 0.0;
  }
  g.npts = static_cast<long long>(g.n[0]) * g.n[1];
  g.weight = g.h[0] * (m.dim == 2 ? g.h[1] : 1.0);
  return g;
}

Grid make_grid(const Manifold& m, int n) { return make_grid(m, {n, n}); }

static void apply_generator(const Manifold& m, int gen, int sign, Pt& p) {
  switch (m.spec.kind) {
    case ManifoldKind::Circle:
    case ManifoldKind::Annulus:
      p[0] += sign * m.extent(0);
      break;
    case ManifoldKind::Torus:
      p[gen] += sign * m.extent(gen);
      break;
    case ManifoldKind::KleinBottle:
      if (gen == 0) {
        p[0] += sign * m.extent(0);
      } else {
        // b and b^-1 share the reflection; only the y shift is signed
        p[0] = m.domain.lo[0] + m.domain.hi[0] - p[0];
        p[1] += sign * m.extent(1);
      }
      break;
    case ManifoldKind::Line:
      break;
  }
}

Pt deck_action(const Manifold& m, const Word& word, const Pt& x) {
  const int ng = m.presentation.n_generators();
  Pt p = x;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    int letter = *it;
    if (letter == 0) throw InvalidWord("letter 0 is not a generator index");
    int gen = std::abs(letter) - 1;
    if (gen >= ng)
      throw InvalidWord("generator index " + std::to_string(std::abs(letter)) +
                        " out of range on " + kind_name(m.spec.kind));
    apply_generator(m, gen, letter > 0 ? 1 : -1, p);
  }
  return p;
}

Pt deck_action(const Manifold& m, const HomotopyClass& c, const Pt& x) {
  if (c.kind != m.pk())
    throw InvalidWord("homotopy class belongs to a different deck group");
  Pt p = x;
  switch (m.spec.kind) {
    case ManifoldKind::Line:
      break;
    case ManifoldKind::Circle:
    case ManifoldKind::Annulus:
      p[0] += static_cast<double>(c.m) * m.extent(0);
      break;
    case ManifoldKind::Torus:
      p[0] += static_cast<double>(c.m) * m.extent(0);
      p[1] += static_cast<double>(c.n) * m.extent(1);
      break;
    case ManifoldKind::KleinBottle:
      // canonical a^m b^n: the b-part acts first
      if (c.n & 1LL) p[0] = m.domain.lo[0] + m.domain.hi[0] - p[0];
      p[1] += static_cast<double>(c.n) * m.extent(1);
      p[0] += static_cast<double>(c.m) * m.extent(0);
      break;
  }
  return p;
}

// Wrap one coordinate into [lo, hi) and report the number of periods removed.
static long long wrap_axis(double lo, double hi, double& x) {
  const double L = hi - lo;
  long long k = ifloor((x - lo) / L);
  x -= static_cast<double>(k) * L;
  while (x >= hi) {
    x -= L;
    ++k;
  }
  while (x < lo) {
    x += L;
    --k;
  }
  return k;
}

Reduction reduce_to_domain(const Manifold& m, const Pt& q) {
  Reduction r;
  r.cls = HomotopyClass::identity(m.pk());
  r.p = q;
  if (m.dim == 1) r.p[1] = 0.0;
  const Box& B = m.domain;
  switch (m.spec.kind) {
    case ManifoldKind::Line:
      break;
    case ManifoldKind::Circle:
    case ManifoldKind::Annulus:
      r.cls.m = wrap_axis(B.lo[0], B.hi[0], r.p[0]);
      break;
    case ManifoldKind::Torus:
      r.cls.m = wrap_axis(B.lo[0], B.hi[0], r.p[0]);
      r.cls.n = wrap_axis(B.lo[1], B.hi[1], r.p[1]);
      break;
    case ManifoldKind::KleinBottle: {
      double y = q[1];
      const long long t = wrap_axis(B.lo[1], B.hi[1], y);
      double x = (t & 1LL) ? (B.lo[0] + B.hi[0] - q[0]) : q[0];
      const long long s = wrap_axis(B.lo[0], B.hi[0], x);
      r.p = Pt{x, y};
      r.cls.m = (t & 1LL) ? -s : s;
      r.cls.n = t;
      r.reflected = (t & 1LL) != 0;
      break;
    }
  }
  return r;
}

IndexReduction reduce_index(const Grid& g, long long jx, long long jy) {
  IndexReduction r;
  r.cls = HomotopyClass::identity(g.m.pk());
  const long long n0 = g.n[0], n1 = g.n[1];
  switch (g.m.spec.kind) {
    case ManifoldKind::Line:
      r.ix = jx;
      r.iy = 0;
      r.inside = (jx >= 0 && jx < n0);
      break;
    case ManifoldKind::Circle: {
      const long long q = fdiv(jx, n0);
      r.ix = jx - q * n0;
      r.iy = 0;
      r.cls.m = q;
      break;
    }
    case ManifoldKind::Annulus: {
      const long long q = fdiv(jx, n0);
      r.ix = jx - q * n0;
      r.iy = jy;
      r.cls.m = q;
      r.inside = (jy >= 0 && jy < n1);
      break;
    }
    case ManifoldKind::Torus: {
      const long long q0 = fdiv(jx, n0);
      const long long q1 = fdiv(jy, n1);
      r.ix = jx - q0 * n0;
      r.iy = jy - q1 * n1;
      r.cls.m = q0;
      r.cls.n = q1;
      break;
    }
    case ManifoldKind::KleinBottle: {
      const long long t = fdiv(jy, n1);
      r.iy = jy - t * n1;
      const long long jx2 = (t & 1LL) ? (n0 - jx) : jx;
      const long long s = fdiv(jx2, n0);
      r.ix = jx2 - s * n0;
      r.cls.m = (t & 1LL) ? -s : s;
      r.cls.n = t;
      break;
    }
  }
  return r;
}

}  // namespace mqm
