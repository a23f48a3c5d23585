#include "mqm/fields.hpp"

#include <cmath>
#include <vector>

namespace mqm {

namespace {

// Deterministic sample lattice across the fundamental domain (plus the
// closing edge, so identifications are probed at both ends).
std::vector<Pt> domain_samples(const Manifold& m, int per_axis) {
  std::vector<Pt> out;
  const int ny = m.dim == 2 ? per_axis : 0;
  for (int ix = 0; ix <= per_axis; ++ix) {
    const double x =
        m.domain.lo[0] + m.extent(0) * static_cast<double>(ix) / per_axis;
    for (int iy = 0; iy <= ny; ++iy) {
      const double y =
          m.dim == 2
              ? m.domain.lo[1] + m.extent(1) * static_cast<double>(iy) / per_axis
              : 0.0;
      out.push_back(Pt{x, y});
    }
  }
  return out;
}

void check_box_shape(const Manifold& m, const Box& b) {
  if (b.dim != m.dim) throw InvalidParam("support box dimension mismatch");
  for (int a = 0; a < m.dim; ++a) {
    if (!(b.lo[a] < b.hi[a]))
      throw InvalidParam("support box is empty along axis " + std::to_string(a));
    if (b.lo[a] < m.domain.lo[a] || b.hi[a] > m.domain.hi[a])
      throw InvalidParam("support box leaves the fundamental domain");
  }
  if (m.spec.kind == ManifoldKind::Line &&
      !(b.lo[0] > m.domain.lo[0] && b.hi[0] < m.domain.hi[0]))
    throw InvalidParam("support box must stay strictly inside the line segment");
}

// |value| under which a sampled field counts as vanishing, relative to its
// largest sample.
double vanish_scale(double max_abs) { return 1e-12 * (1.0 + max_abs); }

void check_support(const Manifold& m, const std::optional<Box>& box,
                   const std::vector<Expr>& comps, const char* what) {
  if (m.spec.kind == ManifoldKind::Line && !box)
    throw InvalidParam(std::string(what) +
                       " on the line needs a compact support box");
  if (!box) return;
  check_box_shape(m, *box);
  const auto pts = domain_samples(m, 64);
  double max_abs = 0.0;
  for (const Pt& p : pts)
    for (const Expr& c : comps) max_abs = std::max(max_abs, std::abs(c.eval(p)));
  for (const Pt& p : pts) {
    if (box->contains_closed(p)) continue;
    for (const Expr& c : comps) {
      const double v = std::abs(c.eval(p));
      if (v > vanish_scale(max_abs))
        throw InvalidParam(std::string(what) + " does not vanish outside its " +
                           "support box (|value| = " + fmt17(v) + " at x=" +
                           fmt17(p[0]) + ", y=" + fmt17(p[1]) + ")");
    }
  }
}

// Samples related by one positive deck generator must agree, with the
// x-component of a vector flipping across the reflecting edge.
void check_identifications(const Manifold& m, const std::vector<Expr>& comps,
                           bool vector_valued, const char* what) {
  const auto pts = domain_samples(m, 48);
  double max_abs = 0.0;
  for (const Pt& p : pts)
    for (const Expr& c : comps) max_abs = std::max(max_abs, std::abs(c.eval(p)));
  const double tol = vanish_scale(max_abs);
  for (int ax = 0; ax < m.dim; ++ax) {
    if (!m.edges[ax].identified) continue;
    const Word step{m.edges[ax].generator + 1};
    const bool reflects = m.edges[ax].reverses_other;
    for (const Pt& p : pts) {
      const Pt q = deck_action(m, step, p);
      for (std::size_t j = 0; j < comps.size(); ++j) {
        double expect = comps[j].eval(p);
        if (vector_valued && reflects && j == 0) expect = -expect;
        const double got = comps[j].eval(q);
        if (std::abs(got - expect) > tol)
          throw InvalidParam(std::string(what) +
                             " is incompatible with the identification along axis " +
                             std::to_string(ax) + " (mismatch " +
                             fmt17(std::abs(got - expect)) + " at x=" + fmt17(p[0]) +
                             ", y=" + fmt17(p[1]) + ")");
      }
    }
  }
}

std::optional<Box> merge_support(const Manifold& m, const std::optional<Box>& a,
                                 const std::optional<Box>& b) {
  if (!a || !b) return std::nullopt;
  Box u;
  u.dim = m.dim;
  for (int ax = 0; ax < m.dim; ++ax) {
    u.lo[ax] = std::min(a->lo[ax], b->lo[ax]);
    u.hi[ax] = std::max(a->hi[ax], b->hi[ax]);
  }
  return u;
}

}  // namespace

ScalarField make_scalar_field(const Manifold& m, const Expr& e,
                              std::optional<Box> support) {
  if (!e.valid()) throw InvalidParam("scalar field needs an expression");
  ScalarField f{e, m, support, ScalarField::Role::Observable};
  check_support(m, f.support, {e}, "observable");
  // Boxed fields extend by zero, so only global formulas must match up
  // across the identified edges.
  if (!f.support) check_identifications(m, {e}, false, "observable");
  return f;
}

ScalarField make_potential(const Manifold& m, const Expr& e) {
  if (!e.valid()) throw InvalidParam("potential needs an expression");
  ScalarField f{e, m, std::nullopt, ScalarField::Role::Potential};
  check_identifications(m, {e}, false, "potential");
  return f;
}

VectorField make_vector_field(const Manifold& m, const std::array<Expr, 2>& comp,
                              std::optional<Box> support) {
  if (!comp[0].valid()) throw InvalidParam("vector field needs an x component");
  if (m.dim == 2 && !comp[1].valid())
    throw InvalidParam("vector field needs a y component on a 2-d manifold");
  VectorField v{comp, m, support};
  std::vector<Expr> comps{comp[0]};
  if (m.dim == 2) comps.push_back(comp[1]);
  check_support(m, v.support, comps, "vector field");
  if (!v.support) check_identifications(m, comps, true, "vector field");
  return v;
}

double eval_scalar_cover(const ScalarField& f, const Pt& q) {
  const Reduction r = reduce_to_domain(f.manifold, q);
  return f.expr.eval(r.p);
}

Pt eval_vector_cover(const VectorField& v, const Pt& q) {
  const Reduction r = reduce_to_domain(v.manifold, q);
  double vx = v.comp[0].eval(r.p);
  const double vy = v.manifold.dim == 2 ? v.comp[1].eval(r.p) : 0.0;
  if (r.reflected) vx = -vx;
  return Pt{vx, vy};
}

VectorField lie_bracket(const VectorField& v, const VectorField& w) {
  const Manifold& m = v.manifold;
  if (w.manifold.spec.kind != m.spec.kind)
    throw InvalidParam("lie_bracket needs fields on the same manifold");
  std::array<Expr, 2> comp;
  for (int j = 0; j < m.dim; ++j) {
    Expr acc = Expr::number(0.0);
    for (int i = 0; i < m.dim; ++i)
      acc = acc + v.comp[i] * w.comp[j].derivative(i) -
            w.comp[i] * v.comp[j].derivative(i);
    comp[static_cast<std::size_t>(j)] = acc;
  }
  return make_vector_field(m, comp, merge_support(m, v.support, w.support));
}

Expr divergence(const VectorField& v) {
  Expr acc = v.comp[0].derivative(0);
  if (v.manifold.dim == 2) acc = acc + v.comp[1].derivative(1);
  return acc;
}

SampledVectorField sample_field(const Grid& g, const VectorField& v) {
  SampledVectorField out;
  out.dim = g.dim;
  for (int a = 0; a < g.dim; ++a)
    out.comp[a].resize(static_cast<std::size_t>(g.npts));
  for (long long idx = 0; idx < g.npts; ++idx) {
    const Pt p = g.point(idx);
    for (int a = 0; a < g.dim; ++a)
      out.comp[a][static_cast<std::size_t>(idx)] =
          v.comp[static_cast<std::size_t>(a)].eval(p);
  }
  return out;
}

}  // namespace mqm
