#include "mqm/flow.hpp"

#include <cmath>

namespace mqm {

namespace {

// velocity and divergence at a cover point
struct Rhs {
  double vx, vy, dv;
};

Rhs rhs_at(const VectorField& v, const Expr& div, const Pt& q) {
  const Reduction r = reduce_to_domain(v.manifold, q);
  double vx = v.comp[0].eval(r.p);
  const double vy = v.manifold.dim == 2 ? v.comp[1].eval(r.p) : 0.0;
  if (r.reflected) vx = -vx;
  return Rhs{vx, vy, div.eval(r.p)};
}

void check_state(const Manifold& m, const Pt& q, int step) {
  for (int a = 0; a < m.dim; ++a) {
    if (!std::isfinite(q[a]))
      throw IntegrationDiverged("orbit left the finite plane at step " +
                                std::to_string(step));
    const double lo = m.domain.lo[a], hi = m.domain.hi[a];
    if (m.edges[a].identified) {
      const double mid = 0.5 * (lo + hi);
      if (std::abs(q[a] - mid) > 64.0 * (hi - lo))
        throw IntegrationDiverged("orbit wound more than 64 periods along axis " +
                                  std::to_string(a));
    } else {
      // small margin so that finite-difference probes next to the open edge
      // (where the field vanishes anyway) do not trip the check
      const double slack = 0.05 * (hi - lo);
      if (q[a] < lo - slack || q[a] > hi + slack)
        throw IntegrationDiverged("orbit left the domain along axis " +
                                  std::to_string(a) + " at step " +
                                  std::to_string(step));
    }
  }
}

}  // namespace

FlowMap::FlowMap(const VectorField& v, double lambda, int steps)
    : v_(v), div_(divergence(v)), lambda_(lambda), steps_(steps) {
  if (steps < 16) throw InvalidParam("flow integration needs at least 16 steps");
  if (!std::isfinite(lambda)) throw InvalidParam("flow parameter must be finite");
}

Pt FlowMap::integrate(const Pt& x0, double lam, double* log_jac) const {
  if (v_.support) {
    const Reduction r0 = reduce_to_domain(v_.manifold, x0);
    if (!v_.support->contains_closed(r0.p)) {
      if (log_jac) *log_jac = 0.0;
      return x0;  // the orbit never leaves a zero of the field
    }
  }
  const double dt = lam / static_cast<double>(steps_);
  Pt q = x0;
  if (v_.manifold.dim == 1) q[1] = 0.0;
  double l = 0.0;
  for (int s = 0; s < steps_; ++s) {
    const Rhs k1 = rhs_at(v_, div_, q);
    const Pt q2{q[0] + 0.5 * dt * k1.vx, q[1] + 0.5 * dt * k1.vy};
    const Rhs k2 = rhs_at(v_, div_, q2);
    const Pt q3{q[0] + 0.5 * dt * k2.vx, q[1] + 0.5 * dt * k2.vy};
    const Rhs k3 = rhs_at(v_, div_, q3);
    const Pt q4{q[0] + dt * k3.vx, q[1] + dt * k3.vy};
    const Rhs k4 = rhs_at(v_, div_, q4);
    q[0] += dt / 6.0 * (k1.vx + 2.0 * k2.vx + 2.0 * k3.vx + k4.vx);
    q[1] += dt / 6.0 * (k1.vy + 2.0 * k2.vy + 2.0 * k3.vy + k4.vy);
    l += dt / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
    check_state(v_.manifold, q, s);
  }
  if (log_jac) *log_jac = l;
  return q;
}

Pt FlowMap::forward_cover(const Pt& x) const { return integrate(x, lambda_, nullptr); }

Pt FlowMap::backward_cover(const Pt& x) const {
  return integrate(x, -lambda_, nullptr);
}

FlowMap::BackResult FlowMap::backward_with_logjac(const Pt& x) const {
  double l = 0.0;
  const Pt q = integrate(x, -lambda_, &l);
  // l was accumulated against the backward parameter; the orbit integral of
  // div v runs the other way
  return BackResult{q, -l};
}

FlowEndpoint flow(const VectorField& v, double lambda, const Pt& x, int steps) {
  const FlowMap fm(v, lambda, steps);
  const Pt q = fm.forward_cover(x);
  const Reduction r = reduce_to_domain(v.manifold, q);
  return FlowEndpoint{r.p, r.cls};
}

double jacobian_factor(const VectorField& v, double lambda, const Pt& x, int steps) {
  const FlowMap fm(v, lambda, steps);
  return std::exp(-0.5 * fm.backward_with_logjac(x).log_jac);
}

SampledVectorField pushforward_field(const Grid& g, const FlowMap& flow,
                                     const VectorField& w) {
  SampledVectorField out;
  out.dim = g.dim;
  for (int a = 0; a < g.dim; ++a)
    out.comp[a].resize(static_cast<std::size_t>(g.npts));
  for (long long idx = 0; idx < g.npts; ++idx) {
    const Pt x = g.point(idx);
    const Pt y = flow.backward_cover(x);
    const Pt wv = eval_vector_cover(w, y);
    double dg[2][2] = {{1.0, 0.0}, {0.0, 1.0}};  // dg[i][j] = d g_i / d y_j
    for (int j = 0; j < g.dim; ++j) {
      const double delta = g.h[j] / 4.0;
      Pt yp = y, ym = y;
      yp[j] += delta;
      ym[j] -= delta;
      const Pt fp = flow.forward_cover(yp);
      const Pt fm = flow.forward_cover(ym);
      for (int i = 0; i < g.dim; ++i) dg[i][j] = (fp[i] - fm[i]) / (2.0 * delta);
    }
    for (int i = 0; i < g.dim; ++i) {
      double acc = 0.0;
      for (int j = 0; j < g.dim; ++j) acc += dg[i][j] * wv[j];
      out.comp[i][static_cast<std::size_t>(idx)] = acc;
    }
  }
  return out;
}

}  // namespace mqm
