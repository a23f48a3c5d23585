#include "mqm/repspace.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>

#include "mqm/spectra.hpp"

namespace mqm {

RepSpace build_space(const Manifold& m, const Pi1Representation& rep,
                     const std::array<int, 2>& n) {
  if (pres_kind(rep.presentation) != m.pk() ||
      rep.presentation.n_generators() != m.presentation.n_generators())
    throw PresentationMismatch("representation was built for a different deck "
                               "group than " +
                               kind_name(m.spec.kind));
  RepSpace s;
  s.grid = make_grid(m, n);
  s.rep = rep;
  s.k = rep.fiber_dim;
  s.dim = s.grid.npts * rep.fiber_dim;
  return s;
}

LinOp rep_momentum(const RepSpace& s, const VectorField& v, int order) {
  return momentum_op(s.grid, v, order, &s.rep);
}

LinOp rep_momentum_sampled(const RepSpace& s, const SampledVectorField& v, int order) {
  return momentum_op_sampled(s.grid, v, order, &s.rep);
}

LinOp rep_mult(const RepSpace& s, const ScalarField& f) {
  return mult_op(s.grid, f, &s.rep);
}

namespace {

// 4-point Lagrange weights at offset t in [0,1) from the second node.
std::array<double, 4> cubic_weights(double t) {
  return {-t * (t - 1.0) * (t - 2.0) / 6.0, (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
          -(t + 1.0) * t * (t - 2.0) / 2.0, (t + 1.0) * t * (t - 1.0) / 6.0};
}

LinOp transport_unitary(const RepSpace& s, const VectorField& v, double lambda,
                        int steps) {
  const Grid& g = s.grid;
  const int k = s.k;
  const FlowMap fm(v, lambda, steps);
  std::map<std::pair<long long, long long>, Mat> cache;
  const auto fiber = [&cache, &s](const HomotopyClass& c) -> const Mat& {
    const auto key = std::make_pair(c.m, c.n);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, evaluate_rep(s.rep, c)).first;
    return it->second;
  };
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(g.npts) * 16 * k * k);
  const int nodes1 = g.dim == 2 ? 4 : 1;
  for (long long idx = 0; idx < g.npts; ++idx) {
    const Pt x = g.point(idx);
    const auto back = fm.backward_with_logjac(x);
    const double J = std::exp(-0.5 * back.log_jac);
    std::array<long long, 2> base{0, 0};
    std::array<std::array<double, 4>, 2> wts{};
    for (int a = 0; a < g.dim; ++a) {
      const double sa = (back.q[a] - g.m.domain.lo[a]) / g.h[a];
      base[a] = ifloor(sa);
      wts[a] = cubic_weights(sa - static_cast<double>(base[a]));
    }
    for (int u = 0; u < 4; ++u) {
      for (int w2 = 0; w2 < nodes1; ++w2) {
        const double wgt =
            wts[0][static_cast<std::size_t>(u)] *
            (g.dim == 2 ? wts[1][static_cast<std::size_t>(w2)] : 1.0);
        if (wgt == 0.0) continue;
        const long long jx = base[0] - 1 + u;
        const long long jy = g.dim == 2 ? base[1] - 1 + w2 : 0;
        const IndexReduction r = reduce_index(g, jx, jy);
        if (!r.inside) continue;
        const long long col = g.index(r.ix, r.iy);
        const cxd val = J * wgt;
        if (r.cls.is_identity()) {
          for (int f = 0; f < k; ++f)
            trips.emplace_back(idx * k + f, col * k + f, val);
        } else {
          const Mat& R = fiber(r.cls);
          for (int fr = 0; fr < k; ++fr)
            for (int fc = 0; fc < k; ++fc) {
              const cxd e = val * R(fr, fc);
              if (e != cxd(0.0, 0.0))
                trips.emplace_back(idx * k + fr, col * k + fc, e);
            }
        }
      }
    }
  }
  SpMat U(s.dim, s.dim);
  U.setFromTriplets(trips.begin(), trips.end());
  U.makeCompressed();
  // Interpolation damps sub-grid content (off-node cubic weights have
  // sum-of-squares < 1), so the matrix is an isometry only on band-limited
  // states; do not advertise it as unitary.
  return LinOp::sparse(std::move(U));
}

}  // namespace

LinOp rep_unitary_from_flow(const RepSpace& s, const VectorField& v, double lambda,
                            int steps, UnitaryRoute route) {
  if (route == UnitaryRoute::Transport) return transport_unitary(s, v, lambda, steps);
  return unitary_exp(rep_momentum(s, v), lambda);
}

Mat cocycle_fiber(const RepSpace& s, const VectorField& v, double lambda,
                  const Pt& x, int steps) {
  const FlowEndpoint fe = flow(v, lambda, x, steps);
  return evaluate_rep(s.rep, fe.cls).adjoint();
}

CheckReport check_cocycle(const RepSpace& s, const VectorField& vg, double lambda_g,
                          const VectorField& vh, double lambda_h,
                          const CocycleCheckOptions& opt) {
  CheckReport rep;
  rep.check = "cocycle";
  const Manifold& m = s.grid.m;
  const FlowMap fg(vg, lambda_g, opt.steps);
  const FlowMap fh(vh, lambda_h, opt.steps);
  Rng rng(opt.seed);
  double worst = 0.0;
  int wraps = 0;
  for (int i = 0; i < opt.samples; ++i) {
    Pt x{0.0, 0.0};
    for (int a = 0; a < m.dim; ++a)
      x[a] = rng.uniform(m.domain.lo[a] + 0.01 * m.extent(a),
                         m.domain.hi[a] - 0.01 * m.extent(a));
    const Pt q1 = fh.forward_cover(x);
    const HomotopyClass cls_h = reduce_to_domain(m, q1).cls;
    const Pt q2 = fg.forward_cover(q1);
    const HomotopyClass cls_total = reduce_to_domain(m, q2).cls;
    const HomotopyClass cls_g = cls_h.inverse().compose(cls_total);
    const Mat Vh = evaluate_rep(s.rep, cls_h).adjoint();
    const Mat Vg = evaluate_rep(s.rep, cls_g).adjoint();
    const Mat Vgh = evaluate_rep(s.rep, cls_total).adjoint();
    worst = std::max(worst, (Vg * Vh - Vgh).norm());
    if (!cls_h.is_identity() || !cls_g.is_identity()) ++wraps;
  }
  ResidualRecord r;
  r.check = "cocycle";
  r.params = {{"samples", std::to_string(opt.samples)},
              {"wrapping", std::to_string(wraps)},
              {"relative", "false"}};
  r.resolution = std::to_string(s.grid.n[0]);
  r.residual = worst;
  r.scale = 1.0;
  r.norm_kind = "max-abs";
  rep.records.push_back(std::move(r));
  rep.pass = worst <= opt.tol;
  rep.detail = std::to_string(wraps) + " of " + std::to_string(opt.samples) +
               " orbits wrap";
  return rep;
}

CheckReport check_locally_schroedinger(const RepSpace& s, const Box& box,
                                       const LocalCheckOptions& opt) {
  CheckReport rep;
  rep.check = "locally-schroedinger";
  const Grid& g = s.grid;
  const Manifold& m = g.m;
  if (box.dim != m.dim) throw InvalidParam("window box dimension mismatch");
  for (int a = 0; a < m.dim; ++a) {
    const double margin = 4.0 * g.h[a];
    if (box.lo[a] < m.domain.lo[a] + margin || box.hi[a] > m.domain.hi[a] - margin)
      throw BoxTouchesEdge("window box must stay 4h inside the fundamental "
                           "domain along axis " +
                           std::to_string(a));
  }
  const RepSpace s0 = build_space(m, trivial_rep(m), g.n);

  // box-supported observables
  std::array<Expr, 2> bump_arg;
  Expr fexpr = Expr::number(1.0);
  for (int a = 0; a < m.dim; ++a) {
    const double c = 0.5 * (box.lo[a] + box.hi[a]);
    const double hw = 0.5 * box.extent(a);
    bump_arg[static_cast<std::size_t>(a)] =
        (Expr::variable(a) - Expr::number(c)) / Expr::number(hw);
    fexpr = fexpr * Expr::bump(bump_arg[static_cast<std::size_t>(a)]);
  }
  const ScalarField f = make_scalar_field(m, fexpr, box);
  std::array<Expr, 2> vcomp;
  vcomp[0] = fexpr;
  if (m.dim == 2) vcomp[1] = Expr::number(0.6) * fexpr;
  const VectorField v = make_vector_field(m, vcomp, box);

  double vmax = 0.0;
  for (long long idx = 0; idx < g.npts; ++idx)
    vmax = std::max(vmax, std::abs(fexpr.eval(g.point(idx))));
  double min_gap = std::numeric_limits<double>::infinity();
  for (int a = 0; a < m.dim; ++a)
    min_gap = std::min({box.extent(a), box.lo[a] - m.domain.lo[a],
                        m.domain.hi[a] - box.hi[a]});
  const double lam = 0.2 * min_gap / std::max(vmax, 1e-12);

  const std::array<LinOp, 3> tw{rep_mult(s, f), rep_momentum(s, v),
                                rep_unitary_from_flow(s, v, lam, 64)};
  const std::array<LinOp, 3> un{rep_mult(s0, f), rep_momentum(s0, v),
                                rep_unitary_from_flow(s0, v, lam, 64)};

  const ProbeFamily probes = make_probes(m, 1, opt.probes, opt.seed, box);
  const std::vector<Vec> scal = probes.sample(s0.grid);
  const int k = s.k;
  double worst = 0.0;
  for (std::size_t op = 0; op < tw.size(); ++op) {
    for (std::size_t i = 0; i < scal.size(); ++i) {
      for (std::size_t j = 0; j < scal.size(); ++j) {
        const cxd base = scal[i].dot(un[op].apply(scal[j]));
        for (int fa = 0; fa < k; ++fa)
          for (int fb = 0; fb < k; ++fb) {
            Vec pa = Vec::Zero(s.dim), pb = Vec::Zero(s.dim);
            for (long long idx = 0; idx < g.npts; ++idx) {
              pa(idx * k + fa) = scal[i](idx);
              pb(idx * k + fb) = scal[j](idx);
            }
            const cxd got = pa.dot(tw[op].apply(pb));
            const cxd expect = fa == fb ? base : cxd(0.0, 0.0);
            worst = std::max(worst, std::abs(got - expect));
          }
      }
    }
  }
  ResidualRecord r1;
  r1.check = "local-matrix-elements";
  r1.params = {{"box", fmt17(box.lo[0]) + ".." + fmt17(box.hi[0])},
               {"relative", "false"}};
  r1.resolution = std::to_string(g.n[0]);
  r1.residual = worst;
  r1.scale = 1.0;
  r1.norm_kind = "max-abs";
  rep.records.push_back(std::move(r1));

  // Dirichlet spectrum of the sub-box
  std::vector<long long> inside;
  for (long long idx = 0; idx < g.npts; ++idx)
    if (box.contains_closed(g.point(idx))) inside.push_back(idx);
  const long long nin = static_cast<long long>(inside.size());
  const Mat H_tw = hamiltonian(s, nullptr, 2).to_dense(8192);
  const Mat H_un = hamiltonian(s0, nullptr, 2).to_dense(8192);
  Mat sub_tw(nin * k, nin * k);
  Mat sub_un(nin, nin);
  for (long long a = 0; a < nin; ++a)
    for (long long b = 0; b < nin; ++b) {
      sub_un(a, b) = H_un(inside[static_cast<std::size_t>(a)],
                          inside[static_cast<std::size_t>(b)]);
      for (int fa = 0; fa < k; ++fa)
        for (int fb = 0; fb < k; ++fb)
          sub_tw(a * k + fa, b * k + fb) =
              H_tw(inside[static_cast<std::size_t>(a)] * k + fa,
                   inside[static_cast<std::size_t>(b)] * k + fb);
    }
  Eigen::SelfAdjointEigenSolver<Mat> es_tw(sub_tw), es_un(sub_un);
  if (es_tw.info() != Eigen::Success || es_un.info() != Eigen::Success)
    throw SolveFailed("sub-box eigendecomposition failed");
  const int kk = std::min<int>(opt.spectrum_k, static_cast<int>(nin));
  double spec_diff = 0.0;
  for (int i = 0; i < kk; ++i)
    for (int c = 0; c < k; ++c)
      spec_diff = std::max(spec_diff, std::abs(es_tw.eigenvalues()(i * k + c) -
                                               es_un.eigenvalues()(i)));
  ResidualRecord r2;
  r2.check = "local-dirichlet-spectrum";
  r2.params = {{"levels", std::to_string(kk)}, {"relative", "false"}};
  r2.resolution = std::to_string(g.n[0]);
  r2.residual = spec_diff;
  r2.scale = 1.0;
  r2.norm_kind = "max-abs";
  rep.records.push_back(std::move(r2));

  rep.pass = worst <= opt.tol && spec_diff <= opt.tol * 1e3;
  rep.detail = "matrix elements " + fmt17(worst) + ", sub-box spectrum " +
               fmt17(spec_diff);
  return rep;
}

EquivalenceResult check_equivalence(const RepSpace& s1, const RepSpace& s2,
                                    std::vector<HomotopyClass> probe_classes) {
  const Manifold& m = s1.grid.m;
  if (s2.grid.m.spec.kind != m.spec.kind)
    throw PresentationMismatch("spaces live on different manifolds");
  if (s1.grid.n != s2.grid.n)
    throw DimensionMismatch("spaces use different grid resolutions");
  EquivalenceResult er;
  er.classes = probe_classes.empty() ? default_probe_classes(m)
                                     : std::move(probe_classes);
  bool has_identity = false;
  for (const auto& c : er.classes) has_identity = has_identity || c.is_identity();
  if (!has_identity)
    er.classes.insert(er.classes.begin(), HomotopyClass::identity(m.pk()));
  er.traces1 = conjugacy_invariants(s1.rep, er.classes);
  er.traces2 = conjugacy_invariants(s2.rep, er.classes);
  for (std::size_t i = 0; i < er.classes.size(); ++i)
    er.max_trace_diff =
        std::max(er.max_trace_diff, std::abs(er.traces1[i] - er.traces2[i]));

  if (s1.k != s2.k || er.max_trace_diff > 1e-6) {
    er.verdict = "distinct";
    return er;
  }
  const int k = std::min<long long>(10, s1.dim);
  const SpectrumResult sp1 = spectrum(s1, nullptr, 2, k);
  const SpectrumResult sp2 = spectrum(s2, nullptr, 2, k);
  for (int i = 0; i < k; ++i)
    er.max_eig_diff = std::max(
        er.max_eig_diff, std::abs(sp1.eigenvalues[static_cast<std::size_t>(i)] -
                                  sp2.eigenvalues[static_cast<std::size_t>(i)]) /
                             (1.0 + std::abs(sp1.eigenvalues[static_cast<std::size_t>(i)])));
  if (er.max_trace_diff <= 1e-10 && er.max_eig_diff <= 1e-6)
    er.verdict = "equivalent";
  else if (er.max_eig_diff > 1e-6)
    er.verdict = "distinct";
  else
    er.verdict = "inconclusive";
  return er;
}

}  // namespace mqm
