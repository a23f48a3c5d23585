#include "mqm/operators.hpp"

#include <cmath>
#include <map>

namespace mqm {

namespace {

struct StencilEntry {
  int off;
  double coef;
};

std::vector<StencilEntry> d1_coeffs(int order, double h) {
  if (order == 2) return {{1, 1.0 / (2.0 * h)}};
  if (order == 4) return {{1, 8.0 / (12.0 * h)}, {2, -1.0 / (12.0 * h)}};
  throw InvalidParam("stencil order must be 2 or 4, got " + std::to_string(order));
}

std::vector<StencilEntry> d2_coeffs(int order, double h) {
  const double h2 = h * h;
  if (order == 2) return {{0, -2.0 / h2}, {1, 1.0 / h2}};
  if (order == 4)
    return {{0, -30.0 / (12.0 * h2)}, {1, 16.0 / (12.0 * h2)}, {2, -1.0 / (12.0 * h2)}};
  throw InvalidParam("stencil order must be 2 or 4, got " + std::to_string(order));
}

struct FiberCache {
  const Pi1Representation* rep;
  std::map<std::pair<long long, long long>, Mat> mats;

  const Mat& get(const HomotopyClass& c) {
    const auto key = std::make_pair(c.m, c.n);
    auto it = mats.find(key);
    if (it == mats.end()) it = mats.emplace(key, evaluate_rep(*rep, c)).first;
    return it->second;
  }
};

// Stencil matrix along one axis. antisym flags the first-derivative sign
// convention (entry -coef at -off); symmetric stencils list offset 0
// explicitly.
SpMat axis_matrix(const Grid& g, int axis, const std::vector<StencilEntry>& entries,
                  bool antisym, const Pi1Representation* rep) {
  if (axis < 0 || axis >= g.dim)
    throw InvalidParam("derivative axis " + std::to_string(axis) +
                       " out of range on a " + std::to_string(g.dim) +
                       "-d manifold");
  if (rep && pres_kind(rep->presentation) != g.m.pk())
    throw PresentationMismatch("representation does not match the deck group");
  const int k = rep ? rep->fiber_dim : 1;
  const long long N = g.npts * k;
  FiberCache cache{rep, {}};
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(N) * (2 * entries.size() + 1));
  for (long long ix = 0; ix < g.n[0]; ++ix) {
    for (long long iy = 0; iy < g.n[1]; ++iy) {
      const long long row = g.index(ix, iy);
      for (const StencilEntry& e : entries) {
        if (e.off == 0) {
          for (int f = 0; f < k; ++f)
            trips.emplace_back(row * k + f, row * k + f, e.coef);
          continue;
        }
        for (const int sgn : {1, -1}) {
          long long jx = ix, jy = iy;
          (axis == 0 ? jx : jy) += sgn * e.off;
          const IndexReduction r = reduce_index(g, jx, jy);
          if (!r.inside) continue;
          const long long col = g.index(r.ix, r.iy);
          const double c = antisym && sgn < 0 ? -e.coef : e.coef;
          if (!rep) {
            trips.emplace_back(row, col, c);
          } else if (r.cls.is_identity()) {
            for (int f = 0; f < k; ++f)
              trips.emplace_back(row * k + f, col * k + f, c);
          } else {
            const Mat& R = cache.get(r.cls);
            for (int fr = 0; fr < k; ++fr)
              for (int fc = 0; fc < k; ++fc) {
                const cxd val = c * R(fr, fc);
                if (val != cxd(0.0, 0.0))
                  trips.emplace_back(row * k + fr, col * k + fc, val);
              }
          }
        }
      }
    }
  }
  SpMat D(N, N);
  D.setFromTriplets(trips.begin(), trips.end());
  D.makeCompressed();
  return D;
}

void check_momentum_support(const Grid& g, const VectorField& v) {
  const Manifold& m = g.m;
  for (int a = 0; a < m.dim; ++a) {
    if (m.axis_identified(a)) continue;
    const double margin = 4.0 * g.h[a];
    if (v.support) {
      if (v.support->lo[a] < m.domain.lo[a] + margin ||
          v.support->hi[a] > m.domain.hi[a] - margin)
        throw SupportViolation("support box must stay 4h = " + fmt17(margin) +
                               " away from the open edge of axis " +
                               std::to_string(a));
    } else {
      // no box: the sampled field itself must vanish on the margin rows
      double max_abs = 0.0, edge_abs = 0.0;
      for (long long idx = 0; idx < g.npts; ++idx) {
        const Pt p = g.point(idx);
        for (int j = 0; j < m.dim; ++j) {
          const double val = std::abs(v.comp[static_cast<std::size_t>(j)].eval(p));
          max_abs = std::max(max_abs, val);
          if (p[a] < m.domain.lo[a] + margin || p[a] > m.domain.hi[a] - margin)
            edge_abs = std::max(edge_abs, val);
        }
      }
      if (edge_abs > 1e-12 * (1.0 + max_abs))
        throw SupportViolation("field does not vanish within 4h of the open edge "
                               "of axis " +
                               std::to_string(a) + " (|value| = " + fmt17(edge_abs) +
                               ")");
    }
  }
}

}  // namespace

DerivativeStencil first_derivative(const Grid& g, int axis, int order,
                                   const Pi1Representation* rep) {
  DerivativeStencil s;
  s.axis = axis;
  s.order = order;
  s.D = axis_matrix(g, axis, d1_coeffs(order, g.h[axis]), true, rep);
  return s;
}

SpMat second_derivative(const Grid& g, int axis, int order,
                        const Pi1Representation* rep) {
  return axis_matrix(g, axis, d2_coeffs(order, g.h[axis]), false, rep);
}

LinOp mult_op(const Grid& g, const ScalarField& f, const Pi1Representation* rep) {
  if (f.manifold.spec.kind != g.m.spec.kind)
    throw InvalidParam("field and grid live on different manifolds");
  if (f.role != ScalarField::Role::Observable)
    throw InvalidParam("potentials are not observables; they enter through the "
                       "hamiltonian only");
  const int k = rep ? rep->fiber_dim : 1;
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(g.npts) * k);
  for (long long idx = 0; idx < g.npts; ++idx) {
    const double val = f.expr.eval(g.point(idx));
    for (int fb = 0; fb < k; ++fb)
      trips.emplace_back(idx * k + fb, idx * k + fb, val);
  }
  SpMat M(g.npts * k, g.npts * k);
  M.setFromTriplets(trips.begin(), trips.end());
  M.makeCompressed();
  return LinOp::sparse(std::move(M), LinOp::Flag::Hermitian);
}

LinOp momentum_op_sampled(const Grid& g, const SampledVectorField& sv, int order,
                          const Pi1Representation* rep) {
  if (sv.dim != g.dim)
    throw DimensionMismatch("sampled field dimension does not match the grid");
  const int k = rep ? rep->fiber_dim : 1;
  const long long N = g.npts * k;
  SpMat T(N, N);
  for (int a = 0; a < g.dim; ++a) {
    const SpMat D = axis_matrix(g, a, d1_coeffs(order, g.h[a]), true, rep);
    const auto& mv = sv.comp[a];
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(D.nonZeros()));
    for (int outer = 0; outer < D.outerSize(); ++outer)
      for (SpMat::InnerIterator it(D, outer); it; ++it) {
        const long long pr = it.row() / k, pc = it.col() / k;
        const cxd val = cxd(0.0, -0.5) *
                        (mv[static_cast<std::size_t>(pr)] +
                         mv[static_cast<std::size_t>(pc)]) *
                        it.value();
        if (val != cxd(0.0, 0.0)) trips.emplace_back(it.row(), it.col(), val);
      }
    SpMat Ta(N, N);
    Ta.setFromTriplets(trips.begin(), trips.end());
    T = (a == 0) ? Ta : SpMat(T + Ta);
  }
  T.makeCompressed();
  return LinOp::sparse(std::move(T), LinOp::Flag::Hermitian);
}

LinOp momentum_op(const Grid& g, const VectorField& v, int order,
                  const Pi1Representation* rep) {
  if (v.manifold.spec.kind != g.m.spec.kind)
    throw InvalidParam("field and grid live on different manifolds");
  check_momentum_support(g, v);
  return momentum_op_sampled(g, sample_field(g, v), order, rep);
}

std::optional<std::array<long long, 2>> exact_shift_steps(const Grid& g,
                                                          const VectorField& v,
                                                          double lambda) {
  if (v.support) return std::nullopt;
  std::array<long long, 2> s{0, 0};
  for (int a = 0; a < g.dim; ++a) {
    const Expr& c = v.comp[static_cast<std::size_t>(a)];
    if (!c.is_constant()) return std::nullopt;
    const double val = c.eval(Pt{g.m.domain.lo[0], g.m.domain.lo[1]});
    if (!g.m.axis_identified(a)) {
      if (val != 0.0) return std::nullopt;  // constant flow on an open axis
      continue;
    }
    const double steps = lambda * val / g.h[a];
    const double r = std::nearbyint(steps);
    if (std::abs(steps - r) > 1e-9 * std::max(1.0, std::abs(steps)))
      return std::nullopt;
    s[a] = static_cast<long long>(r);
  }
  return s;
}

LinOp unitary(const Grid& g, const VectorField& v, double lambda, int order) {
  if (const auto sh = exact_shift_steps(g, v, lambda)) {
    // volume preserving, so the pullback permutation is the whole operator
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(g.npts));
    for (long long ix = 0; ix < g.n[0]; ++ix)
      for (long long iy = 0; iy < g.n[1]; ++iy) {
        const IndexReduction r = reduce_index(g, ix - (*sh)[0], iy - (*sh)[1]);
        trips.emplace_back(g.index(ix, iy), g.index(r.ix, r.iy), 1.0);
      }
    SpMat U(g.npts, g.npts);
    U.setFromTriplets(trips.begin(), trips.end());
    U.makeCompressed();
    return LinOp::sparse(std::move(U), LinOp::Flag::Unitary);
  }
  return unitary_exp(momentum_op(g, v, order), lambda);
}

// --- residual suites --------------------------------------------------------

namespace {

std::string field_str(const VectorField& v) {
  std::string s = v.comp[0].str();
  if (v.manifold.dim == 2) s += " ; " + v.comp[1].str();
  return s;
}

std::optional<Box> product_support(const Manifold& m, const std::optional<Box>& a,
                                   const std::optional<Box>& b) {
  if (!a) return b;
  if (!b) return a;
  Box x;
  x.dim = m.dim;
  bool nonempty = true;
  for (int ax = 0; ax < m.dim; ++ax) {
    x.lo[ax] = std::max(a->lo[ax], b->lo[ax]);
    x.hi[ax] = std::min(a->hi[ax], b->hi[ax]);
    if (!(x.lo[ax] < x.hi[ax])) nonempty = false;
  }
  // disjoint boxes: the product vanishes identically, either box contains it
  return nonempty ? x : a;
}

void fill_ratios(CheckReport& rep) {
  // ratios within each named sub-check, across successive records
  std::map<std::string, std::vector<double>> by_name;
  std::vector<std::string> order;
  for (const ResidualRecord& r : rep.records) {
    if (by_name.find(r.check) == by_name.end()) order.push_back(r.check);
    by_name[r.check].push_back(r.residual);
  }
  for (const std::string& name : order) {
    const auto& v = by_name[name];
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
      rep.ratios.push_back(v[i] / std::max(v[i + 1], 1e-300));
  }
}

bool ratios_within(const std::vector<double>& ratios, double lo, double hi) {
  for (double r : ratios)
    if (!(r >= lo && r <= hi)) return false;
  return true;
}

}  // namespace

CheckReport check_lr_relation(const Manifold& m, const ScalarField& f,
                              const VectorField& v, const LrCheckOptions& opt) {
  if (opt.resolutions.empty())
    throw InvalidParam("need at least one resolution for the relation check");
  CheckReport rep;
  rep.check = "lr-relation";
  // The defect operator has entries proportional to (forward difference of
  // f) * (forward difference of v) / h, so its operator norm is attained on
  // lattice-scale modes and only shrinks at first order. On fixed
  // band-limited states the defect is second order, which is the statement
  // with a continuum meaning; measure that, like the other probe checks.
  const ProbeFamily probes = make_probes(m, 1, opt.probes, opt.seed);
  for (const int n : opt.resolutions) {
    const Grid g = make_grid(m, n);
    std::array<Expr, 2> pcomp;
    for (int j = 0; j < m.dim; ++j)
      pcomp[static_cast<std::size_t>(j)] =
          f.expr * v.comp[static_cast<std::size_t>(j)];
    const VectorField fv =
        make_vector_field(m, pcomp, product_support(m, f.support, v.support));
    const LinOp Tfv = momentum_op(g, fv, opt.order);
    const LinOp Tv = momentum_op(g, v, opt.order);
    const LinOp Mf = mult_op(g, f);
    double num = 0.0, den = 0.0;
    for (const Vec& phi : probes.sample(g)) {
      const Vec e = Tfv.apply(phi) - 0.5 * (Mf.apply(Tv.apply(phi)) +
                                            Tv.apply(Mf.apply(phi)));
      num = std::max(num, e.norm());
      den = std::max(den, Tfv.apply(phi).norm());
    }
    ResidualRecord r;
    r.check = "lr-relation";
    r.params = {{"f", f.expr.str()},
                {"v", field_str(v)},
                {"order", std::to_string(opt.order)},
                {"relative", "false"}};
    r.resolution = std::to_string(n);
    r.residual = num;
    r.scale = den;
    r.norm_kind = "probe-max-l2";
    rep.records.push_back(std::move(r));
  }
  fill_ratios(rep);
  bool exact = true;
  for (const auto& r : rep.records) exact = exact && r.residual <= 1e-10;
  const double last = rep.records.back().residual;
  rep.pass = exact || (last <= opt.tol &&
                       ratios_within(rep.ratios, opt.ratio_lo, opt.ratio_hi));
  rep.detail = "final residual " + fmt17(last);
  return rep;
}

CheckReport check_resolvent_identities(const Manifold& m, const VectorField& v,
                                       const ResolventCheckOptions& opt) {
  CheckReport rep;
  rep.check = "resolvent-identities";
  const Grid g = make_grid(m, opt.resolution);
  const LinOp T = LinOp::dense(momentum_op(g, v, opt.order).to_dense(4096),
                               LinOp::Flag::Hermitian);
  const LinOp R = resolvent(T);
  const Mat& Rm = R.D;
  const Mat Rh = Rm.adjoint();
  const Mat id = Mat::Identity(T.n, T.n);
  const cxd two_i(0.0, 2.0);

  auto push = [&rep, &opt](const std::string& name, double resid,
                           std::map<std::string, std::string> params) {
    ResidualRecord r;
    r.check = name;
    r.params = std::move(params);
    r.params["relative"] = "false";
    r.resolution = std::to_string(opt.resolution);
    r.residual = resid;
    r.scale = 1.0;
    r.norm_kind = "spectral";
    rep.records.push_back(std::move(r));
  };

  const auto snorm = [](const Mat& a) { return spectral_norm(LinOp::dense(a)); };

  push("resolvent-skew", snorm(Rm - Rh - two_i * (Rm * Rh)), {});
  push("resolvent-skew-alt", snorm(Rm - Rh - two_i * (Rh * Rm)), {});
  {
    const LinOp Tneg = LinOp::dense(Mat(-T.D), LinOp::Flag::Hermitian);
    const LinOp Rneg = resolvent(Tneg);
    push("resolvent-reflect", snorm(Rh + Rneg.D), {});
  }
  const double rnorm = spectral_norm(R);
  push("resolvent-contraction", std::max(0.0, rnorm - 1.0), {});

  const Mat R2 = Rm * Rm;
  for (const double lam : opt.lambdas) {
    const LinOp U = unitary_exp(T, lam);
    const Mat E =
        (cxd(0.0, 1.0) / lam * (U.D - id) - cxd(0.0, 1.0) * id) * R2 - Rm;
    push("resolvent-limit", snorm(E), {{"lambda", fmt17(lam)}});
  }
  fill_ratios(rep);

  bool exact_ok = true;
  for (const auto& r : rep.records)
    if (r.check != "resolvent-limit") exact_ok = exact_ok && r.residual <= opt.tol_exact;
  rep.pass = exact_ok && ratios_within(rep.ratios, opt.ratio_lo, opt.ratio_hi);
  rep.detail = "resolvent norm " + fmt17(rnorm);
  return rep;
}

CheckReport check_covariance(const Manifold& m, const VectorField& v, double lambda,
                             const ScalarField& f, const VectorField& w,
                             const CovarianceCheckOptions& opt) {
  if (opt.resolutions.empty())
    throw InvalidParam("need at least one resolution for the covariance check");
  CheckReport rep;
  rep.check = "covariance";
  const ProbeFamily probes = make_probes(m, 1, opt.probes, opt.seed);
  bool shift_route = true;
  for (const int n : opt.resolutions) {
    const Grid g = make_grid(m, n);
    const auto sh = exact_shift_steps(g, v, lambda);
    shift_route = shift_route && sh.has_value();
    const std::string route = sh ? "shift" : "exp";
    const LinOp U = unitary(g, v, lambda, opt.order);
    const FlowMap fm(v, lambda, opt.steps);
    const std::vector<Vec> states = probes.sample(g);

    // transported multiplication operator
    const LinOp Mf = mult_op(g, f);
    Vec fg(g.npts);
    for (long long idx = 0; idx < g.npts; ++idx)
      fg(idx) = eval_scalar_cover(f, fm.backward_cover(g.point(idx)));
    double res_fun = 0.0, scale_fun = 0.0;
    for (const Vec& phi : states) {
      const Vec a = U.apply(Mf.apply(U.apply_adjoint(phi)));
      const Vec b = fg.asDiagonal() * phi;
      res_fun = std::max(res_fun, (a - b).norm());
      scale_fun = std::max(scale_fun, b.norm());
    }
    ResidualRecord r1;
    r1.check = "covariance-mult";
    r1.params = {{"f", f.expr.str()},
                 {"v", field_str(v)},
                 {"lambda", fmt17(lambda)},
                 {"route", route},
                 {"relative", "false"}};
    r1.resolution = std::to_string(n);
    r1.residual = res_fun;
    r1.scale = scale_fun;
    r1.norm_kind = "probe-max-l2";
    rep.records.push_back(std::move(r1));

    // transported resolvent
    const LinOp Tw = LinOp::dense(momentum_op(g, w, opt.order).to_dense(4096),
                                  LinOp::Flag::Hermitian);
    const LinOp Rw = resolvent(Tw);
    const SampledVectorField pw = pushforward_field(g, fm, w);
    const LinOp Tgw = LinOp::dense(
        momentum_op_sampled(g, pw, opt.order).to_dense(4096), LinOp::Flag::Hermitian);
    const LinOp Rgw = resolvent(Tgw);
    double res_rsv = 0.0, scale_rsv = 0.0;
    for (const Vec& phi : states) {
      const Vec a = U.apply(Rw.apply(U.apply_adjoint(phi)));
      const Vec b = Rgw.apply(phi);
      res_rsv = std::max(res_rsv, (a - b).norm());
      scale_rsv = std::max(scale_rsv, b.norm());
    }
    ResidualRecord r2;
    r2.check = "covariance-resolvent";
    r2.params = {{"w", field_str(w)},
                 {"v", field_str(v)},
                 {"lambda", fmt17(lambda)},
                 {"route", route},
                 {"relative", "false"}};
    r2.resolution = std::to_string(n);
    r2.residual = res_rsv;
    r2.scale = scale_rsv;
    r2.norm_kind = "probe-max-l2";
    rep.records.push_back(std::move(r2));
  }
  fill_ratios(rep);
  if (shift_route) {
    rep.pass = true;
    for (const auto& r : rep.records)
      rep.pass = rep.pass && r.residual <= opt.tol_exact_shift;
    rep.detail = "exact pullback permutation route";
  } else {
    rep.pass = true;
    for (const double q : rep.ratios) rep.pass = rep.pass && q >= opt.min_ratio;
    rep.detail = "grid-doubling improvement ratios";
  }
  return rep;
}

CheckReport check_lie_relations(const Manifold& m, const VectorField& v,
                                const VectorField& w, const LieCheckOptions& opt) {
  if (opt.resolutions.empty())
    throw InvalidParam("need at least one resolution for the bracket check");
  CheckReport rep;
  rep.check = "lie-relations";
  const ProbeFamily probes = make_probes(m, 1, opt.probes, opt.seed);
  const VectorField br = lie_bracket(v, w);
  for (const int n : opt.resolutions) {
    const Grid g = make_grid(m, n);
    const LinOp Tv = momentum_op(g, v, opt.order);
    const LinOp Tw = momentum_op(g, w, opt.order);
    const LinOp Tb = momentum_op(g, br, opt.order);
    double res = 0.0, scale = 0.0;
    for (const Vec& phi : probes.sample(g)) {
      const Vec e =
          Tv.apply(Tw.apply(phi)) - Tw.apply(Tv.apply(phi)) + cxd(0.0, 1.0) * Tb.apply(phi);
      res = std::max(res, e.norm());
      scale = std::max(scale, Tb.apply(phi).norm());
    }
    ResidualRecord r;
    r.check = "lie-bracket";
    r.params = {{"v", field_str(v)},
                {"w", field_str(w)},
                {"bracket", field_str(br)},
                {"order", std::to_string(opt.order)},
                {"relative", "false"}};
    r.resolution = std::to_string(n);
    r.residual = res;
    r.scale = scale;
    r.norm_kind = "probe-max-l2";
    rep.records.push_back(std::move(r));
  }
  fill_ratios(rep);
  bool exact = true;
  for (const auto& r : rep.records) exact = exact && r.residual <= opt.tol_abs;
  rep.pass = exact || ratios_within(rep.ratios, opt.min_ratio,
                                    std::numeric_limits<double>::infinity());
  rep.detail = "final residual " + fmt17(rep.records.back().residual);
  return rep;
}

}  // namespace mqm
