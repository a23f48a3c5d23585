#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <cstdio>

#include "mqm/repspace.hpp"

using namespace mqm;

namespace {
constexpr double kTau = 6.283185307179586;
const double kPi = 3.141592653589793;

Box box1(double lo, double hi) {
  Box b;
  b.dim = 1;
  b.lo = {lo, 0.0};
  b.hi = {hi, 0.0};
  return b;
}

Pi1Representation klein_swap_rep(const Manifold& k, double phi) {
  Mat ra(2, 2), rb(2, 2);
  ra.setZero();
  rb.setZero();
  ra(0, 0) = std::polar(1.0, phi);
  ra(1, 1) = std::polar(1.0, -phi);
  rb(0, 1) = 1.0;
  rb(1, 0) = 1.0;
  return rep_from_matrices(k, 2, {ra, rb}, "swap");
}
}  // namespace

TEST_CASE("building twisted spaces") {
  const Manifold c = make_manifold(ManifoldSpec::circle(kTau));
  const RepSpace s = build_space(c, rep_from_angles(c, {kPi}), {128, 1});
  CHECK(s.k == 1);
  CHECK(s.dim == 128);

  const Manifold k = make_manifold(ManifoldSpec::klein_bottle(kTau, kTau));
  const RepSpace sk = build_space(k, klein_swap_rep(k, kPi / 3), {16, 16});
  CHECK(sk.k == 2);
  CHECK(sk.dim == 512);

  // a representation of a different deck group is rejected
  CHECK_THROWS_AS(build_space(c, klein_swap_rep(k, kPi / 3), {64, 1}),
                  PresentationMismatch);
}

TEST_CASE("twisted momentum stays hermitian and reduces for the trivial rep") {
  const Manifold c = make_manifold(ManifoldSpec::circle(kTau));
  const VectorField v =
      make_vector_field(c, {parse_expr("0.8 + 0.3*sin(x)"), Expr()});
  const RepSpace twisted = build_space(c, rep_from_angles(c, {1.3}), {96, 1});
  const RepSpace plain = build_space(c, trivial_rep(c), {96, 1});
  const LinOp tt = rep_momentum(twisted, v);
  CHECK(hermiticity_residual(tt) < 1e-14);
  const Grid g = make_grid(c, 96);
  const Mat untwisted = momentum_op(g, v).to_dense();
  CHECK((rep_momentum(plain, v).to_dense() - untwisted).norm() < 1e-15);
  // away from the seam the twisted matrix carries the same entries
  const Mat tw = tt.to_dense();
  CHECK(std::abs(tw(40, 41) - untwisted(40, 41)) < 1e-15);
  CHECK(std::abs(tw(0, 95) - untwisted(0, 95)) > 1e-3);  // seam entry twisted
}

TEST_CASE("transport along a full loop realizes the character") {
  const Manifold c = make_manifold(ManifoldSpec::circle(kTau));
  const double theta = 0.7;
  const RepSpace s = build_space(c, rep_from_angles(c, {theta}), {256, 1});
  const VectorField one = make_vector_field(c, {parse_expr("1"), Expr()});
  const LinOp u = rep_unitary_from_flow(s, one, kTau, 256);
  Rng rng(3);
  Vec psi(s.dim);
  for (long long i = 0; i < s.dim; ++i) psi(i) = rng.cgauss();
  psi.normalize();
  const Vec got = u.apply(psi);
  const cxd phase = std::polar(1.0, -theta);
  CHECK((got - phase * psi).norm() < 1e-9);
}

// Samples of band-limited profiles made equivariant for a circle sector:
// psi(x + L) = e^{i theta} psi(x), the smoothness class transport is exact
// on. Plain periodic probes carry an O(1) mismatch across the seam and are
// not states of the twisted space in any continuum sense.
static std::vector<Vec> twist_smooth_probes(const RepSpace& s, double theta,
                                            int count, std::uint64_t seed) {
  std::vector<Vec> st = make_probes(s.grid.m, 1, count, seed).sample(s.grid);
  const double L = s.grid.m.extent(0);
  for (Vec& p : st)
    for (long long i = 0; i < s.grid.npts; ++i)
      p(i) *= std::polar(1.0, theta * s.grid.point(i)[0] / L);
  return st;
}

TEST_CASE("transport preserves norms of twist-smooth states") {
  const Manifold c = make_manifold(ManifoldSpec::circle(kTau));
  const VectorField v =
      make_vector_field(c, {parse_expr("0.8 + 0.3*sin(x)"), Expr()});
  // off-lattice interpolation makes no matrix-level unitarity promise
  const auto norm_dev = [&](int n) {
    const RepSpace s = build_space(c, rep_from_angles(c, {kPi / 2}), {n, 1});
    const LinOp u = rep_unitary_from_flow(s, v, 1.2, 256);
    CHECK(u.flag == LinOp::Flag::General);
    double worst = 0.0;
    for (const Vec& p : twist_smooth_probes(s, kPi / 2, 6, 4242))
      worst = std::max(worst, std::abs(u.apply(p).norm() - 1.0));
    return worst;
  };
  const double r128 = norm_dev(128);
  const double r256 = norm_dev(256);
  CHECK(r128 < 1e-5);          // measured ~1e-6 (interpolation order h^4)
  CHECK(r256 < 0.25 * r128);   // measured factor ~15 per halving
}

TEST_CASE("cocycle composition along concatenated flows") {
  const Manifold c = make_manifold(ManifoldSpec::circle(kTau));
  const RepSpace s = build_space(c, rep_from_angles(c, {kPi}), {128, 1});
  const VectorField vg =
      make_vector_field(c, {parse_expr("0.8 + 0.3*sin(x)"), Expr()});
  const VectorField vh =
      make_vector_field(c, {parse_expr("0.7 + 0.2*cos(x)"), Expr()});
  CocycleCheckOptions o;
  o.samples = 25;
  const CheckReport rep = check_cocycle(s, vg, 3.0, vh, 2.5, o);
  CHECK(rep.pass);
  REQUIRE(rep.records.size() == 1);
  CHECK(rep.records[0].residual < 1e-10);
  // the flows are long enough that some orbits wrap; the detail records it
  int wrapped = 0, total = 0;
  REQUIRE(std::sscanf(rep.detail.c_str(), "%d of %d", &wrapped, &total) == 2);
  CHECK(wrapped > 0);
  CHECK(total == 25);
}

TEST_CASE("cocycle fibers are representation values") {
  const Manifold c = make_manifold(ManifoldSpec::circle(kTau));
  const double theta = 1.1;
  const RepSpace s = build_space(c, rep_from_angles(c, {theta}), {128, 1});
  const VectorField one = make_vector_field(c, {parse_expr("1"), Expr()});
  // one full positive wrap: V_g(x) = R(a)^-1
  const Mat vg = cocycle_fiber(s, one, kTau, Pt{1.0, 0.0}, 256);
  CHECK(std::abs(vg(0, 0) - std::polar(1.0, -theta)) < 1e-12);
  // no wrap: identity
  const Mat vs = cocycle_fiber(s, one, 0.5, Pt{1.0, 0.0}, 64);
  CHECK(std::abs(vs(0, 0) - cxd(1.0, 0.0)) < 1e-12);
}

TEST_CASE("twisted operators look untwisted on localized data") {
  const Manifold c = make_manifold(ManifoldSpec::circle(kTau));
  const RepSpace s = build_space(c, rep_from_angles(c, {kPi / 2}), {256, 1});
  const CheckReport rep = check_locally_schroedinger(s, box1(2.2, 4.2));
  CHECK(rep.pass);
  for (const ResidualRecord& r : rep.records) {
    if (r.check == "local-matrix-elements") CHECK(r.residual <= 1e-12);
    if (r.check == "local-dirichlet-spectrum") CHECK(r.residual <= 1e-9);
  }
  // boxes touching the seam are rejected outright
  CHECK_THROWS_AS(check_locally_schroedinger(s, box1(0.05, 3.0)),
                  BoxTouchesEdge);
}

TEST_CASE("equivalence verdicts") {
  const Manifold c = make_manifold(ManifoldSpec::circle(kTau));
  // distinct characters are told apart by the trace at the generator
  const RepSpace s0 = build_space(c, rep_from_angles(c, {0.0}), {64, 1});
  const RepSpace spi = build_space(c, rep_from_angles(c, {kPi}), {64, 1});
  const EquivalenceResult d = check_equivalence(s0, spi);
  CHECK(d.verdict == "distinct");
  CHECK(d.max_trace_diff > 1.0);

  // a conjugated two-dimensional representation is equivalent
  const Manifold k = make_manifold(ManifoldSpec::klein_bottle(kTau, kTau));
  const Pi1Representation rep = klein_swap_rep(k, kPi / 3);
  Mat wrot(2, 2);
  const double t = 0.3;
  wrot << std::cos(t), std::sin(t), -std::sin(t), std::cos(t);
  std::vector<Mat> conj_gens;
  for (const Mat& g : rep.gen) conj_gens.push_back(wrot * g * wrot.adjoint());
  const Pi1Representation rep2 = rep_from_matrices(k, 2, conj_gens, "conj");
  const RepSpace sk1 = build_space(k, rep, {16, 16});
  const RepSpace sk2 = build_space(k, rep2, {16, 16});
  const EquivalenceResult eq = check_equivalence(sk1, sk2);
  CHECK(eq.verdict == "equivalent");
  CHECK(eq.max_trace_diff < 1e-10);
  CHECK(eq.max_eig_diff < 1e-6);

  // different fiber dimensions are distinct via the identity trace
  const RepSpace sk3 = build_space(k, rep_from_angles(k, {0.0, 0.0}), {16, 16});
  CHECK(check_equivalence(sk1, sk3).verdict == "distinct");

  // mismatched grids cannot be compared
  const RepSpace sk4 = build_space(k, rep, {24, 24});
  CHECK_THROWS_AS(check_equivalence(sk1, sk4), DimensionMismatch);
}
