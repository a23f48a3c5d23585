#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mqm/flow.hpp"

using namespace mqm;

namespace {
constexpr double kTau = 6.283185307179586;

Box box1(double lo, double hi) {
  Box b;
  b.dim = 1;
  b.lo = {lo, 0.0};
  b.hi = {hi, 0.0};
  return b;
}
}  // namespace

TEST_CASE("half-density factor at a stationary point") {
  const Manifold l = make_manifold(ManifoldSpec::line(5.0));
  const VectorField v =
      make_vector_field(l, {parse_expr("x * bump(x/3)"), Expr()}, box1(-3, 3));
  // the orbit through 0 is stationary and div v(0) = 1, so the factor is
  // exactly exp(-lambda/2)
  const double j = jacobian_factor(v, 0.1, Pt{0.0, 0.0}, 256);
  CHECK(j == doctest::Approx(std::exp(-0.05)).epsilon(1e-10));
}

TEST_CASE("half-density factor against a finite-difference determinant") {
  const Manifold l = make_manifold(ManifoldSpec::line(5.0));
  const VectorField v =
      make_vector_field(l, {parse_expr("x * bump(x/3)"), Expr()}, box1(-3, 3));
  const FlowMap g(v, 0.3, 256);
  for (const double x0 : {0.8, -1.2, 1.9}) {
    const Pt y = g.forward_cover(Pt{x0, 0.0});
    const double delta = 1e-5;
    const double dg = (g.forward_cover(Pt{x0 + delta, 0.0})[0] -
                       g.forward_cover(Pt{x0 - delta, 0.0})[0]) /
                      (2 * delta);
    // the integrated divergence route must reproduce |det Dg|^(-1/2)
    CHECK(jacobian_factor(v, 0.3, y, 256) ==
          doctest::Approx(1.0 / std::sqrt(dg)).epsilon(1e-5));
  }
}

TEST_CASE("flows outside the support never move") {
  const Manifold l = make_manifold(ManifoldSpec::line(5.0));
  const VectorField v =
      make_vector_field(l, {parse_expr("bump(x)"), Expr()}, box1(-1, 1));
  const FlowMap g(v, 2.0, 64);
  const Pt y = g.forward_cover(Pt{3.7, 0.0});
  CHECK(y[0] == 3.7);
  CHECK(jacobian_factor(v, 2.0, Pt{3.7, 0.0}, 64) == 1.0);
}

TEST_CASE("runaway integration is detected") {
  const Manifold l = make_manifold(ManifoldSpec::line(10.0));
  const VectorField v = make_vector_field(
      l, {parse_expr("1000000 * bump(x/5)"), Expr()}, box1(-5, 5));
  const FlowMap g(v, 1.0, 64);
  CHECK_THROWS_AS(g.forward_cover(Pt{1.0, 0.0}), IntegrationDiverged);
}

TEST_CASE("flow endpoints carry the homotopy class") {
  const Manifold c = make_manifold(ManifoldSpec::circle(kTau));
  const VectorField v = make_vector_field(c, {parse_expr("1"), Expr()});
  const FlowEndpoint e = flow(v, kTau + 0.5, Pt{1.0, 0.0}, 256);
  CHECK(e.p[0] == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(e.cls.m == 1);
  const FlowEndpoint b = flow(v, -0.5 - kTau, Pt{1.0, 0.0}, 256);
  CHECK(b.cls.m == -1);
  CHECK(b.p[0] == doctest::Approx(0.5).epsilon(1e-9));
  // a short flow stays in the identity class
  const FlowEndpoint s = flow(v, 0.25, Pt{1.0, 0.0}, 64);
  CHECK(s.cls.is_identity());
}

TEST_CASE("forward and backward compose to the identity") {
  const Manifold c = make_manifold(ManifoldSpec::circle(kTau));
  const VectorField v =
      make_vector_field(c, {parse_expr("0.8 + 0.3*sin(x)"), Expr()});
  const FlowMap g(v, 1.7, 256);
  for (const double x : {0.2, 2.9, 5.5}) {
    const Pt y = g.backward_cover(g.forward_cover(Pt{x, 0.0}));
    CHECK(y[0] == doctest::Approx(x).epsilon(1e-9));
  }
}

TEST_CASE("pushforward of a field along a rigid rotation") {
  const Manifold c = make_manifold(ManifoldSpec::circle(kTau));
  const VectorField v = make_vector_field(c, {parse_expr("1"), Expr()});
  const VectorField w = make_vector_field(c, {parse_expr("sin(x)"), Expr()});
  const double lambda = 0.9;
  const FlowMap g(v, lambda, 128);
  const Grid grid = make_grid(c, 64);
  const SampledVectorField pw = pushforward_field(grid, g, w);
  REQUIRE(pw.comp[0].size() == 64);
  // a rigid rotation transports sin(x) to sin(x - lambda)
  for (int i = 0; i < 64; ++i) {
    const double x = i * kTau / 64;
    CHECK(pw.comp[0][static_cast<std::size_t>(i)] ==
          doctest::Approx(std::sin(x - lambda)).epsilon(1e-7));
  }
}

TEST_CASE("two-dimensional flow crosses the reflecting edge correctly") {
  const Manifold k = make_manifold(ManifoldSpec::klein_bottle(kTau, kTau));
  const VectorField v =
      make_vector_field(k, {parse_expr("0"), parse_expr("1")});
  // a vertical unit flow for a little more than one period wraps b once
  const FlowEndpoint e = flow(v, kTau + 0.3, Pt{1.0, 1.0}, 256);
  CHECK(e.cls.n == 1);
  CHECK(e.cls.m == 0);
  CHECK(e.p[0] == doctest::Approx(kTau - 1.0).epsilon(1e-9));
  CHECK(e.p[1] == doctest::Approx(1.3).epsilon(1e-9));
}

TEST_CASE("flow map validates its construction") {
  const Manifold c = make_manifold(ManifoldSpec::circle(kTau));
  const VectorField v = make_vector_field(c, {parse_expr("1"), Expr()});
  CHECK_THROWS_AS(FlowMap(v, 1.0, 4), InvalidParam);  // too few steps
  const double bad = std::nan("");
  CHECK_THROWS_AS(FlowMap(v, bad, 64), InvalidParam);
}
