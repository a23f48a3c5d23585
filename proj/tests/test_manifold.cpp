#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mqm/manifold.hpp"

using namespace mqm;

namespace {
constexpr double kTau = 6.283185307179586;

double dist(const Pt& a, const Pt& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}
}  // namespace

TEST_CASE("manifold construction and validation") {
  const Manifold c = make_manifold(ManifoldSpec::circle(kTau));
  CHECK(c.dim == 1);
  CHECK(c.axis_identified(0));
  CHECK(c.presentation.n_generators() == 1);
  CHECK(c.pk() == PresKind::FreeZ);

  const Manifold l = make_manifold(ManifoldSpec::line(5.0));
  CHECK(l.dim == 1);
  CHECK_FALSE(l.axis_identified(0));
  CHECK(l.domain.lo[0] == -5.0);
  CHECK(l.domain.hi[0] == 5.0);
  CHECK(l.pk() == PresKind::Trivial);

  const Manifold t = make_manifold(ManifoldSpec::torus(kTau, 4.0));
  CHECK(t.dim == 2);
  CHECK(t.axis_identified(0));
  CHECK(t.axis_identified(1));
  CHECK(t.pk() == PresKind::Z2);
  CHECK(t.presentation.abelian);

  const Manifold a = make_manifold(ManifoldSpec::annulus(kTau, 3.0));
  CHECK(a.dim == 2);
  CHECK(a.axis_identified(0));
  CHECK_FALSE(a.axis_identified(1));
  CHECK(a.pk() == PresKind::FreeZ);

  const Manifold k = make_manifold(ManifoldSpec::klein_bottle(3.0, 1.0));
  CHECK(k.pk() == PresKind::KleinGroup);
  CHECK_FALSE(k.presentation.abelian);
  CHECK(k.edges[1].reverses_other);

  CHECK_THROWS_AS(make_manifold(ManifoldSpec::circle(0.0)), InvalidParam);
  CHECK_THROWS_AS(make_manifold(ManifoldSpec::torus(1.0, -2.0)), InvalidParam);
  CHECK_THROWS_AS(make_manifold(ManifoldSpec::line(-1.0)), InvalidParam);
}

TEST_CASE("grid layout and weights") {
  const Manifold c = make_manifold(ManifoldSpec::circle(kTau));
  const Grid g = make_grid(c, 16);
  CHECK(g.n[0] == 16);
  CHECK(g.n[1] == 1);
  CHECK(g.npts == 16);
  CHECK(g.h[0] == doctest::Approx(kTau / 16).epsilon(1e-15));
  CHECK(g.total_weight() == doctest::Approx(kTau).epsilon(1e-12));

  const Manifold t = make_manifold(ManifoldSpec::torus(kTau, 4.0));
  const Grid gt = make_grid(t, {12, 8});
  CHECK(gt.npts == 96);
  CHECK(gt.index(3, 5) == 3 * 8 + 5);
  const Pt p = gt.point(gt.index(3, 5));
  CHECK(p[0] == doctest::Approx(3 * kTau / 12));
  CHECK(p[1] == doctest::Approx(5 * 4.0 / 8));
  CHECK(gt.total_weight() == doctest::Approx(kTau * 4.0).epsilon(1e-12));

  CHECK_THROWS_AS(make_grid(c, 7), InvalidParam);
  CHECK_THROWS_AS(make_grid(t, {16, 4}), InvalidParam);
}

TEST_CASE("deck actions on the cover") {
  const Manifold k = make_manifold(ManifoldSpec::klein_bottle(3.0, 1.0));
  // b reflects x about the domain midline and advances y by one period
  const Pt x{0.2, 0.3};
  const Pt bx = deck_action(k, Word{2}, x);
  CHECK(bx[0] == doctest::Approx(2.8).epsilon(1e-15));
  CHECK(bx[1] == doctest::Approx(1.3).epsilon(1e-15));
  // b^2 is a pure vertical translation by two periods
  const Pt bbx = deck_action(k, Word{2, 2}, x);
  CHECK(bbx[0] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(bbx[1] == doctest::Approx(2.3).epsilon(1e-15));
  // letter order: rightmost first, so "ab" means apply b, then a
  const Pt abx = deck_action(k, Word{1, 2}, x);
  CHECK(abx[0] == doctest::Approx(2.8 + 3.0).epsilon(1e-15));

  const Manifold c = make_manifold(ManifoldSpec::circle(kTau));
  const Pt y = deck_action(c, Word{1, 1, -1}, Pt{1.0, 0.0});
  CHECK(y[0] == doctest::Approx(1.0 + kTau).epsilon(1e-15));

  CHECK_THROWS_AS(deck_action(c, Word{2}, Pt{0.0, 0.0}), InvalidWord);
  CHECK_THROWS_AS(deck_action(c, Word{0}, Pt{0.0, 0.0}), InvalidWord);
}

TEST_CASE("canonical class action is a homomorphism") {
  const Manifold k = make_manifold(ManifoldSpec::klein_bottle(3.0, 1.0));
  const PresKind pk = k.pk();
  Rng rng(42);
  for (int trial = 0; trial < 40; ++trial) {
    HomotopyClass c1{pk, rng.integer(-3, 3), rng.integer(-3, 3)};
    HomotopyClass c2{pk, rng.integer(-3, 3), rng.integer(-3, 3)};
    const Pt x{rng.uniform(0.0, 3.0), rng.uniform(0.0, 1.0)};
    const Pt lhs = deck_action(k, c1.compose(c2), x);
    const Pt rhs = deck_action(k, c1, deck_action(k, c2, x));
    CHECK(dist(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("reduce_to_domain inverts the deck action") {
  for (const ManifoldSpec spec :
       {ManifoldSpec::circle(kTau), ManifoldSpec::torus(kTau, 4.0),
        ManifoldSpec::annulus(kTau, 3.0), ManifoldSpec::klein_bottle(3.0, 1.0)}) {
    const Manifold m = make_manifold(spec);
    Rng rng(7);
    for (int trial = 0; trial < 60; ++trial) {
      Pt p{0.0, 0.0};
      for (int a = 0; a < m.dim; ++a)
        p[a] = rng.uniform(m.domain.lo[a] + 0.05, m.domain.hi[a] - 0.05);
      HomotopyClass cls{m.pk(), rng.integer(-3, 3),
                        m.dim == 2 && m.axis_identified(1) ? rng.integer(-3, 3)
                                                           : 0};
      if (m.pk() == PresKind::FreeZ) cls.n = 0;
      const Pt q = deck_action(m, cls, p);
      const Reduction r = reduce_to_domain(m, q);
      CHECK(dist(r.p, p) < 1e-10);
      CHECK(r.cls == cls);
      if (m.spec.kind == ManifoldKind::KleinBottle)
        CHECK(r.reflected == ((cls.n % 2) != 0));
    }
  }
}

TEST_CASE("reduce_to_domain leaves open axes alone") {
  const Manifold l = make_manifold(ManifoldSpec::line(5.0));
  const Reduction r = reduce_to_domain(l, Pt{-2.5, 0.0});
  CHECK(r.p[0] == -2.5);
  CHECK(r.cls.is_identity());

  const Manifold a = make_manifold(ManifoldSpec::annulus(kTau, 3.0));
  const Reduction ra = reduce_to_domain(a, Pt{kTau + 1.0, 2.9});
  CHECK(ra.p[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(ra.p[1] == 2.9);
  CHECK(ra.cls.m == 1);
}

TEST_CASE("reduce_index agrees with the continuum reduction") {
  for (const ManifoldSpec spec :
       {ManifoldSpec::circle(kTau), ManifoldSpec::torus(kTau, 4.0),
        ManifoldSpec::klein_bottle(3.0, 1.0)}) {
    const Manifold m = make_manifold(spec);
    const Grid g = make_grid(m, {12, 8});
    Rng rng(11);
    for (int trial = 0; trial < 120; ++trial) {
      const long long jx = rng.integer(-30, 30);
      const long long jy = m.dim == 2 ? rng.integer(-20, 20) : 0;
      const IndexReduction r = reduce_index(g, jx, jy);
      REQUIRE(r.inside);
      CHECK(r.ix >= 0);
      CHECK(r.ix < g.n[0]);
      if (m.dim == 2) {
        CHECK(r.iy >= 0);
        CHECK(r.iy < g.n[1]);
      }
      // defining property: deck_cls(grid point) lands on the cover node
      const Pt node{m.domain.lo[0] + static_cast<double>(jx) * g.h[0],
                    m.dim == 2
                        ? m.domain.lo[1] + static_cast<double>(jy) * g.h[1]
                        : 0.0};
      const Pt back =
          deck_action(m, r.cls, g.point(g.index(r.ix, m.dim == 2 ? r.iy : 0)));
      CHECK(dist(back, node) < 1e-9);
    }
  }
}

TEST_CASE("reduce_index marks points beyond an open axis") {
  const Manifold l = make_manifold(ManifoldSpec::line(5.0));
  const Grid g = make_grid(l, 16);
  CHECK(reduce_index(g, 3, 0).inside);
  CHECK_FALSE(reduce_index(g, -1, 0).inside);
  CHECK_FALSE(reduce_index(g, 16, 0).inside);

  const Manifold a = make_manifold(ManifoldSpec::annulus(kTau, 3.0));
  const Grid ga = make_grid(a, {16, 8});
  CHECK_FALSE(reduce_index(ga, 3, 8).inside);
  const IndexReduction r = reduce_index(ga, -2, 5);
  CHECK(r.inside);
  CHECK(r.ix == 14);
  CHECK(r.cls.m == -1);
}

TEST_CASE("klein bottle corner reduction is exact") {
  const Manifold k = make_manifold(ManifoldSpec::klein_bottle(3.0, 1.0));
  const Grid g = make_grid(k, {12, 8});
  // one step past the reflecting edge at the x-origin: the deck word is
  // a^-1 b, not b, because the reflection sends column 0 to column n
  const IndexReduction r = reduce_index(g, 0, 8);
  CHECK(r.inside);
  CHECK(r.ix == 0);
  CHECK(r.iy == 0);
  CHECK(r.cls.m == -1);
  CHECK(r.cls.n == 1);
  // interior column: plain reflection
  const IndexReduction r2 = reduce_index(g, 5, 8);
  CHECK(r2.ix == 7);
  CHECK(r2.iy == 0);
  CHECK(r2.cls.m == 0);
  CHECK(r2.cls.n == 1);
}

TEST_CASE("manifold id strings are stable") {
  CHECK(make_manifold(ManifoldSpec::circle(kTau)).spec.str() ==
        ManifoldSpec::circle(kTau).str());
  CHECK(kind_name(ManifoldKind::KleinBottle) == "klein-bottle");
  CHECK(ManifoldSpec::circle(kTau).str().find("circle") != std::string::npos);
}
