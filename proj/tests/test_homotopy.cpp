#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "mqm/homotopy.hpp"

using namespace mqm;

namespace {
constexpr double kTau = 6.283185307179586;
const double kPi = 3.141592653589793;

std::vector<Pt> line_path(const Pt& a, const Pt& b, int samples) {
  std::vector<Pt> out;
  for (int i = 0; i < samples; ++i) {
    const double t = static_cast<double>(i) / (samples - 1);
    out.push_back(Pt{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
  }
  return out;
}
}  // namespace

TEST_CASE("word reduction in the abelian cases") {
  const Manifold t = make_manifold(ManifoldSpec::torus(kTau, kTau));
  const HomotopyClass c = reduce(t.presentation, Word{2, 1, -2});
  CHECK(c.m == 1);
  CHECK(c.n == 0);
  CHECK(c.str() == "a");
  const HomotopyClass d = reduce(t.presentation, Word{1, 1, 2, -1});
  CHECK(d.m == 1);
  CHECK(d.n == 1);
  CHECK(reduce(t.presentation, Word{1, -1}).is_identity());
  CHECK(reduce(t.presentation, Word{}).str() == "e");
}

TEST_CASE("word reduction in the klein group") {
  const Manifold k = make_manifold(ManifoldSpec::klein_bottle(kTau, kTau));
  // b a = a^-1 b
  const HomotopyClass c = reduce(k.presentation, Word{2, 1});
  CHECK(c.m == -1);
  CHECK(c.n == 1);
  CHECK(c.str() == "a^-1 b");
  // a b = a b stays in normal form
  const HomotopyClass d = reduce(k.presentation, Word{1, 2});
  CHECK(d.m == 1);
  CHECK(d.n == 1);
  // the defining relation collapses to the identity
  CHECK(reduce(k.presentation, Word{2, 1, -2, 1}).is_identity());
}

TEST_CASE("klein group composition, inverse, power") {
  const Manifold k = make_manifold(ManifoldSpec::klein_bottle(kTau, kTau));
  const PresKind pk = k.pk();
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    HomotopyClass c{pk, rng.integer(-4, 4), rng.integer(-4, 4)};
    HomotopyClass d{pk, rng.integer(-4, 4), rng.integer(-4, 4)};
    // inverse law
    CHECK(c.compose(c.inverse()).is_identity());
    CHECK(c.inverse().compose(c).is_identity());
    // power law against repeated composition
    HomotopyClass acc = HomotopyClass::identity(pk);
    for (int e = 0; e < 5; ++e) {
      CHECK(acc == c.power(e));
      acc = acc.compose(c);
    }
    CHECK(c.power(-3) == c.inverse().power(3));
    // associativity spot check
    HomotopyClass e{pk, 1, 1};
    CHECK(c.compose(d).compose(e) == c.compose(d.compose(e)));
  }
}

TEST_CASE("word parsing") {
  const Manifold k = make_manifold(ManifoldSpec::klein_bottle(kTau, kTau));
  CHECK(word_from_string(k.presentation, "a^2 b^-1") == Word{1, 1, -2});
  CHECK(word_from_string(k.presentation, "a b a^-1") == Word{1, 2, -1});
  CHECK(word_from_string(k.presentation, "e").empty());
  CHECK(word_from_string(k.presentation, "1").empty());
  CHECK_THROWS_AS(word_from_string(k.presentation, "c"), InvalidWord);
  CHECK_THROWS_AS(word_from_string(k.presentation, "a^x"), InvalidWord);
}

TEST_CASE("crossing tracker on the circle") {
  const Manifold c = make_manifold(ManifoldSpec::circle(kTau));
  // two positive wraps
  const TrackResult two =
      track_crossings(c, line_path(Pt{0.5, 0.0}, Pt{0.5 + 2 * kTau, 0.0}, 120));
  CHECK(two.cls.m == 2);
  CHECK(two.letters == Word{1, 1});
  // refinement does not change the class
  const TrackResult fine =
      track_crossings(c, line_path(Pt{0.5, 0.0}, Pt{0.5 + 2 * kTau, 0.0}, 1500));
  CHECK(fine.cls == two.cls);
  // a backward wrap
  const TrackResult back =
      track_crossings(c, line_path(Pt{0.5, 0.0}, Pt{0.5 - kTau, 0.0}, 120));
  CHECK(back.cls.m == -1);
  CHECK(back.letters == Word{-1});
  // a closed null-homotopic excursion
  std::vector<Pt> loop = line_path(Pt{0.5, 0.0}, Pt{3.0, 0.0}, 60);
  const std::vector<Pt> ret = line_path(Pt{3.0, 0.0}, Pt{0.5, 0.0}, 60);
  loop.insert(loop.end(), ret.begin(), ret.end());
  CHECK(track_crossings(c, loop).cls.is_identity());
}

TEST_CASE("crossing tracker rejects coarse paths") {
  const Manifold c = make_manifold(ManifoldSpec::circle(kTau));
  CHECK_THROWS_AS(
      track_crossings(c, line_path(Pt{0.0, 0.0}, Pt{2 * kTau, 0.0}, 3)),
      PathTooCoarse);
}

TEST_CASE("crossing tracker concatenates") {
  const Manifold k = make_manifold(ManifoldSpec::klein_bottle(kTau, kTau));
  const Pt start{1.0, 1.0};
  const Pt mid{1.0 + kTau, 2.0};       // one a crossing
  const Pt end{1.0 + kTau, 2.0 + kTau};  // then one b crossing
  const TrackResult first = track_crossings(k, line_path(start, mid, 200));
  const TrackResult second = track_crossings(k, line_path(mid, end, 200));
  std::vector<Pt> whole = line_path(start, mid, 200);
  const std::vector<Pt> tail = line_path(mid, end, 200);
  whole.insert(whole.end(), tail.begin(), tail.end());
  const TrackResult both = track_crossings(k, whole);
  CHECK(first.cls.m == 1);
  CHECK(second.cls.n == 1);
  CHECK(both.cls == first.cls.compose(second.cls));
}

TEST_CASE("angle representations canonicalize the angle") {
  const Manifold c = make_manifold(ManifoldSpec::circle(kTau));
  const Pi1Representation r0 = rep_from_angles(c, {0.0});
  const Pi1Representation r2pi = rep_from_angles(c, {kTau});
  // equal characters give bit-equal generator matrices
  CHECK(r0.gen[0](0, 0).real() == r2pi.gen[0](0, 0).real());
  CHECK(r0.gen[0](0, 0).imag() == r2pi.gen[0](0, 0).imag());
  const Pi1Representation rpi = rep_from_angles(c, {kPi});
  CHECK(std::abs(rpi.gen[0](0, 0) - cxd(-1.0, 0.0)) < 1e-12);
  CHECK(rep_validation_residual(rpi) < 1e-12);
  CHECK_FALSE(rpi.is_trivial());
  CHECK(trivial_rep(c).is_trivial());
}

TEST_CASE("representation validation names the failing part") {
  const Manifold c = make_manifold(ManifoldSpec::circle(kTau));
  Mat bad(1, 1);
  bad(0, 0) = cxd(2.0, 0.0);
  try {
    rep_from_matrices(c, 1, {bad});
    FAIL("expected InvalidParam");
  } catch (const InvalidParam& e) {
    CHECK(std::string(e.what()).find("a") != std::string::npos);
    CHECK(std::string(e.what()).find("unitary") != std::string::npos);
  }

  const Manifold k = make_manifold(ManifoldSpec::klein_bottle(kTau, kTau));
  // R(a)^2 = 1 is forced by the relation; a quarter-turn character fails it
  try {
    rep_from_angles(k, {kPi / 4, 0.0});
    FAIL("expected InvalidParam");
  } catch (const InvalidParam& e) {
    CHECK(std::string(e.what()).find("relation") != std::string::npos);
  }
  // the allowed characters: R(a) = +-1, R(b) free
  CHECK_NOTHROW(rep_from_angles(k, {kPi, 1.234}));
  CHECK_NOTHROW(rep_from_angles(k, {0.0, -2.5}));
}

TEST_CASE("evaluating a representation is a homomorphism") {
  const Manifold k = make_manifold(ManifoldSpec::klein_bottle(kTau, kTau));
  Mat ra(2, 2), rb(2, 2);
  ra.setZero();
  rb.setZero();
  ra(0, 0) = std::polar(1.0, kPi / 3);
  ra(1, 1) = std::polar(1.0, -kPi / 3);
  rb(0, 1) = 1.0;
  rb(1, 0) = 1.0;
  const Pi1Representation rep = rep_from_matrices(k, 2, {ra, rb}, "swap");
  CHECK(rep_validation_residual(rep) < 1e-12);
  Rng rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const HomotopyClass c1{k.pk(), rng.integer(-3, 3), rng.integer(-3, 3)};
    const HomotopyClass c2{k.pk(), rng.integer(-3, 3), rng.integer(-3, 3)};
    const Mat lhs = evaluate_rep(rep, c1.compose(c2));
    const Mat rhs = evaluate_rep(rep, c1) * evaluate_rep(rep, c2);
    CHECK((lhs - rhs).norm() < 1e-12);
  }
  CHECK(evaluate_rep(rep, HomotopyClass::identity(k.pk()))
            .isApprox(Mat::Identity(2, 2), 1e-15));
}

TEST_CASE("conjugacy invariants and probe classes") {
  const Manifold k = make_manifold(ManifoldSpec::klein_bottle(kTau, kTau));
  const std::vector<HomotopyClass> classes = default_probe_classes(k);
  CHECK(classes.size() == 25);  // exponent window [-2, 2] squared
  bool has_identity = false;
  for (const HomotopyClass& c : classes) has_identity |= c.is_identity();
  CHECK(has_identity);

  const Pi1Representation triv = trivial_rep(k);
  const std::vector<cxd> tr = conjugacy_invariants(triv, classes);
  REQUIRE(tr.size() == classes.size());
  for (const cxd& z : tr) CHECK(std::abs(z - cxd(1.0, 0.0)) < 1e-15);

  const Manifold c = make_manifold(ManifoldSpec::circle(kTau));
  CHECK(default_probe_classes(c).size() == 5);  // a^-2 .. a^2
}
