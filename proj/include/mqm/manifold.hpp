#pragma once

#include <array>
#include <optional>
#include <string>

#include "mqm/pi1.hpp"
#include "mqm/types.hpp"

namespace mqm {

enum class ManifoldKind { Line, Circle, Torus, Annulus, KleinBottle };

std::string kind_name(ManifoldKind k);

struct ManifoldSpec {
  ManifoldKind kind = ManifoldKind::Circle;
  // Per-kind lengths; unused entries stay zero.
  double L = 0.0;   // Circle / Annulus circumference
  double L1 = 0.0;  // Torus / KleinBottle
  double L2 = 0.0;
  double W = 0.0;   // Annulus width
  double X = 0.0;   // Line truncation half-width

  static ManifoldSpec line(double X);
  static ManifoldSpec circle(double L);
  static ManifoldSpec torus(double L1, double L2);
  static ManifoldSpec annulus(double L, double W);
  static ManifoldSpec klein_bottle(double L1, double L2);

  std::string str() const;
};

// Identification rule for the positive edge of one axis.
struct EdgeRule {
  bool identified = false;
  int generator = -1;        // 0-based generator crossed in +direction
  bool reverses_other = false;  // KleinBottle y-edge reflects x
};

struct Manifold {
  ManifoldSpec spec;
  int dim = 1;
  Box domain;  // fundamental domain, half-open on identified axes
  std::array<EdgeRule, 2> edges{};
  Pi1Presentation presentation;
  double measure_density = 1.0;

  double extent(int axis) const { return domain.extent(axis); }
  bool axis_identified(int axis) const { return edges[axis].identified; }
  PresKind pk() const { return pres_kind(presentation); }
};

Manifold make_manifold(const ManifoldSpec& spec);

struct Grid {
  Manifold m;
  std::array<int, 2> n{1, 1};
  std::array<double, 2> h{0.0, 0.0};
  int dim = 1;
  long long npts = 0;
  double weight = 0.0;  // quadrature weight per point

  long long index(long long ix, long long iy) const { return ix * n[1] + iy; }
  Pt point(long long idx) const {
    long long ix = idx / n[1], iy = idx % n[1];
    return Pt{m.domain.lo[0] + static_cast<double>(ix) * h[0],
              m.domain.lo[1] + static_cast<double>(iy) * h[1]};
  }
  double total_weight() const { return weight * static_cast<double>(npts); }
};

Grid make_grid(const Manifold& m, const std::array<int, 2>& n);
Grid make_grid(const Manifold& m, int n);  // 1-d convenience

// Apply a letter word to a cover point, rightmost letter first.
Pt deck_action(const Manifold& m, const Word& word, const Pt& x);
// Apply a canonical class (a^m b^n, b-part first).
Pt deck_action(const Manifold& m, const HomotopyClass& c, const Pt& x);

// Decompose a cover point as deck_w(p) with p in the fundamental domain.
struct Reduction {
  Pt p{0.0, 0.0};
  HomotopyClass cls;
  bool reflected = false;  // x-axis reflection parity of the deck word
};
Reduction reduce_to_domain(const Manifold& m, const Pt& q);

// Same decomposition in exact index arithmetic on the grid lattice.
// inside == false marks an out-of-range index along an open axis.
struct IndexReduction {
  bool inside = true;
  long long ix = 0, iy = 0;
  HomotopyClass cls;
};
IndexReduction reduce_index(const Grid& g, long long jx, long long jy);

}  // namespace mqm
