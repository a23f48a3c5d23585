#pragma once

#include <vector>

#include "mqm/manifold.hpp"

namespace mqm {

// Class of a sampled continuous path in cover coordinates, with the edge
// crossings in traversal order. Consecutive samples must differ by less
// than a quarter of the shortest domain edge.
struct TrackResult {
  HomotopyClass cls;
  Word letters;
};
TrackResult track_crossings(const Manifold& m, const std::vector<Pt>& cover_path);

// Unitary representation of the deck group on a fiber C^k.
struct Pi1Representation {
  Pi1Presentation presentation;
  PresKind kind = PresKind::Trivial;
  int fiber_dim = 1;
  std::vector<Mat> gen;  // one unitary k x k matrix per generator
  std::string label;

  bool is_trivial() const;
};

// 1-dim representation from one angle per generator; angles are
// canonicalized modulo 2*pi so that equal characters give bit-equal
// matrices. Validates unitarity and the relations at 1e-12.
Pi1Representation rep_from_angles(const Manifold& m, const std::vector<double>& angles,
                                  const std::string& label = "");
Pi1Representation rep_from_matrices(const Manifold& m, int fiber_dim,
                                    const std::vector<Mat>& gen,
                                    const std::string& label = "");
Pi1Representation trivial_rep(const Manifold& m);

double rep_validation_residual(const Pi1Representation& r);  // max of the 1e-12 checks

// R evaluated on the canonical form (R(a)^m R(b)^n).
Mat evaluate_rep(const Pi1Representation& r, const HomotopyClass& c);

std::vector<cxd> conjugacy_invariants(const Pi1Representation& r,
                                      const std::vector<HomotopyClass>& classes);

// Deterministic probe-class set for equivalence tests: all canonical forms
// with exponents in [-2, 2] (always includes the identity).
std::vector<HomotopyClass> default_probe_classes(const Manifold& m);

}  // namespace mqm
