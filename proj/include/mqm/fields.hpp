#pragma once

#include <array>
#include <optional>

#include "mqm/expr.hpp"
#include "mqm/manifold.hpp"

namespace mqm {

// A real function on the manifold given by a chart formula. Observables
// (role == Observable) obey the compact-support rules; potentials skip the
// support-box requirement but must still respect the identifications.
struct ScalarField {
  enum class Role { Observable, Potential };
  Expr expr;
  Manifold manifold;
  std::optional<Box> support;
  Role role = Role::Observable;
};

struct VectorField {
  std::array<Expr, 2> comp{};
  Manifold manifold;
  std::optional<Box> support;
};

ScalarField make_scalar_field(const Manifold& m, const Expr& e,
                              std::optional<Box> support = std::nullopt);
ScalarField make_potential(const Manifold& m, const Expr& e);
VectorField make_vector_field(const Manifold& m, const std::array<Expr, 2>& comp,
                              std::optional<Box> support = std::nullopt);

// Evaluate at an arbitrary cover point (reduce, evaluate, and transport the
// vector components by the deck word's linear part).
double eval_scalar_cover(const ScalarField& f, const Pt& q);
Pt eval_vector_cover(const VectorField& v, const Pt& q);

// Symbolic (v . grad)w - (w . grad)v; support is merged.
VectorField lie_bracket(const VectorField& v, const VectorField& w);

// Symbolic sum of d comp_j / d x_j.
Expr divergence(const VectorField& v);

// Grid samples of a (possibly flow-transported) vector field.
struct SampledVectorField {
  std::array<std::vector<double>, 2> comp;
  int dim = 1;
};
SampledVectorField sample_field(const Grid& g, const VectorField& v);

}  // namespace mqm
