#pragma once

#include <optional>

#include "mqm/repspace.hpp"

namespace mqm {

struct SpectrumResult {
  std::string manifold_id;
  std::string rep_summary;
  std::array<int, 2> n{0, 0};
  std::vector<double> eigenvalues;  // ascending
  std::vector<double> residuals;    // ||H x - E x|| per pair
  std::vector<int> degeneracy_group;  // clusters at gap 1e-6*(1+|E|)
  std::string solver;  // "dense" | "shift-invert"
  double max_residual = 0.0;
};

// H = -(1/2) sum_j d^2/dx_j^2 + V on the twisted space, with the second
// derivatives discretized directly (3-point at order 2, 5-point at order 4)
// through the same identification machinery as the first-derivative
// stencils. Open axes get truncation (Dirichlet) walls.
LinOp hamiltonian(const RepSpace& s, const ScalarField* V = nullptr, int order = 2);

// k smallest eigenvalues: dense path up to dimension 2048, shift-invert
// subspace iteration above. Residuals are verified at 1e-8*(1+|E|) either
// way (SolverFailure on breach). `lower_bound`, when given, must be a
// guaranteed lower bound for the smallest eigenvalue; it places the
// shift-invert pole much closer to the spectrum than the default Gershgorin
// estimate, which is badly pessimistic for wide stencils.
SpectrumResult eigenvalues(const LinOp& H, int k,
                           std::optional<double> lower_bound = std::nullopt);
SpectrumResult spectrum(const RepSpace& s, const ScalarField* V, int order, int k);

std::vector<SpectrumResult> theta_sweep(const Manifold& m,
                                        const std::vector<Pi1Representation>& reps,
                                        const std::array<int, 2>& n, int k,
                                        int order = 2);

}  // namespace mqm
