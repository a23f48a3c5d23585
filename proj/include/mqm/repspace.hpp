#pragma once

#include "mqm/operators.hpp"

namespace mqm {

// Discretized twisted space: sections over the fundamental domain with
// fiber C^k and the equivariance rule psi(deck_g p) = R(g) psi(p). With the
// trivial representation every operator reduces entrywise to the untwisted
// one.
struct RepSpace {
  Grid grid;
  Pi1Representation rep;
  int k = 1;
  long long dim = 0;  // grid.npts * k
};

RepSpace build_space(const Manifold& m, const Pi1Representation& rep,
                     const std::array<int, 2>& n);

LinOp rep_momentum(const RepSpace& s, const VectorField& v, int order = 2);
LinOp rep_momentum_sampled(const RepSpace& s, const SampledVectorField& v,
                           int order = 2);
LinOp rep_mult(const RepSpace& s, const ScalarField& f);

enum class UnitaryRoute { Transport, Exponential };

// Unitary of the flow g(lambda v). Transport pulls back along the backward
// orbit with cubic interpolation, multiplying by the half-density factor
// and by R(w) for the deck word of each interpolation node; it realizes
// wrap holonomy exactly and preserves norms of band-limited states to
// interpolation accuracy (it is not an exact matrix isometry off the
// lattice). Exponential is exp(-i lambda T_v) on the twisted space (dense
// sizes only).
LinOp rep_unitary_from_flow(const RepSpace& s, const VectorField& v, double lambda,
                            int steps = 256,
                            UnitaryRoute route = UnitaryRoute::Transport);

// Fiber cocycle of the flow at x: V_g(x) = R([orbit of x])^-1.
Mat cocycle_fiber(const RepSpace& s, const VectorField& v, double lambda,
                  const Pt& x, int steps = 256);

struct CocycleCheckOptions {
  int samples = 50;
  int steps = 256;
  double tol = 1e-6;
  std::uint64_t seed = 12345;
};
// Composes V_g(hx) V_h(x) against V_{gh}(x), where the composite class is
// measured independently by continuing the second flow from the unreduced
// cover endpoint of the first.
CheckReport check_cocycle(const RepSpace& s, const VectorField& vg, double lambda_g,
                          const VectorField& vh, double lambda_h,
                          const CocycleCheckOptions& opt = {});

struct LocalCheckOptions {
  double tol = 1e-12;
  int probes = 6;
  int spectrum_k = 6;
  std::uint64_t seed = 12345;
};
// Matrix elements of box-supported observables and the Dirichlet sub-box
// spectrum against the untwisted space; the twist only touches wrap
// entries, so interior data must agree to machine precision.
CheckReport check_locally_schroedinger(const RepSpace& s, const Box& box,
                                       const LocalCheckOptions& opt = {});

struct EquivalenceResult {
  std::string verdict;  // "equivalent" | "distinct" | "inconclusive"
  double max_trace_diff = 0.0;
  double max_eig_diff = 0.0;
  std::vector<HomotopyClass> classes;
  std::vector<cxd> traces1, traces2;
};
// Evidence-based: conjugacy invariants on the probe classes plus the lowest
// free-Hamiltonian eigenvalues. Differing fiber dimensions are decided
// "distinct" by the identity-class trace.
EquivalenceResult check_equivalence(const RepSpace& s1, const RepSpace& s2,
                                    std::vector<HomotopyClass> probe_classes = {});

}  // namespace mqm
