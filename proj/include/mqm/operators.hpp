#pragma once

#include <optional>

#include "mqm/fields.hpp"
#include "mqm/flow.hpp"
#include "mqm/homotopy.hpp"
#include "mqm/linop.hpp"
#include "mqm/probes.hpp"
#include "mqm/report.hpp"

namespace mqm {

// Identification-aware central-difference stencils. Entries crossing an
// identified edge carry the fiber block R(w) of the deck word returned by
// the lattice reduction (rep == nullptr means the untwisted scalar case).
// Open-axis neighbors outside the domain are dropped (functions vanish near
// the truncation margin).
struct DerivativeStencil {
  int axis = 0;
  int order = 2;
  SpMat D;  // exactly antisymmetric up to unitary wrap blocks
};
DerivativeStencil first_derivative(const Grid& g, int axis, int order,
                                   const Pi1Representation* rep = nullptr);
SpMat second_derivative(const Grid& g, int axis, int order,
                        const Pi1Representation* rep = nullptr);

LinOp mult_op(const Grid& g, const ScalarField& f,
              const Pi1Representation* rep = nullptr);

// T_v = -(i/2) sum_j (M_{v_j} D_j + D_j M_{v_j}): the symmetric ordering of
// the components against the derivative matrices, hermitian by
// construction. On open axes the field's support box must stay 4h inside
// the truncation (SupportViolation otherwise).
LinOp momentum_op(const Grid& g, const VectorField& v, int order = 2,
                  const Pi1Representation* rep = nullptr);
LinOp momentum_op_sampled(const Grid& g, const SampledVectorField& v, int order = 2,
                          const Pi1Representation* rep = nullptr);

// exp(-i lambda T_v). When the field is constant and lambda*v is a whole
// number of grid steps the operator is realized as the exact pullback
// permutation (route "shift"); otherwise by diagonalization ("exp").
LinOp unitary(const Grid& g, const VectorField& v, double lambda, int order = 2);
std::optional<std::array<long long, 2>> exact_shift_steps(const Grid& g,
                                                          const VectorField& v,
                                                          double lambda);

// Residual suites. Each returns one record per resolution (or per identity)
// plus the ratio list across successive resolutions.

struct LrCheckOptions {
  std::vector<int> resolutions{256, 512};
  int order = 2;
  double tol = 1e-3;
  double ratio_lo = 3.5, ratio_hi = 4.5;
  std::uint64_t seed = 12345;
  int probes = 6;
};
CheckReport check_lr_relation(const Manifold& m, const ScalarField& f,
                              const VectorField& v, const LrCheckOptions& opt = {});

struct ResolventCheckOptions {
  int resolution = 256;
  int order = 2;
  double tol_exact = 1e-10;
  double ratio_lo = 8.0, ratio_hi = 12.0;
  std::vector<double> lambdas{1e-2, 1e-3, 1e-4};
};
CheckReport check_resolvent_identities(const Manifold& m, const VectorField& v,
                                       const ResolventCheckOptions& opt = {});

struct CovarianceCheckOptions {
  std::vector<int> resolutions{256, 512};
  int order = 2;
  int steps = 128;
  double min_ratio = 3.0;
  double tol_exact_shift = 1e-9;
  std::uint64_t seed = 12345;
  int probes = 6;
};
CheckReport check_covariance(const Manifold& m, const VectorField& v, double lambda,
                             const ScalarField& f, const VectorField& w,
                             const CovarianceCheckOptions& opt = {});

struct LieCheckOptions {
  std::vector<int> resolutions{256, 512};
  int order = 2;
  double min_ratio = 3.0;
  double tol_abs = 1e-10;  // applies when the bracket vanishes
  std::uint64_t seed = 12345;
  int probes = 6;
};
CheckReport check_lie_relations(const Manifold& m, const VectorField& v,
                                const VectorField& w, const LieCheckOptions& opt = {});

}  // namespace mqm
