#pragma once

#include <functional>

#include "mqm/errors.hpp"
#include "mqm/types.hpp"

namespace mqm {

// Operator on the discretized space, stored dense or sparse. The flag is a
// structural claim made by the constructor, checked by tests.
struct LinOp {
  enum class Flag { General, Hermitian, Unitary };

  long long n = 0;
  bool dense_form = true;
  Mat D;
  SpMat S;
  Flag flag = Flag::General;

  static LinOp dense(Mat m, Flag f = Flag::General);
  static LinOp sparse(SpMat m, Flag f = Flag::General);

  Vec apply(const Vec& x) const;
  Vec apply_adjoint(const Vec& x) const;
  // Materializes sparse storage; refuses above the cap.
  Mat to_dense(long long cap = 4096) const;
  LinOp adjoint() const;
  bool hermitian_flagged() const { return flag == Flag::Hermitian; }
};

// Largest singular value by power iteration on A*A with a seeded start;
// deterministic for fixed inputs.
double spectral_norm_apply(long long n,
                           const std::function<Vec(const Vec&)>& fwd,
                           const std::function<Vec(const Vec&)>& adj,
                           int max_iters = 600, double rel_tol = 1e-7,
                           std::uint64_t seed = 777);
double spectral_norm(const LinOp& a);
double fro_norm(const LinOp& a);

double hermiticity_residual(const LinOp& a);  // ||A - A*|| / max(||A||, eps), Frobenius
double unitarity_residual(const LinOp& a);    // ||A*A - 1||, Frobenius

LinOp identity_op(long long n);

// (T - i)^-1 for hermitian-flagged T; dense solve with residual
// verification. SolveFailed when the solve loses more than six digits.
LinOp resolvent(const LinOp& T);

// exp(-i lambda T) by diagonalization of hermitian-flagged T; sizes above
// the cap raise SizeExceeded.
LinOp unitary_exp(const LinOp& T, double lambda, long long dense_cap = 4096);

}  // namespace mqm
