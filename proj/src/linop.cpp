#include "mqm/linop.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>

namespace mqm {

LinOp LinOp::dense(Mat m, Flag f) {
  if (m.rows() != m.cols()) throw InvalidParam("operator matrix must be square");
  LinOp o;
  o.n = m.rows();
  o.dense_form = true;
  o.D = std::move(m);
  o.flag = f;
  return o;
}

LinOp LinOp::sparse(SpMat m, Flag f) {
  if (m.rows() != m.cols()) throw InvalidParam("operator matrix must be square");
  LinOp o;
  o.n = m.rows();
  o.dense_form = false;
  o.S = std::move(m);
  o.S.makeCompressed();
  o.flag = f;
  return o;
}

Vec LinOp::apply(const Vec& x) const {
  if (x.size() != n) throw DimensionMismatch("operator/vector size mismatch");
  return dense_form ? Vec(D * x) : Vec(S * x);
}

Vec LinOp::apply_adjoint(const Vec& x) const {
  if (x.size() != n) throw DimensionMismatch("operator/vector size mismatch");
  return dense_form ? Vec(D.adjoint() * x) : Vec(S.adjoint() * x);
}

Mat LinOp::to_dense(long long cap) const {
  if (dense_form) return D;
  if (n > cap)
    throw SizeExceeded("refusing to densify a " + std::to_string(n) + "x" +
                       std::to_string(n) + " operator (cap " + std::to_string(cap) +
                       ")");
  return Mat(S);
}

LinOp LinOp::adjoint() const {
  if (dense_form) return LinOp::dense(D.adjoint(), flag);
  return LinOp::sparse(SpMat(S.adjoint()), flag);
}

double spectral_norm_apply(long long n, const std::function<Vec(const Vec&)>& fwd,
                           const std::function<Vec(const Vec&)>& adj, int max_iters,
                           double rel_tol, std::uint64_t seed) {
  if (n == 0) return 0.0;
  Rng rng(seed);
  Vec v(n);
  for (long long i = 0; i < n; ++i) v(i) = rng.cgauss();
  v.normalize();
  double sigma = 0.0, prev = -1.0;
  for (int it = 0; it < max_iters; ++it) {
    const Vec w = fwd(v);
    sigma = w.norm();
    if (sigma == 0.0) return 0.0;
    Vec u = adj(w);
    const double un = u.norm();
    if (un == 0.0) return sigma;
    v = u / un;
    if (it >= 8 && std::abs(sigma - prev) <= rel_tol * sigma) break;
    prev = sigma;
  }
  return sigma;
}

double spectral_norm(const LinOp& a) {
  return spectral_norm_apply(
      a.n, [&a](const Vec& x) { return a.apply(x); },
      [&a](const Vec& x) { return a.apply_adjoint(x); });
}

double fro_norm(const LinOp& a) { return a.dense_form ? a.D.norm() : a.S.norm(); }

double hermiticity_residual(const LinOp& a) {
  double num, den;
  if (a.dense_form) {
    num = (a.D - a.D.adjoint()).norm();
    den = a.D.norm();
  } else {
    num = (a.S - SpMat(a.S.adjoint())).norm();
    den = a.S.norm();
  }
  return num / std::max(den, 1e-300);
}

double unitarity_residual(const LinOp& a) {
  if (a.dense_form)
    return (a.D.adjoint() * a.D - Mat::Identity(a.n, a.n)).norm();
  SpMat p = SpMat(a.S.adjoint()) * a.S;
  SpMat id(a.n, a.n);
  id.setIdentity();
  return (p - id).norm();
}

LinOp identity_op(long long n) {
  SpMat id(n, n);
  id.setIdentity();
  return LinOp::sparse(std::move(id), LinOp::Flag::Unitary);
}

LinOp resolvent(const LinOp& T) {
  if (!T.hermitian_flagged())
    throw InvalidParam("resolvent needs a hermitian-flagged operator");
  const Mat Td = T.to_dense(4096);
  const long long n = T.n;
  Mat A = Td - cxd(0.0, 1.0) * Mat::Identity(n, n);
  Eigen::PartialPivLU<Mat> lu(A);
  Mat R = lu.solve(Mat::Identity(n, n));
  const double resid = (A * R - Mat::Identity(n, n)).norm() /
                       std::sqrt(static_cast<double>(n));
  if (!(resid <= 1e-10))
    throw SolveFailed("resolvent solve residual " + fmt17(resid));
  return LinOp::dense(std::move(R), LinOp::Flag::General);
}

LinOp unitary_exp(const LinOp& T, double lambda, long long dense_cap) {
  if (!T.hermitian_flagged())
    throw InvalidParam("unitary_exp needs a hermitian-flagged operator");
  if (T.n > dense_cap)
    throw SizeExceeded("exp of a " + std::to_string(T.n) +
                       "-dim operator needs diagonalization beyond the cap " +
                       std::to_string(dense_cap));
  const Mat Td = T.to_dense(dense_cap);
  Eigen::SelfAdjointEigenSolver<Mat> es(Td);
  if (es.info() != Eigen::Success)
    throw SolveFailed("eigendecomposition for the exponential failed");
  const auto& V = es.eigenvectors();
  Vec phase(T.n);
  for (long long i = 0; i < T.n; ++i)
    phase(i) = std::polar(1.0, -lambda * es.eigenvalues()(i));
  Mat U = V * phase.asDiagonal() * V.adjoint();
  return LinOp::dense(std::move(U), LinOp::Flag::Unitary);
}

}  // namespace mqm
