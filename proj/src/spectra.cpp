#include "mqm/spectra.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include <cmath>
#include <limits>

namespace mqm {

LinOp hamiltonian(const RepSpace& s, const ScalarField* V, int order) {
  const Grid& g = s.grid;
  SpMat H(s.dim, s.dim);
  for (int a = 0; a < g.dim; ++a) {
    const SpMat D2 = second_derivative(g, a, order, &s.rep);
    H = (a == 0) ? SpMat(cxd(-0.5, 0.0) * D2) : SpMat(H + cxd(-0.5, 0.0) * D2);
  }
  if (V) {
    if (V->manifold.spec.kind != g.m.spec.kind)
      throw InvalidParam("potential and grid live on different manifolds");
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(s.dim));
    for (long long idx = 0; idx < g.npts; ++idx) {
      const double val = V->expr.eval(g.point(idx));
      for (int f = 0; f < s.k; ++f)
        trips.emplace_back(idx * s.k + f, idx * s.k + f, val);
    }
    SpMat Vm(s.dim, s.dim);
    Vm.setFromTriplets(trips.begin(), trips.end());
    H = SpMat(H + Vm);
  }
  H.makeCompressed();
  return LinOp::sparse(std::move(H), LinOp::Flag::Hermitian);
}

namespace {

double gershgorin_min(const SpMat& S) {
  double lo = std::numeric_limits<double>::infinity();
  for (int outer = 0; outer < S.outerSize(); ++outer) {
    // column scan equals row scan for hermitian storage
    double center = 0.0, radius = 0.0;
    for (SpMat::InnerIterator it(S, outer); it; ++it) {
      if (it.row() == it.col())
        center = it.value().real();
      else
        radius += std::abs(it.value());
    }
    lo = std::min(lo, center - radius);
  }
  return lo;
}

void verify_pairs(const LinOp& H, const std::vector<double>& evals,
                  const std::vector<Vec>& vecs, std::vector<double>& residuals,
                  double tol_factor) {
  residuals.clear();
  for (std::size_t i = 0; i < evals.size(); ++i) {
    const double r = (H.apply(vecs[i]) - evals[i] * vecs[i]).norm();
    residuals.push_back(r);
    if (!(r <= tol_factor * (1.0 + std::abs(evals[i]))))
      throw SolverFailure("eigenpair " + std::to_string(i) + " residual " +
                          fmt17(r) + " exceeds " +
                          fmt17(tol_factor * (1.0 + std::abs(evals[i]))));
  }
}

void dense_lowest(const LinOp& H, int k, std::vector<double>& evals,
                  std::vector<Vec>& vecs) {
  const Mat Hd = H.to_dense(1LL << 20);
  Eigen::SelfAdjointEigenSolver<Mat> es(Hd);
  if (es.info() != Eigen::Success) throw SolverFailure("dense eigensolver failed");
  for (int i = 0; i < k; ++i) {
    evals.push_back(es.eigenvalues()(i));
    vecs.push_back(es.eigenvectors().col(i));
  }
}

void shift_invert_lowest(const LinOp& H, int k, double sigma,
                         std::vector<double>& evals, std::vector<Vec>& vecs) {
  if (H.dense_form) throw InvalidParam("iterative path expects sparse storage");
  const SpMat& S = H.S;
  const long long N = H.n;
  SpMat A = S;
  for (long long i = 0; i < N; ++i) A.coeffRef(i, i) -= sigma;
  A.makeCompressed();
  Eigen::SparseLU<SpMat> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success)
    throw SolverFailure("sparse factorization for shift-invert failed");

  const long long p = std::min<long long>(k + 8, N);
  Rng rng(20240913 + static_cast<std::uint64_t>(N));
  Mat X(N, p);
  for (long long i = 0; i < N; ++i)
    for (long long j = 0; j < p; ++j) X(i, j) = rng.cgauss();
  Eigen::VectorXd ritz = Eigen::VectorXd::Zero(p);
  Mat V;
  bool converged = false;
  for (int it = 0; it < 400; ++it) {
    const Mat Y = lu.solve(X);
    Eigen::HouseholderQR<Mat> qr(Y);
    const Mat Q = qr.householderQ() * Mat::Identity(N, p);
    const Mat HQ = S * Q;
    Mat B = Q.adjoint() * HQ;
    B = 0.5 * (B + Mat(B.adjoint()));
    Eigen::SelfAdjointEigenSolver<Mat> es(B);
    if (es.info() != Eigen::Success)
      throw SolverFailure("projected eigensolver failed");
    V = Q * es.eigenvectors();
    const Mat HV = HQ * es.eigenvectors();
    bool done = it >= 3;
    for (int i = 0; i < k && done; ++i) {
      const double lamb = es.eigenvalues()(i);
      const double r = (HV.col(i) - lamb * V.col(i)).norm();
      done = r <= 1e-9 * (1.0 + std::abs(lamb));
    }
    ritz = es.eigenvalues();
    X = V;
    if (done) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw SolverFailure("subspace iteration stalled; the shift at " +
                        fmt17(sigma) + " is too far below the spectrum");
  for (int i = 0; i < k; ++i) {
    evals.push_back(ritz(i));
    vecs.push_back(V.col(i));
  }
}

}  // namespace

SpectrumResult eigenvalues(const LinOp& H, int k,
                           std::optional<double> lower_bound) {
  if (k < 1 || k > H.n)
    throw InvalidParam("need 1 <= k <= dim, got k = " + std::to_string(k));
  SpectrumResult out;
  out.manifold_id = "(operator)";
  out.rep_summary = "";
  std::vector<Vec> vecs;
  if (H.dense_form || H.n <= 2048) {
    out.solver = "dense";
    dense_lowest(H, k, out.eigenvalues, vecs);
  } else {
    // Both bounds are valid, so take the sharper (larger) one; Gershgorin is
    // badly pessimistic for wide stencils and can leave the pole so far from
    // the spectrum that the inverted gaps collapse.
    double lb = gershgorin_min(H.S);
    if (lower_bound) lb = std::max(lb, *lower_bound);
    out.solver = "shift-invert";
    shift_invert_lowest(H, k, lb - 1.0, out.eigenvalues, vecs);
  }
  verify_pairs(H, out.eigenvalues, vecs, out.residuals, 1e-8);
  out.max_residual = 0.0;
  for (const double r : out.residuals) out.max_residual = std::max(out.max_residual, r);
  out.degeneracy_group.resize(out.eigenvalues.size());
  int group = 0;
  for (std::size_t i = 0; i < out.eigenvalues.size(); ++i) {
    if (i > 0 && out.eigenvalues[i] - out.eigenvalues[i - 1] >
                     1e-6 * (1.0 + std::abs(out.eigenvalues[i])))
      ++group;
    out.degeneracy_group[i] = group;
  }
  return out;
}

SpectrumResult spectrum(const RepSpace& s, const ScalarField* V, int order, int k) {
  // The kinetic operator is positive semidefinite (it is the sector
  // restriction of the covering-space Laplacian, whose difference symbol is
  // nonnegative at both stencil orders), so the ground energy is bounded
  // below by the smallest potential sample.
  double lb = 0.0;
  if (V) {
    lb = std::numeric_limits<double>::infinity();
    for (long long i = 0; i < s.grid.npts; ++i)
      lb = std::min(lb, V->expr.eval(s.grid.point(i)));
  }
  SpectrumResult out = eigenvalues(hamiltonian(s, V, order), k, lb);
  out.manifold_id = s.grid.m.spec.str();
  out.rep_summary = s.rep.label;
  out.n = s.grid.n;
  if (s.grid.dim == 1) out.n[1] = 1;
  return out;
}

std::vector<SpectrumResult> theta_sweep(const Manifold& m,
                                        const std::vector<Pi1Representation>& reps,
                                        const std::array<int, 2>& n, int k,
                                        int order) {
  std::vector<SpectrumResult> out;
  out.reserve(reps.size());
  for (const Pi1Representation& r : reps)
    out.push_back(spectrum(build_space(m, r, n), nullptr, order, k));
  return out;
}

}  // namespace mqm
