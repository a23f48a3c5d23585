#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace mqm {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using SpMat = Eigen::SparseMatrix<cxd>;
using Triplet = Eigen::Triplet<cxd>;

// A point in chart/cover coordinates; 1-d manifolds use component 0 only.
using Pt = std::array<double, 2>;

// Axis-aligned box, used for fundamental domains and support metadata.
struct Box {
  Pt lo{0.0, 0.0};
  Pt hi{0.0, 0.0};
  int dim = 1;

  bool contains_closed(const Pt& p) const {
    for (int a = 0; a < dim; ++a)
      if (p[a] < lo[a] || p[a] > hi[a]) return false;
    return true;
  }
  bool contains_half_open(const Pt& p) const {
    for (int a = 0; a < dim; ++a)
      if (p[a] < lo[a] || p[a] >= hi[a]) return false;
    return true;
  }
  double extent(int a) const { return hi[a] - lo[a]; }
  double volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= extent(a);
    return v;
  }
};

// floor division for signed integers
inline long long fdiv(long long a, long long n) {
  long long q = a / n;
  if ((a % n) != 0 && ((a < 0) != (n < 0))) --q;
  return q;
}

inline long long ifloor(double x) { return static_cast<long long>(std::floor(x)); }

// Deterministic sampling helper shared by probe construction and tests.
struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double uniform(double a, double b) {
    std::uniform_real_distribution<double> d(a, b);
    return d(eng);
  }
  double gauss() {
    std::normal_distribution<double> d(0.0, 1.0);
    return d(eng);
  }
  cxd cgauss() {
    double re = gauss(), im = gauss();
    return cxd(re, im);
  }
  long long integer(long long a, long long b) {
    std::uniform_int_distribution<long long> d(a, b);
    return d(eng);
  }
};

std::string fmt17(double x);

}  // namespace mqm
