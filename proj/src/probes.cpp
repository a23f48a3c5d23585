#include "mqm/probes.hpp"

#include <cmath>

namespace mqm {

namespace {

double bump_scalar(double t) {
  const double t2 = t * t;
  if (t2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t2));
}

struct TrigTerm {
  double kx, ky;
  cxd coef;
};

struct Envelope {
  int axis;
  double c, w, k;  // center, half-width, wave number of a phase factor
};

}  // namespace

std::vector<Vec> ProbeFamily::sample(const Grid& g) const {
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int p = 0; p < count; ++p) {
    Vec psi(g.npts * fiber_dim);
    for (long long idx = 0; idx < g.npts; ++idx) {
      const cxd amp = profile[static_cast<std::size_t>(p)](g.point(idx));
      for (int c = 0; c < fiber_dim; ++c)
        psi(idx * fiber_dim + c) = amp * fiber[static_cast<std::size_t>(p)](c);
    }
    const double nrm = psi.norm();
    if (nrm > 0.0) psi /= nrm;
    out.push_back(std::move(psi));
  }
  return out;
}

ProbeFamily make_probes(const Manifold& m, int fiber_dim, int count,
                        std::uint64_t seed, std::optional<Box> window,
                        int max_mode) {
  if (count < 1) throw InvalidParam("probe count must be at least 1");
  if (fiber_dim < 1) throw InvalidParam("probe fiber dimension must be at least 1");
  Rng rng(seed);
  ProbeFamily fam;
  fam.count = count;
  fam.fiber_dim = fiber_dim;
  for (int p = 0; p < count; ++p) {
    std::vector<TrigTerm> terms;
    std::vector<Envelope> envs;
    if (window) {
      // localized probe: bump window times a plane wave, all inside the box
      for (int a = 0; a < m.dim; ++a) {
        const double bw = window->extent(a);
        Envelope e;
        e.axis = a;
        e.c = 0.5 * (window->lo[a] + window->hi[a]) + 0.15 * bw * rng.uniform(-1.0, 1.0);
        e.w = bw * (0.30 + 0.08 * rng.uniform(0.0, 1.0));
        e.k = (M_PI / e.w) * rng.uniform(-0.7, 0.7);
        envs.push_back(e);
      }
    } else {
      // trig polynomial along identified axes
      std::array<bool, 2> periodic{false, false};
      for (int a = 0; a < m.dim; ++a) periodic[a] = m.axis_identified(a);
      const int m0max = periodic[0] ? max_mode : 0;
      const int m1max = (m.dim == 2 && periodic[1]) ? max_mode : 0;
      if (periodic[0] || m1max > 0) {
        for (int m0 = -m0max; m0 <= m0max; ++m0)
          for (int m1 = -m1max; m1 <= m1max; ++m1) {
            TrigTerm t;
            t.kx = periodic[0] ? 2.0 * M_PI * m0 / m.extent(0) : 0.0;
            t.ky = m1max > 0 ? 2.0 * M_PI * m1 / m.extent(1) : 0.0;
            t.coef = rng.cgauss() / (1.0 + static_cast<double>(m0 * m0 + m1 * m1));
            terms.push_back(t);
          }
      }
      // bump envelope along open axes
      for (int a = 0; a < m.dim; ++a) {
        if (periodic[a]) continue;
        const double ext = m.extent(a);
        Envelope e;
        e.axis = a;
        e.c = 0.5 * (m.domain.lo[a] + m.domain.hi[a]) + 0.15 * ext * rng.uniform(-1.0, 1.0);
        e.w = ext * (0.22 + 0.06 * rng.uniform(0.0, 1.0));
        e.k = (M_PI / e.w) * rng.uniform(-0.7, 0.7);
        envs.push_back(e);
      }
    }
    fam.profile.push_back([terms, envs](const Pt& pt) -> cxd {
      cxd s = terms.empty() ? cxd(1.0, 0.0) : cxd(0.0, 0.0);
      for (const TrigTerm& t : terms)
        s += t.coef * std::exp(cxd(0.0, t.kx * pt[0] + t.ky * pt[1]));
      for (const Envelope& e : envs) {
        const double u = (pt[static_cast<std::size_t>(e.axis)] - e.c) / e.w;
        s *= bump_scalar(u) *
             std::exp(cxd(0.0, e.k * pt[static_cast<std::size_t>(e.axis)]));
      }
      return s;
    });
    Vec dir(fiber_dim);
    for (int c = 0; c < fiber_dim; ++c) dir(c) = rng.cgauss();
    dir.normalize();
    fam.fiber.push_back(std::move(dir));
  }
  return fam;
}

}  // namespace mqm
