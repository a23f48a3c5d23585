#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "mqm/manifold.hpp"

namespace mqm {

// Fixed band-limited states used as a resolution-independent residual
// metric. Profiles are defined in the continuum (trig polynomials with mode
// numbers <= 4 on periodic axes, bump-windowed waves on open axes or inside
// an explicit window box) and sampled on each grid, so the same family is
// evaluated at every resolution of a convergence study.
struct ProbeFamily {
  int count = 0;
  int fiber_dim = 1;
  std::vector<std::function<cxd(const Pt&)>> profile;
  std::vector<Vec> fiber;  // unit fiber direction per probe

  // l2-normalized samples on a grid (length npts * fiber_dim).
  std::vector<Vec> sample(const Grid& g) const;
};

ProbeFamily make_probes(const Manifold& m, int fiber_dim, int count,
                        std::uint64_t seed,
                        std::optional<Box> window = std::nullopt,
                        int max_mode = 4);

}  // namespace mqm
