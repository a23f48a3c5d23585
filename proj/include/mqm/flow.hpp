#pragma once

#include "mqm/fields.hpp"

namespace mqm {

// One-parameter diffeomorphism group of a compactly supported field,
// integrated by fixed-step classical fourth-order steps in cover
// coordinates. The log-Jacobian l = integral of div v along the orbit is
// carried as an extra component of the same integration.
class FlowMap {
 public:
  FlowMap(const VectorField& v, double lambda, int steps);

  const VectorField& field() const { return v_; }
  double lambda() const { return lambda_; }
  int steps() const { return steps_; }

  // Endpoint in cover coordinates (input may be any cover point).
  Pt forward_cover(const Pt& x) const;
  Pt backward_cover(const Pt& x) const;

  // Backward endpoint plus the log-Jacobian of the backward orbit;
  // exp(-l/2) is the half-density factor of the forward map at x.
  struct BackResult {
    Pt q;
    double log_jac;
  };
  BackResult backward_with_logjac(const Pt& x) const;

 private:
  VectorField v_;
  Expr div_;
  double lambda_;
  int steps_;

  Pt integrate(const Pt& x0, double lam, double* log_jac) const;
};

struct FlowEndpoint {
  Pt p;  // reduced endpoint
  HomotopyClass cls;  // class of the integral curve from x to the endpoint
};

// Integrate from a fundamental-domain point and reduce the endpoint; the
// crossing word is exact combinatorial data from the reduction.
FlowEndpoint flow(const VectorField& v, double lambda, const Pt& x, int steps);

// exp(-1/2 * integral of div v along the backward orbit through x): the
// half-density weight of the forward diffeomorphism at x.
double jacobian_factor(const VectorField& v, double lambda, const Pt& x, int steps);

// Grid samples of the adjoint action: (g*w)(x) = Dg(g^-1 x) . w(g^-1 x),
// with Dg by central differences of the flow map at step h/4.
SampledVectorField pushforward_field(const Grid& g, const FlowMap& flow,
                                     const VectorField& w);

}  // namespace mqm
