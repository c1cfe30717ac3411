#pragma once

#include <json.hpp>

#include "rsft/conformal.hpp"

namespace rsft {

// hat L^k 1 started k steps back on the orbit: the density estimate at x.
// The lambda window must cover [x.time - k, x.time).
DepthFunction rho_estimate(const ShiftContext& ctx, const FiberPoint& x, int k,
                           const LambdaSequence& lambdas);

// || hat L_x rho_x - rho_theta ||_alpha
double fixed_point_residual(const ShiftContext& ctx, const FiberPoint& x,
                            const DepthFunction& rho_x, const DepthFunction& rho_theta,
                            double lambda_x);

// mu = rho nu on depth-d cylinders; requires the density to be nu-normalized
// within tolerance (rescaled when drift stays below 1e-9 of itself).
RandomMeasureApprox invariant_measure(const ShiftContext& ctx, const FiberPoint& x,
                                      const DepthFunction& rho_x, const RandomMeasureApprox& nu_x);

// TV distance on depth-(d-1) cylinders between the pushforward of mu_x and
// mu at theta(x).
double invariance_residual(const ShiftContext& ctx, const FiberPoint& x,
                           const RandomMeasureApprox& mu_x, const RandomMeasureApprox& mu_theta);

// Measures, normalizers and densities along an orbit window; the workhorse
// behind the gap fit, the correlation integrals and the samplers.
class OrbitData {
 public:
  OrbitData(const ShiftContext& ctx, const FiberPoint& x, std::int64_t t_lo, std::int64_t t_hi,
            int pullback_depth, int rho_depth);

  const ShiftContext& ctx() const { return *ctx_; }
  const FiberPoint& base() const { return x_; }
  const LambdaSequence& lambdas() const { return om_.lambdas; }
  const RandomMeasureApprox& nu(std::int64_t t) const { return om_.nu(x_.time + t); }
  const OrbitMeasures& measures() const { return om_; }
  const DepthFunction& rho(std::int64_t t) const;
  const RandomMeasureApprox& mu(std::int64_t t) const;
  // mass of a word of arbitrary length under mu at theta^t(x)
  double mu_mass(std::int64_t t, std::span<const int> word) const;

 private:
  const ShiftContext* ctx_;
  FiberPoint x_;
  std::int64_t t_lo_, t_hi_;
  OrbitMeasures om_;  // sweep over [t_lo - rho_depth, t_hi] so rho windows are covered
  int rho_depth_;
  mutable std::map<std::int64_t, DepthFunction> rhos_;
  mutable std::map<std::int64_t, RandomMeasureApprox> mus_;
};

}  // namespace rsft
