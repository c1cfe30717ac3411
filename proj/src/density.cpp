#include "rsft/density.hpp"

#include <cmath>
#include <stdexcept>

namespace rsft {

DepthFunction rho_estimate(const ShiftContext& ctx, const FiberPoint& x, int k,
                           const LambdaSequence& lambdas) {
  if (k < 0) throw std::invalid_argument("rho_estimate: k must be >= 0");
  FiberPoint start = advance(x, -k);
  DepthFunction one = DepthFunction::constant(ctx, start, 1.0);
  return normalized_iterate(ctx, start, one, k, lambdas);
}

double fixed_point_residual(const ShiftContext& ctx, const FiberPoint& x,
                            const DepthFunction& rho_x, const DepthFunction& rho_theta,
                            double lambda_x) {
  DepthFunction pushed = apply_transfer(ctx, x, rho_x);
  pushed *= 1.0 / lambda_x;
  DepthFunction diff = pushed - rho_theta;
  return diff.holder_norm(ctx.model().potential.alpha);
}

RandomMeasureApprox invariant_measure(const ShiftContext& ctx, const FiberPoint& x,
                                      const DepthFunction& rho_x,
                                      const RandomMeasureApprox& nu_x) {
  if (!(rho_x.fiber() == x) || !(nu_x.fiber == x))
    throw std::invalid_argument("invariant_measure: inputs at wrong fiber");
  if (rho_x.words_ptr().get() != ctx.words(x).get())
    throw std::invalid_argument("invariant_measure: mismatched truncation parameters");
  double total = nu_x.integrate(rho_x);
  if (!(total > 0.0)) throw std::runtime_error("invariant_measure: rho integral nonpositive");
  RandomMeasureApprox mu;
  mu.fiber = x;
  mu.words = nu_x.words;
  mu.masses.resize(nu_x.masses.size());
  for (std::size_t i = 0; i < mu.masses.size(); ++i)
    mu.masses[i] = rho_x[i] * nu_x.masses[i] / total;
  mu.tail_bound = nu_x.tail_bound * rho_x.sup_norm() / total + rho_x.ledger();
  mu.pullback_depth = nu_x.pullback_depth;
  return mu;
}

double invariance_residual(const ShiftContext& ctx, const FiberPoint& x,
                           const RandomMeasureApprox& mu_x,
                           const RandomMeasureApprox& mu_theta) {
  const int d = ctx.depth();
  if (d < 2) throw std::invalid_argument("invariance_residual: depth must be >= 2");
  // pushforward of mu_x onto depth-(d-1) cylinders at theta(x):
  // (sigma mu)_([w']) = sum over first letters e of mu_x([e w'])
  auto ws_theta = ctx.words_len(advance(x, 1), d - 1);
  double dist = 0.0;
  Symbols key(static_cast<std::size_t>(d));
  for (const Symbols& w : ws_theta->words) {
    std::copy(w.begin(), w.end(), key.begin() + 1);
    double pushed = 0.0;
    for (int e : ctx.in_set(x, w.front())) {
      key[0] = e;
      pushed += mu_x.mass_at(key);
    }
    dist += std::abs(pushed - mu_theta.mass_of_prefix(w));
  }
  return 0.5 * dist;
}

OrbitData::OrbitData(const ShiftContext& ctx, const FiberPoint& x, std::int64_t t_lo,
                     std::int64_t t_hi, int pullback_depth, int rho_depth)
    : ctx_(&ctx),
      x_(x),
      t_lo_(t_lo),
      t_hi_(t_hi),
      om_(orbit_measures(ctx, x, t_lo - rho_depth, t_hi, pullback_depth)),
      rho_depth_(rho_depth) {}

const DepthFunction& OrbitData::rho(std::int64_t t) const {
  auto it = rhos_.find(t);
  if (it == rhos_.end()) {
    FiberPoint y = advance(x_, t);
    DepthFunction r = rho_estimate(*ctx_, y, rho_depth_, om_.lambdas);
    // pin the slice normalization: the densities we report integrate to one
    double z = nu(t).integrate(r);
    if (!(z > 0.0)) throw std::runtime_error("OrbitData: rho integral nonpositive");
    r *= 1.0 / z;
    it = rhos_.emplace(t, std::move(r)).first;
  }
  return it->second;
}

const RandomMeasureApprox& OrbitData::mu(std::int64_t t) const {
  auto it = mus_.find(t);
  if (it == mus_.end())
    it = mus_.emplace(t, invariant_measure(*ctx_, advance(x_, t), rho(t), nu(t))).first;
  return it->second;
}

double OrbitData::mu_mass(std::int64_t t, std::span<const int> word) const {
  FiberPoint y = advance(x_, t);
  const int d = ctx_->depth();
  if (static_cast<int>(word.size()) <= d) {
    // marginalize the depth-d masses
    const RandomMeasureApprox& m = mu(t);
    return m.mass_of_prefix(word);
  }
  // rho is constant on depth-d cylinders: mu([u]) = rho(u|_d) nu([u])
  double nu_mass = cylinder_mass(*ctx_, y, word, om_);
  const DepthFunction& r = rho(t);
  return r.at(word.subspan(0, static_cast<std::size_t>(d))) * nu_mass;
}

}  // namespace rsft
