#include "rsft/gap.hpp"

#include <cmath>

namespace rsft {

nlohmann::json GapFit::to_json() const {
  return {{"ns", ns},
          {"rates", rates},
          {"ledgers", ledgers},
          {"theta", theta},
          {"prefactor", prefactor},
          {"fit_residual", fit_residual},
          {"stride", stride},
          {"below_resolution", below_resolution},
          {"certified", certified},
          {"floor", floor}};
}

GapFit gap_fit(const ShiftContext& ctx, const OrbitData& orbit, const DepthFunction& g,
               int n_max, double residual_tol) {
  GapFit fit;
  const FiberPoint x = g.fiber();
  std::int64_t base_t = x.time - orbit.base().time;
  const double alpha = ctx.model().potential.alpha;
  fit.stride = ctx.model().env.kind == EnvKind::periodic ? ctx.model().env.period : 1;

  double nu_g = orbit.nu(base_t).integrate(g);
  DepthFunction cur = g;
  for (int n = 1; n <= n_max; ++n) {
    FiberPoint y = advance(x, n - 1);
    cur = apply_transfer(ctx, y, cur);
    cur *= 1.0 / orbit.lambdas().at(y.time);
    DepthFunction dev = cur - orbit.rho(base_t + n) * nu_g;
    fit.ns.push_back(n);
    fit.rates.push_back(dev.holder_norm(alpha));
    fit.ledgers.push_back(cur.ledger());
  }

  // log-linear fit over stride multiples beyond the depth transient, skipping
  // everything at the resolution floor
  const int d = ctx.depth();
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < fit.rates.size(); ++i) {
    int n = fit.ns[i];
    if (n < d || n % fit.stride != 0) continue;
    if (fit.rates[i] <= fit.floor) continue;
    xs.push_back(static_cast<double>(n));
    ys.push_back(std::log(fit.rates[i]));
  }
  if (xs.size() < 3) {
    fit.below_resolution = true;
    fit.theta = 0.0;
    fit.certified = false;
    return fit;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  double inter = (sy - slope * sx) / m;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double r = ys[i] - (inter + slope * xs[i]);
    rss += r * r;
  }
  fit.theta = std::exp(slope);
  fit.prefactor = std::exp(inter);
  fit.fit_residual = std::sqrt(rss / m);
  fit.certified = fit.theta > 0.0 && fit.theta < 1.0 && fit.fit_residual < residual_tol;
  return fit;
}

}  // namespace rsft
