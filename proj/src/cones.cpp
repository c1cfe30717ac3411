#include "rsft/cones.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rsft/util.hpp"

namespace rsft {

nlohmann::json ConeConstants::to_json() const {
  return {{"alpha", alpha},
          {"v_alpha", v_alpha},
          {"dist_const", dist_const},
          {"ratio_bound", ratio_bound},
          {"op_norm", op_norm},
          {"norm_iter_bound", norm_iter_bound},
          {"two_norm_const", two_norm_const},
          {"tail_cut", tail_cut},
          {"level0_cone", level0_cone},
          {"level0", level0},
          {"level0_capped", level0_capped},
          {"level_chain", level_chain},
          {"level_chain_capped", level_chain_capped},
          {"log_mass_floor", log_mass_floor},
          {"cone_sup_factor", cone_sup_factor},
          {"cone_var_factor", cone_var_factor},
          {"min_push", min_push},
          {"block_steps", block_steps},
          {"log_block_floor", log_block_floor},
          {"log_peel", log_peel},
          {"log_peel_effective", log_peel_effective},
          {"theta_certified", theta_certified},
          {"log_lambda_bound", log_lambda_bound}};
}

ConeMembership cone_membership(const DepthFunction& g, const RandomMeasureApprox& nu,
                               const DepthFunction& ref, const ConeConstants& cc) {
  ConeMembership m;
  m.integral = nu.integrate(g);
  if (!(m.integral > 0.0)) {
    m.sup_margin = m.var_margin = m.dom_margin = -std::numeric_limits<double>::infinity();
    return m;
  }
  if (g.min_value() < -1e-12 * std::max(1.0, g.sup_norm())) return m;
  m.sup_margin = cc.cone_sup_factor * m.integral - g.sup_norm();
  m.var_margin = cc.cone_var_factor * m.integral - g.variation_alpha(cc.alpha);
  double dom = std::numeric_limits<double>::infinity();
  double scale = 2.0 * cc.norm_iter_bound * cc.cone_sup_factor * m.integral;
  for (std::size_t i = 0; i < g.size(); ++i)
    dom = std::min(dom, scale * ref[i] - g[i]);
  m.dom_margin = dom;
  m.in_cone = m.sup_margin >= -1e-12 && m.var_margin >= -1e-12;
  m.in_cone0 = m.in_cone && m.dom_margin >= -1e-12;
  return m;
}

nlohmann::json ConeDerivation::to_json() const {
  nlohmann::json j{{"ok", ok}, {"stage", stage}};
  j["constants"] = constants.to_json();
  return j;
}

ConeDerivation derive_cone_constants(const ShiftContext& ctx, const OrbitData& orbit,
                                     int n_max, int mixing_horizon) {
  ConeDerivation out;
  ConeConstants& cc = out.constants;
  const FiberPoint x = orbit.base();
  const LambdaSequence& lambdas = orbit.lambdas();
  const int L = ctx.max_letter();

  HolderParams h = ctx.holder();
  cc.alpha = h.alpha;
  cc.v_alpha = h.v_alpha;
  cc.dist_const = h.dist_const;
  cc.ratio_bound = h.ratio_bound;
  cc.op_norm = ctx.op_norm_bound();
  cc.log_lambda_bound = lambdas.log_bound();

  // empirical uniform bound on the normalized iterates (exact for the
  // truncated system over the sampled range; matches the oracle value on the
  // solvable models where the analytic K/beta route is far from tight)
  {
    double sup = 1.0;
    double s_worst = 0.0;
    DepthFunction g = DepthFunction::constant(ctx, x, 1.0);
    DepthFunction probe = g;
    for (std::size_t i = 0; i < probe.size(); ++i)
      probe[i] = 1.0 + 0.5 * u64_to_unit(hash_mix(0x9a0bu, i));
    double p_sup = probe.sup_norm(), p_var = probe.variation_alpha(cc.alpha);
    if (!lambdas.covers(x.time, x.time + n_max)) {
      out.stage = "lambda window too short for iterate bound";
      return out;
    }
    for (int n = 1; n <= n_max; ++n) {
      FiberPoint y = advance(x, n - 1);
      g = apply_transfer(ctx, y, g);
      g *= 1.0 / lambdas.at(y.time);
      probe = apply_transfer(ctx, y, probe);
      probe *= 1.0 / lambdas.at(y.time);
      sup = std::max(sup, g.sup_norm());
      double denom = p_sup + std::exp(-cc.alpha * n) * p_var;
      if (denom > 0.0)
        s_worst = std::max(s_worst, probe.variation_alpha(cc.alpha) / denom);
    }
    cc.norm_iter_bound = sup;
    cc.two_norm_const = std::max({s_worst, sup * cc.dist_const * cc.v_alpha, sup});
  }
  const double mh = cc.norm_iter_bound;

  // tail cut k: 1/2 + (2 Mh + 4) e^{-alpha k} <= 1
  cc.tail_cut = static_cast<int>(
      std::ceil(std::log(2.0 * (2.0 * mh + 4.0)) / cc.alpha));
  cc.tail_cut = std::max(cc.tail_cut, 1);

  // hat L 1 decay profile at the base fiber, for the level searches. A level
  // beyond the window (L+1) is vacuous: no represented point starts there, so
  // the condition certifies the truncated system only.
  DepthFunction l1hat = apply_transfer(ctx, x, DepthFunction::constant(ctx, x, 1.0));
  l1hat *= 1.0 / lambdas.at(x.time);
  auto level_for = [&](double bound) -> int {
    int lvl = L + 1;
    for (int e = L; e >= 0; --e) {
      double sup = l1hat.sup_on_letter(e);
      double tail = ctx.model().potential.bounds.column_tail(e, L) / lambdas.at(x.time);
      if (std::isnan(sup)) sup = 0.0;
      if (sup + tail <= bound)
        lvl = e;
      else
        break;
    }
    return lvl;
  };
  const bool finite_in_window = ctx.tail_weight(x) == 0.0;

  int l0 = level_for(1.0 / (2.0 * mh));
  if (l0 > L && !finite_in_window) {
    out.stage = "level0 infeasible: hat L 1 does not decay below 1/(2 Mh) in the window";
    return out;
  }
  cc.level0_cone = l0;

  // finite-range chain l_0 -> l_1 -> ... -> l_k, clipped at the window
  std::vector<int> chain{l0};
  bool capped = false;
  for (int j = 0; j < cc.tail_cut; ++j) {
    int prev = chain.back();
    int lh = 0;
    for (const FiberPoint& f : ctx.audit_fibers()) {
      for (int a = 0; a <= std::min(prev, L); ++a) {
        auto d = ctx.slice(f).out(a);
        if (d && !d->empty())
          lh = std::max(lh, *std::max_element(d->begin(), d->end()));
        else if (!d)
          lh = L + 1;  // unbounded out-set: cap
      }
    }
    if (lh > L) {
      capped = true;
      lh = L;
    }
    chain.push_back(lh);
  }
  cc.level_chain = chain;
  cc.level_chain_capped = capped;

  // mass floor over D = {0..max l_j}: the analytic connecting-block bound,
  // sharpened by the measured minimum cylinder mass of the D-words
  int d_max = std::min(*std::max_element(chain.begin(), chain.end()), L);
  std::vector<int> d_set(static_cast<std::size_t>(d_max) + 1);
  for (int e = 0; e <= d_max; ++e) d_set[static_cast<std::size_t>(e)] = e;
  auto lb = log_beta_floor(ctx, x, d_set, cc.tail_cut, lambdas, mixing_horizon);
  if (!lb) {
    out.stage = "mass floor: connecting block not certified at mixing horizon";
    return out;
  }
  double measured = std::numeric_limits<double>::infinity();
  {
    // admissible D-words of length tail_cut+1, transported cylinder masses
    std::vector<Symbols> stack{{}};
    for (int pos = 0; pos <= cc.tail_cut; ++pos) {
      std::vector<Symbols> next;
      FiberPoint y = advance(x, pos - 1);
      for (const Symbols& w : stack) {
        if (pos == 0) {
          for (int e : d_set) next.push_back({e});
        } else {
          for (int j : ctx.out_set(y, w.back())) {
            if (j > d_max) continue;
            Symbols v = w;
            v.push_back(j);
            next.push_back(std::move(v));
          }
        }
      }
      stack = std::move(next);
    }
    for (const Symbols& w : stack)
      measured = std::min(measured, cylinder_mass(ctx, x, w, orbit.measures()));
  }
  if (!(measured > 0.0) || !std::isfinite(measured)) {
    out.stage = "mass floor: a D-cylinder carries no measured mass at truncation";
    return out;
  }
  cc.log_mass_floor = std::max(*lb, std::log(measured));
  double a_factor = 2.0 * std::max({1.0, mh, std::exp(-cc.log_mass_floor)});
  cc.cone_sup_factor = a_factor;
  cc.cone_var_factor = 2.0 * mh * a_factor + 4.0;

  // Bowen strengthening of the level; A stays fixed (no feedback)
  int l0b = std::max(l0, level_for(1.0 / (2.0 * a_factor * mh)));
  cc.level0 = std::min(l0b, L + 1);
  cc.level0_capped = l0b > L;

  cc.min_push = std::max(1, static_cast<int>(std::ceil(
                                std::log(mh * cc.cone_var_factor) / cc.alpha)));

  // block floor a and block length N (Lemma-style constructive route):
  // q with H e^{-alpha q} <= 1/2, N >= N_0 with a q-block connecting into
  // [0..l0], floor = 1/2 * min weight * e^{-N loglam}
  {
    int q = std::max(1, static_cast<int>(std::ceil(std::log(2.0 * cc.cone_var_factor) / cc.alpha)));
    std::vector<int> l0_set;
    for (int e = 0; e <= std::min(l0, L); ++e) l0_set.push_back(e);
    int n_conn = mixing_bound(ctx, l0_set, l0_set, mixing_horizon);
    if (n_conn < 0) {
      out.stage = "block floor: connector not certified at mixing horizon";
      return out;
    }
    cc.block_steps = std::max(cc.min_push, q + 2 + n_conn);
    // Lemma-l2 style floor: product of the worst per-letter lower bound over
    // the block, times e^{-N loglam}, halved
    double worst_step = 0.0;
    for (int e = 0; e <= L; ++e)
      worst_step = std::min(worst_step, std::log(std::max(ctx.model().potential.bounds.lower(e), 1e-300)));
    cc.log_block_floor = std::log(0.5) + cc.block_steps * (worst_step - cc.log_lambda_bound);
    cc.log_peel = std::min({std::log(1.0 / 3.0), -std::log(cc.cone_var_factor),
                            cc.log_block_floor - std::log(2.0 * mh)});
  }

  // effective peel: eta~ = eta Q_{l0} beta_{l0}
  {
    DepthFunction l1c = l1hat;
    double q_floor = std::numeric_limits<double>::infinity();
    for (int e = 0; e <= std::min(cc.level0, L); ++e) {
      double inf = l1c.inf_on_letter(e);
      if (!std::isnan(inf)) q_floor = std::min(q_floor, inf);
    }
    if (!(q_floor > 0.0) || !std::isfinite(q_floor)) {
      out.stage = "effective peel: inf hat L 1 on [0..l0] vanished";
      return out;
    }
    std::vector<int> l0_set;
    for (int e = 0; e <= std::min(cc.level0, L); ++e) l0_set.push_back(e);
    auto lb0 = log_beta_floor(ctx, x, l0_set, 0, lambdas, mixing_horizon);
    if (!lb0) {
      out.stage = "effective peel: letter mass floor not certified";
      return out;
    }
    cc.log_peel_effective = cc.log_peel + std::log(q_floor) + *lb0;
  }

  // constructive rate: contraction to 1/2 after n_{1} + n_{2} steps
  {
    double log_one_minus = std::log1p(-std::exp(cc.log_peel_effective));
    double blocks_needed;
    if (log_one_minus == 0.0) {
      // eta~ underflowed; use the log-domain first-order value -eta~
      blocks_needed = std::log(0.5 / std::max(2.0, 4.0 * mh)) / (-std::exp(cc.log_peel_effective));
      if (!std::isfinite(blocks_needed)) blocks_needed = 1e300;
    } else {
      blocks_needed = std::log(0.5 / std::max(2.0, 4.0 * mh)) / log_one_minus;
    }
    double n1 = std::ceil(blocks_needed) * cc.block_steps;
    double n2 = std::ceil(std::log(16.0 * cc.cone_var_factor) / cc.alpha);
    double n_half = n1 + n2;
    cc.theta_certified = std::exp(-std::log(2.0) / n_half);
  }
  out.ok = true;
  return out;
}

nlohmann::json BowenReport::to_json() const {
  return {{"peel_in_cone", peel_in_cone},
          {"worst_dom_margin", worst_dom_margin},
          {"block_norms", block_norms},
          {"block_factors", block_factors},
          {"bound_factor", bound_factor},
          {"factors_below_bound", factors_below_bound}};
}

BowenReport bowen_contraction_check(const ShiftContext& ctx, const OrbitData& orbit,
                                    const ConeConstants& cc, const DepthFunction& g,
                                    const DepthFunction& h, int blocks) {
  BowenReport rep;
  const LambdaSequence& lambdas = orbit.lambdas();
  const int n_block = cc.block_steps;
  const FiberPoint x0 = g.fiber();
  std::int64_t base_t = x0.time - orbit.base().time;

  // (i) peel test: hat L^N g - eta chi stays in the slice cone
  {
    DepthFunction pushed = normalized_iterate(ctx, x0, g, n_block, lambdas);
    FiberPoint y = advance(x0, n_block);
    DepthFunction ref = normalized_one_step_back(ctx, y, lambdas.at(y.time - 1));
    // chi = indicator of [0..l0] times hat L_{theta^-1} 1
    DepthFunction chi = ref;
    for (std::size_t i = 0; i < chi.size(); ++i)
      if (chi.words().words[i][0] > cc.level0) chi[i] = 0.0;
    DepthFunction peeled = pushed - chi * std::exp(cc.log_peel);
    ConeMembership m = cone_membership(peeled, orbit.nu(base_t + n_block), ref, cc);
    rep.peel_in_cone = m.in_cone0 && peeled.min_value() >= -1e-15;
    rep.worst_dom_margin = m.dom_margin;
  }

  // (ii) pair contraction per block
  DepthFunction dg = g, dh = h;
  double prev = -1.0;
  for (int b = 0; b <= blocks; ++b) {
    DepthFunction diff = dg - dh;
    double norm = diff.holder_norm(cc.alpha);
    rep.block_norms.push_back(norm);
    if (prev > 0.0 && norm > 0.0) rep.block_factors.push_back(norm / prev);
    prev = norm;
    if (b == blocks) break;
    FiberPoint y = advance(x0, b * n_block);
    dg = normalized_iterate(ctx, y, dg, n_block, lambdas);
    dh = normalized_iterate(ctx, y, dh, n_block, lambdas);
  }
  rep.bound_factor = 1.0 - std::exp(cc.log_peel_effective);
  rep.factors_below_bound = true;
  for (double f : rep.block_factors)
    if (f > rep.bound_factor + 1e-12) rep.factors_below_bound = false;
  return rep;
}

DepthFunction random_cone_element(const ShiftContext& ctx, const OrbitData& orbit,
                                  std::int64_t t, std::uint64_t seed) {
  FiberPoint y = advance(orbit.base(), t);
  DepthFunction g = DepthFunction::constant(ctx, y, 1.0);
  for (std::size_t i = 0; i < g.size(); ++i)
    g[i] = 0.5 + u64_to_unit(hash_mix(seed, i));
  double z = orbit.nu(t).integrate(g);
  g *= 1.0 / z;
  return g;
}

}  // namespace rsft
