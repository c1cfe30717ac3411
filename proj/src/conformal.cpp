#include "rsft/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rsft {

RandomMeasureApprox phi_map(const ShiftContext& ctx, const RandomMeasureApprox& nu_theta,
                            const FiberPoint& x, double* normalizer) {
  FiberPoint y = advance(x, 1);
  if (!(nu_theta.fiber == y))
    throw std::invalid_argument("phi_map: measure must live at theta(x)");
  if (nu_theta.words.get() != ctx.words(y).get())
    throw std::invalid_argument("phi_map: mismatched truncation parameters");
  auto ws = ctx.words(x);
  const int d = ctx.depth();
  RandomMeasureApprox out;
  out.fiber = x;
  out.words = ws;
  out.masses.assign(ws->size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < ws->size(); ++i) {
    const Symbols& v = ws->words[i];
    double cont;
    if (d >= 2) {
      cont = nu_theta.mass_of_prefix(std::span<const int>(v.data() + 1, v.size() - 1));
    } else {
      cont = 0.0;
      for (int j : ctx.out_set(x, v[0])) {
        int single[1] = {j};
        cont += nu_theta.mass_at(std::span<const int>(single, 1));
      }
    }
    double m = ctx.weight(x, v) * cont;
    out.masses[i] = m;
    total += m;
  }
  if (!(total > 1e-300))
    throw std::runtime_error("phi_map: degenerate normalizer (total mass below floor)");
  for (double& m : out.masses) m /= total;
  if (normalizer) *normalizer = total;
  out.tail_bound = (ctx.op_norm_bound() * nu_theta.tail_bound + ctx.tail_weight(x)) / total;
  out.pullback_depth = nu_theta.pullback_depth + 1;
  return out;
}

namespace {

// Dirac at the lexicographically first admissible depth-d word starting in F,
// skipping `skip` viable first letters.
RandomMeasureApprox dirac_anchor(const ShiftContext& ctx, const FiberPoint& x, int skip,
                                 Symbols* anchor_word) {
  auto ws = ctx.words(x);
  int skipped = 0;
  for (int f : ctx.model().cylinder_set) {
    auto [lo, hi] = ws->letter_range(f);
    if (lo == hi) continue;
    if (skipped++ < skip) continue;
    RandomMeasureApprox nu;
    nu.fiber = x;
    nu.words = ws;
    nu.masses.assign(ws->size(), 0.0);
    nu.masses[static_cast<std::size_t>(lo)] = 1.0;  // greedy smallest continuation
    if (anchor_word) *anchor_word = ws->words[static_cast<std::size_t>(lo)];
    return nu;
  }
  throw std::runtime_error("anchor starved: no admissible anchor in F at this truncation");
}

}  // namespace

nlohmann::json ConformalEstimate::to_json() const {
  return {{"lambda", lambda},
          {"lambda_error", lambda_error},
          {"pullback_depth", nu.pullback_depth},
          {"tail_bound", nu.tail_bound},
          {"tv_increments", tv_increments},
          {"converged", converged},
          {"tv_tolerance", tv_tolerance},
          {"anchor", anchor_word}};
}

ConformalEstimate estimate_conformal(const ShiftContext& ctx, const FiberPoint& x, int n,
                                     const AnchorPolicy& policy, double tv_tol) {
  if (n < 1) throw std::invalid_argument("estimate_conformal: pullback depth must be >= 1");
  ConformalEstimate est;
  est.tv_tolerance = tv_tol;

  // nu^(m) at x pulled back from the anchor at theta^m(x); the recursion
  // nu^(m)_x = phi(nu^(m-1)_{theta x}) holds exactly along each sweep.
  std::optional<RandomMeasureApprox> prev;
  for (int m = std::max(1, n - 8); m <= n; ++m) {
    RandomMeasureApprox cur = dirac_anchor(ctx, advance(x, m), policy.skip,
                                           m == n ? &est.anchor_word : nullptr);
    double norm = 0.0;
    for (int t = m - 1; t >= 0; --t) cur = phi_map(ctx, cur, advance(x, t), &norm);
    if (prev) est.tv_increments.push_back(cur.tv_distance(*prev));
    if (m == n) {
      est.nu = cur;
      est.lambda = norm;
      est.lambda_error = ctx.op_norm_bound() * cur.tail_bound + ctx.tail_weight(x);
    }
    prev = std::move(cur);
  }
  int streak = 0;
  for (double inc : est.tv_increments) streak = inc <= tv_tol ? streak + 1 : 0;
  est.converged = streak >= 3;
  return est;
}

double lambda_estimate(const ShiftContext& ctx, const FiberPoint& x,
                       const RandomMeasureApprox& nu_theta, double* error) {
  FiberPoint y = advance(x, 1);
  if (!(nu_theta.fiber == y))
    throw std::invalid_argument("lambda_estimate: measure must live at theta(x)");
  DepthFunction l1 = apply_transfer(ctx, x, DepthFunction::constant(ctx, x, 1.0));
  double v = nu_theta.integrate(l1);
  if (error)
    *error = ctx.tail_weight(x) + ctx.op_norm_bound() * nu_theta.tail_bound;
  return v;
}

double conformality_residual(const ShiftContext& ctx, const FiberPoint& x,
                             const RandomMeasureApprox& nu_x,
                             const RandomMeasureApprox& nu_theta, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("conformality_residual: lambda <= 0");
  FiberPoint y = advance(x, 1);
  if (!(nu_x.fiber == x) || !(nu_theta.fiber == y))
    throw std::invalid_argument("conformality_residual: measures at wrong fibers");
  auto ws = ctx.words(x);
  const int d = ctx.depth();
  double dist = 0.0;
  for (std::size_t i = 0; i < ws->size(); ++i) {
    const Symbols& v = ws->words[i];
    double cont;
    if (d >= 2) {
      cont = nu_theta.mass_of_prefix(std::span<const int>(v.data() + 1, v.size() - 1));
    } else {
      cont = 0.0;
      for (int j : ctx.out_set(x, v[0])) {
        int single[1] = {j};
        cont += nu_theta.mass_at(std::span<const int>(single, 1));
      }
    }
    double pulled = ctx.weight(x, v) * cont / lambda;
    dist += std::abs(pulled - nu_x.masses[i]);
  }
  return 0.5 * dist;
}

const RandomMeasureApprox& OrbitMeasures::nu(std::int64_t t) const {
  std::int64_t i = t - t_lo;  // absolute times
  if (i < 0 || i >= static_cast<std::int64_t>(nus.size()))
    throw std::out_of_range("OrbitMeasures: time outside window");
  return nus[static_cast<std::size_t>(i)];
}

OrbitMeasures orbit_measures(const ShiftContext& ctx, const FiberPoint& x, std::int64_t t_lo,
                             std::int64_t t_hi, int depth, const AnchorPolicy& policy) {
  if (t_hi < t_lo) throw std::invalid_argument("orbit_measures: empty window");
  OrbitMeasures om;
  om.t_lo = x.time + t_lo;
  om.nus.resize(static_cast<std::size_t>(t_hi - t_lo + 1));
  om.lambdas.t_begin = x.time + t_lo;
  om.lambdas.values.assign(static_cast<std::size_t>(t_hi - t_lo + 1), 0.0);
  std::int64_t top = t_hi + depth;
  RandomMeasureApprox cur = dirac_anchor(ctx, advance(x, top), policy.skip, nullptr);
  for (std::int64_t t = top - 1; t >= t_lo; --t) {
    double norm = 0.0;
    cur = phi_map(ctx, cur, advance(x, t), &norm);
    if (t <= t_hi) {
      om.nus[static_cast<std::size_t>(t - t_lo)] = cur;
      om.lambdas.values[static_cast<std::size_t>(t - t_lo)] = norm;
    }
  }
  return om;
}

double cylinder_mass(const ShiftContext& ctx, const FiberPoint& x, std::span<const int> word,
                     const OrbitMeasures& om) {
  if (word.empty()) throw std::invalid_argument("cylinder_mass: empty word");
  const int d = ctx.depth();
  const int q = static_cast<int>(word.size());
  if (q <= d) return om.nu(x.time).mass_of_prefix(word);
  for (int j = 0; j + 1 < q; ++j)
    if (!ctx.slice(advance(x, j)).entry(word[static_cast<std::size_t>(j)],
                                        word[static_cast<std::size_t>(j + 1)]))
      return 0.0;
  // transport the leading letters one at a time: each step contributes the
  // depth-d block weight over the local normalizer
  double log_m = 0.0;
  for (int j = 0; j < q - d; ++j) {
    FiberPoint y = advance(x, j);
    log_m += ctx.phi(y, word.subspan(static_cast<std::size_t>(j), static_cast<std::size_t>(d)));
    log_m -= std::log(om.lambdas.at(y.time));
  }
  double tail_mass = om.nu(x.time + (q - d)).mass_at(word.subspan(static_cast<std::size_t>(q - d)));
  return std::exp(log_m) * tail_mass;
}

std::optional<double> log_beta_floor(const ShiftContext& ctx, const FiberPoint& x,
                                     const std::vector<int>& letters, int n,
                                     const LambdaSequence& lambdas, int mixing_horizon) {
  const std::vector<int>& f_set = ctx.model().cylinder_set;
  int n_conn = mixing_bound(ctx, letters, f_set, mixing_horizon);
  if (n_conn < 0) return std::nullopt;
  const int steps = n + n_conn + 2;  // transitions from the D-block into [F]
  const int L = ctx.max_letter();
  const double inf = std::numeric_limits<double>::infinity();

  // min over admissible words w_0..w_steps with w_i in D for i <= n and
  // w_steps in F of the Birkhoff weight; dynamic program over the window
  std::vector<double> cur(static_cast<std::size_t>(L) + 1, inf), nxt;
  for (int e : letters)
    if (e <= L) cur[static_cast<std::size_t>(e)] = 0.0;
  for (int t = 0; t < steps; ++t) {
    nxt.assign(static_cast<std::size_t>(L) + 1, inf);
    FiberPoint y = advance(x, t);
    bool constrained = t + 1 <= n;  // next letter still inside the D-block
    for (int e = 0; e <= L; ++e) {
      double base = cur[static_cast<std::size_t>(e)];
      if (!std::isfinite(base)) continue;
      int letter[1] = {e};
      double w = ctx.phi(y, std::span<const int>(letter, 1));
      // depth-1 evaluation of phi on the leading letter; deeper potentials
      // are bounded below through their letter bounds
      if (ctx.model().potential.depth > 1)
        w = std::log(std::max(ctx.model().potential.bounds.lower(e), 1e-300));
      for (int j : ctx.out_set(y, e)) {
        if (constrained && !std::binary_search(letters.begin(), letters.end(), j)) continue;
        double cand = base + w;
        if (cand < nxt[static_cast<std::size_t>(j)]) nxt[static_cast<std::size_t>(j)] = cand;
      }
    }
    cur.swap(nxt);
  }
  double log_q = inf;
  for (int f : f_set)
    if (f <= L) log_q = std::min(log_q, cur[static_cast<std::size_t>(f)]);
  if (!std::isfinite(log_q)) return std::nullopt;
  double q_f = static_cast<double>(f_set.size());
  return -std::log(2.0 * q_f) - steps * lambdas.log_bound() + log_q;
}

nlohmann::json TightnessReport::to_json() const {
  return {{"certified", certified},     {"message", message},
          {"contraction_floor", contraction_floor},
          {"gammas", gammas},           {"levels", levels},
          {"margin_step0", margin_step0}, {"mass_margins", mass_margins},
          {"log_beta", log_beta},       {"min_mass", min_mass},
          {"beta_ok", beta_ok}};
}

TightnessReport tightness_diagnostic(const ShiftContext& ctx, const FiberPoint& x,
                                     const RandomMeasureApprox& nu,
                                     const SummabilityReport& summ,
                                     const ConditionCReport& cond_c,
                                     const Symbols& anchor_word, int n_steps,
                                     const std::vector<int>& beta_letters, int n_beta,
                                     const LambdaSequence& lambdas, int mixing_horizon) {
  TightnessReport rep;
  const int L = ctx.max_letter();
  const double m_bound = summ.op_norm;
  const double c = 0.5 * cond_c.denominator;
  rep.contraction_floor = c;
  if (!(c > 0.0)) {
    rep.message = "tightness not certified: contraction floor vanished";
    return rep;
  }

  auto z_at = [&](int l) {
    return l >= L ? summ.z_tail : summ.z_profile[static_cast<std::size_t>(l)];
  };

  const int q_f = ctx.model().cylinder_set.empty() ? 0 : ctx.model().cylinder_set.back();
  rep.gammas.push_back(0.5);
  int prev_level = 0;
  bool feasible = true;
  for (int n = 0; n < n_steps; ++n) {
    double gamma_n = rep.gammas.back();
    int want = q_f;  // N_0 = q
    if (n > 0) {
      want = prev_level;
      while (want <= L && !(z_at(want) <= 0.5 * c * gamma_n)) ++want;
      if (n < static_cast<int>(anchor_word.size()))
        want = std::max(want, anchor_word[static_cast<std::size_t>(n)]);
      if (want > L || !(z_at(want) <= 0.5 * c * gamma_n)) {
        feasible = false;
        rep.message = "tightness not certified: Z level infeasible at truncation (step " +
                      std::to_string(n) + ")";
        break;
      }
    }
    rep.levels.push_back(want);
    prev_level = want;
    double gamma_next = (c * gamma_n - z_at(want)) / m_bound;
    if (!(gamma_next > 0.0)) {
      feasible = false;
      rep.message = "tightness not certified: gamma recursion collapsed";
      break;
    }
    rep.gammas.push_back(gamma_next);
  }

  if (feasible) {
    rep.margin_step0 =
        (0.25 - cond_c.kappa) * cond_c.denominator - m_bound * rep.gammas[1];
    // depth-d projection of the K_n constraint: nu-mass of violating words
    const auto& ws = *nu.words;
    for (int n = 0; n + ctx.depth() <= static_cast<int>(rep.levels.size()); ++n) {
      double viol = 0.0;
      for (std::size_t i = 0; i < ws.size(); ++i) {
        const Symbols& w = ws.words[i];
        for (int k = 0; k < static_cast<int>(w.size()); ++k) {
          if (n + k >= static_cast<int>(rep.levels.size())) break;
          if (w[static_cast<std::size_t>(k)] > rep.levels[static_cast<std::size_t>(n + k)]) {
            viol += nu.masses[i];
            break;
          }
        }
      }
      rep.mass_margins.push_back(rep.gammas[static_cast<std::size_t>(n)] - viol);
    }
  }

  auto lb = log_beta_floor(ctx, x, beta_letters, n_beta, lambdas, mixing_horizon);
  if (lb) {
    rep.log_beta = *lb;
    // measured minimum over admissible D-words of length n_beta+1 (projected
    // to the representation depth)
    int len = std::min(n_beta + 1, ctx.depth());
    double min_mass = std::numeric_limits<double>::infinity();
    auto ws_n = ctx.words_len(x, len);
    for (const Symbols& w : ws_n->words) {
      bool in_d = true;
      for (int s : w)
        if (!std::binary_search(beta_letters.begin(), beta_letters.end(), s)) {
          in_d = false;
          break;
        }
      if (!in_d) continue;
      min_mass = std::min(min_mass, nu.mass_of_prefix(w));
    }
    rep.min_mass = std::isfinite(min_mass) ? min_mass : 0.0;
    rep.beta_ok = std::log(std::max(rep.min_mass, 1e-300)) >= rep.log_beta;
  }

  bool margins_ok = rep.margin_step0 >= -1e-12;
  for (double m : rep.mass_margins) margins_ok = margins_ok && m >= -1e-12;
  rep.certified = feasible && margins_ok && (!lb || rep.beta_ok);
  if (rep.certified) rep.message = "tightness recursion certified at truncation";
  else if (feasible && rep.message.empty())
    rep.message = "tightness margins violated";
  return rep;
}

}  // namespace rsft
