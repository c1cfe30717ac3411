#include "rsft/stochastics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "rsft/util.hpp"

namespace rsft {

FiberFunction letter_indicator(int letter) {
  return [letter](const ShiftContext& ctx, const FiberPoint& x) {
    int single[1] = {letter};
    return DepthFunction::indicator_prefix(ctx, x, std::span<const int>(single, 1));
  };
}

FiberFunction coordinate_minus(double shift) {
  return [shift](const ShiftContext& ctx, const FiberPoint& x) {
    DepthFunction g = DepthFunction::constant(ctx, x, 0.0);
    for (std::size_t i = 0; i < g.size(); ++i)
      g[i] = static_cast<double>(g.words().words[i][0]) - shift;
    return g;
  };
}

int thread_count() {
  if (const char* s = std::getenv("RSFT_THREADS")) {
    int n = std::atoi(s);
    if (n >= 1) return n;
  }
  return 1;
}

nlohmann::json CorrelationCurve::to_json() const {
  return {{"ns", ns},
          {"values", values},
          {"signed_values", signed_values},
          {"prefactor", prefactor},
          {"envelope_prefactor", envelope_prefactor},
          {"theta", theta},
          {"fit_residual", fit_residual},
          {"certified", certified},
          {"norm_g", norm_g},
          {"norm_h", norm_h},
          {"p", p_exp},
          {"q", q_exp}};
}

CorrelationCurve correlation(const ShiftContext& ctx, const std::vector<FiberPoint>& fibers,
                             const FiberFunction& g, const FiberFunction& h, int n_max,
                             int pullback, double p_exp, double q_exp) {
  if (fibers.empty()) throw std::invalid_argument("correlation: no fibers");
  CorrelationCurve curve;
  curve.p_exp = p_exp;
  curve.q_exp = q_exp;
  const double alpha = ctx.model().potential.alpha;
  curve.signed_values.assign(static_cast<std::size_t>(n_max) + 1, 0.0);

  double norm_g_acc = 0.0, norm_h_acc = 0.0;
  for (const FiberPoint& x : fibers) {
    OrbitData orbit(ctx, x, 0, n_max, pullback, pullback);
    DepthFunction hx = h(ctx, x);
    const RandomMeasureApprox& mu0 = orbit.mu(0);
    double center = mu0.integrate(hx);
    hx += DepthFunction::constant(ctx, x, -center);

    // norms for the envelope: |g|_L1(nu) and ||h||_alpha
    DepthFunction gx = g(ctx, x);
    double l1 = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i)
      l1 += std::abs(gx[i]) * orbit.nu(0).masses[i];
    norm_g_acc += p_exp <= 0.0 ? l1 : std::pow(l1, p_exp);
    double hn = hx.holder_norm(alpha);
    norm_h_acc = q_exp <= 0.0 ? std::max(norm_h_acc, hn) : norm_h_acc + std::pow(hn, q_exp);

    DepthFunction cur = hx;
    cur.pointwise_mul(orbit.rho(0));  // h rho, transported below
    {
      DepthFunction prod0 = cur;
      prod0.pointwise_mul(gx);
      curve.signed_values[0] += orbit.nu(0).integrate(prod0);
    }
    for (int n = 1; n <= n_max; ++n) {
      FiberPoint y = advance(x, n - 1);
      cur = apply_transfer(ctx, y, cur);
      cur *= 1.0 / orbit.lambdas().at(y.time);
      DepthFunction gn = g(ctx, advance(x, n));
      DepthFunction prod = cur;
      prod.pointwise_mul(gn);
      curve.signed_values[static_cast<std::size_t>(n)] += orbit.nu(n).integrate(prod);
    }
  }
  const double nf = static_cast<double>(fibers.size());
  for (double& v : curve.signed_values) v /= nf;
  curve.norm_g = p_exp <= 0.0 ? norm_g_acc / nf : std::pow(norm_g_acc / nf, 1.0 / p_exp);
  curve.norm_h = q_exp <= 0.0 ? norm_h_acc : std::pow(norm_h_acc / nf, 1.0 / q_exp);

  curve.ns.resize(static_cast<std::size_t>(n_max) + 1);
  curve.values.resize(curve.signed_values.size());
  for (int n = 0; n <= n_max; ++n) {
    curve.ns[static_cast<std::size_t>(n)] = n;
    curve.values[static_cast<std::size_t>(n)] = std::abs(curve.signed_values[static_cast<std::size_t>(n)]);
  }

  // log-linear fit over the positive part beyond the depth transient
  std::vector<double> xs, ys;
  for (int n = ctx.depth(); n <= n_max; ++n) {
    double v = curve.values[static_cast<std::size_t>(n)];
    if (v > 1e-13) {
      xs.push_back(n);
      ys.push_back(std::log(v));
    }
  }
  if (xs.size() >= 3) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, m = static_cast<double>(xs.size());
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
    curve.theta = std::exp(slope);
    curve.prefactor = std::exp(inter);
    curve.fit_residual = std::sqrt(rss / m);
    curve.certified = curve.theta > 0.0 && curve.theta < 1.0;
    double norms = std::max(curve.norm_g * curve.norm_h, 1e-300);
    double env = 0.0;
    for (int n = 1; n <= n_max; ++n)
      env = std::max(env, curve.values[static_cast<std::size_t>(n)] /
                              (std::pow(curve.theta, n) * norms));
    curve.envelope_prefactor = env;
  }
  return curve;
}

namespace {

struct MuTables {
  // per orbit time t: prefix-marginal CDF walk uses the depth-d masses
  std::vector<const RandomMeasureApprox*> mus;
};

int draw_initial(const RandomMeasureApprox& mu, double u, Symbols* state, int d) {
  // walk depth-d masses; the initial state is the (d-1)-prefix
  double acc = 0.0;
  for (std::size_t i = 0; i < mu.masses.size(); ++i) {
    acc += mu.masses[i];
    if (u <= acc || i + 1 == mu.masses.size()) {
      state->assign(mu.words->words[i].begin(), mu.words->words[i].end() - (d >= 2 ? 1 : 0));
      return mu.words->words[i].back();
    }
  }
  return -1;
}

}  // namespace

SamplePaths sample_mu(const ShiftContext& ctx, const OrbitData& orbit, int length, int count,
                      std::uint64_t seed) {
  const int d = ctx.depth();
  if (length < d) throw std::invalid_argument("sample_mu: length must cover the depth");
  SamplePaths out;
  out.length = length;
  out.count = count;
  out.symbols.assign(static_cast<std::size_t>(length) * static_cast<std::size_t>(count), -1);

  // pre-warm the shared tables so the parallel section only reads
  MuTables tables;
  tables.mus.resize(static_cast<std::size_t>(length - d + 2));
  for (int t = 0; t + d - 1 <= length; ++t) tables.mus[static_cast<std::size_t>(t)] = &orbit.mu(t);

  std::vector<int> resampled(static_cast<std::size_t>(count), 0);
  auto worker = [&](int begin, int end) {
    Symbols state;
    Symbols key;
    for (int p = begin; p < end; ++p) {
      CounterRng rng(seed, static_cast<std::uint64_t>(p));
      int* path = out.symbols.data() + static_cast<std::size_t>(p) * static_cast<std::size_t>(length);
      // initial depth-d block from mu at time 0
      int last = draw_initial(*tables.mus[0], rng.next_unit(), &state, d);
      int guard = 0;
      while (last < 0 && ++guard < 16) {
        ++resampled[static_cast<std::size_t>(p)];
        last = draw_initial(*tables.mus[0], rng.next_unit(), &state, d);
      }
      for (int k = 0; k < static_cast<int>(state.size()); ++k) path[k] = state[k];
      path[state.size()] = last;
      int filled = static_cast<int>(state.size()) + 1;  // = d
      // extend: next letter given the trailing (d-1)-state, law from mu at
      // the advancing fiber
      while (filled < length) {
        int t = filled - d + 1;
        const RandomMeasureApprox& mu = *tables.mus[static_cast<std::size_t>(t)];
        key.assign(path + t, path + filled);
        auto [lo, hi] = mu.words->prefix_range(key);
        double total = 0.0;
        for (int i = lo; i < hi; ++i) total += mu.masses[static_cast<std::size_t>(i)];
        if (!(total > 0.0)) {
          // zero-mass prefix: log and restart the path from scratch
          ++resampled[static_cast<std::size_t>(p)];
          last = draw_initial(*tables.mus[0], rng.next_unit(), &state, d);
          for (int k = 0; k < static_cast<int>(state.size()); ++k) path[k] = state[k];
          path[state.size()] = last;
          filled = d;
          continue;
        }
        double u = rng.next_unit() * total;
        double acc = 0.0;
        int chosen = -1;
        for (int i = lo; i < hi; ++i) {
          acc += mu.masses[static_cast<std::size_t>(i)];
          if (u <= acc || i + 1 == hi) {
            chosen = mu.words->words[static_cast<std::size_t>(i)].back();
            break;
          }
        }
        path[filled++] = chosen;
      }
    }
  };

  int threads = std::min(thread_count(), count);
  if (threads <= 1) {
    worker(0, count);
  } else {
    std::vector<std::thread> pool;
    int chunk = (count + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      int b = t * chunk, e = std::min(count, b + chunk);
      if (b >= e) break;
      pool.emplace_back(worker, b, e);
    }
    for (auto& th : pool) th.join();
  }
  for (int r : resampled) out.resampled += r;
  return out;
}

nlohmann::json CltResult::to_json() const {
  nlohmann::json vc = nlohmann::json::array();
  for (auto [n, v] : var_curve) vc.push_back({{"n", n}, {"var_over_n", v}});
  return {{"horizon", horizon},       {"samples", samples},
          {"sigma2_gk", sigma2_gk},   {"sigma2_emp", sigma2_emp},
          {"ks_stat", ks_stat},       {"var_curve", vc},
          {"variance_stable", variance_stable}, {"degenerate", degenerate},
          {"pass", pass},             {"gk_terms", gk_terms},
          {"hist_edges", hist_edges}, {"hist_counts", hist_counts}};
}

CltResult clt_test(const ShiftContext& ctx, const std::vector<FiberPoint>& fibers,
                   const FiberFunction& psi, int horizon, int samples, std::uint64_t seed,
                   int pullback, double ks_threshold) {
  if (fibers.empty()) throw std::invalid_argument("clt_test: no fibers");
  CltResult res;
  res.horizon = horizon;
  res.samples = samples;
  const int d = ctx.depth();
  const int path_len = horizon + d - 1;

  // Green-Kubo variance from the exact correlation integrals, truncated when
  // three consecutive terms drop below 1e-3 of the leading term
  int gk_max = std::min(horizon, 64);
  CorrelationCurve corr = correlation(ctx, fibers, psi, psi, gk_max, pullback);
  double lead = corr.signed_values[0];
  if (std::abs(lead) < 1e-12) {
    res.degenerate = true;
    res.sigma2_gk = 0.0;
    return res;
  }
  double gk = lead;
  int low_streak = 0;
  for (int j = 1; j <= gk_max; ++j) {
    gk += 2.0 * corr.signed_values[static_cast<std::size_t>(j)];
    res.gk_terms = j;
    low_streak =
        std::abs(corr.signed_values[static_cast<std::size_t>(j)]) < 1e-3 * std::abs(lead)
            ? low_streak + 1
            : 0;
    if (low_streak >= 3) break;
  }
  res.sigma2_gk = gk;

  // quenched paths, annealed aggregation: fibers round-robin over paths
  std::vector<double> sums(static_cast<std::size_t>(samples), 0.0);
  std::vector<double> sums_half(static_cast<std::size_t>(samples), 0.0);
  std::vector<double> sums_quarter(static_cast<std::size_t>(samples), 0.0);
  const int nf = static_cast<int>(fibers.size());
  for (int f = 0; f < nf; ++f) {
    OrbitData orbit(ctx, fibers[static_cast<std::size_t>(f)], 0, path_len, pullback, pullback);
    // centered psi values per orbit time, then path sums
    std::vector<DepthFunction> psis;
    psis.reserve(static_cast<std::size_t>(horizon));
    for (int t = 0; t < horizon; ++t) {
      DepthFunction p = psi(ctx, advance(fibers[static_cast<std::size_t>(f)], t));
      double center = orbit.mu(t).integrate(p);
      p += DepthFunction::constant(ctx, advance(fibers[static_cast<std::size_t>(f)], t), -center);
      psis.push_back(std::move(p));
    }
    int count_f = samples / nf + (f < samples % nf ? 1 : 0);
    SamplePaths paths = sample_mu(ctx, orbit, path_len, count_f, hash_mix(seed, f));
    auto eval = [&](int p_local, int global_idx) {
      std::span<const int> path = paths.path(p_local);
      double s = 0.0;
      for (int j = 0; j < horizon; ++j) {
        double v = psis[static_cast<std::size_t>(j)].at(
            path.subspan(static_cast<std::size_t>(j), static_cast<std::size_t>(d)));
        s += v;
        if (j + 1 == horizon / 4) sums_quarter[static_cast<std::size_t>(global_idx)] = s;
        if (j + 1 == horizon / 2) sums_half[static_cast<std::size_t>(global_idx)] = s;
      }
      sums[static_cast<std::size_t>(global_idx)] = s;
    };
    for (int p = 0; p < count_f; ++p) eval(p, p * nf + f);
  }

  auto var_of = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    return var / static_cast<double>(v.size() - 1);
  };
  res.sigma2_emp = var_of(sums) / horizon;
  res.var_curve = {{horizon / 4, var_of(sums_quarter) / (horizon / 4)},
                   {horizon / 2, var_of(sums_half) / (horizon / 2)},
                   {horizon, res.sigma2_emp}};
  double last = res.var_curve[2].second, prev = res.var_curve[1].second;
  res.variance_stable = std::abs(last - prev) <= 0.02 * std::max(std::abs(last), 1e-300) ||
                        std::abs(last - prev) <= 0.05 * std::abs(res.sigma2_gk);

  // Kolmogorov-Smirnov distance of S_n/sqrt(n) against N(0, sigma2_gk)
  std::vector<double> scaled(sums.size());
  double inv = 1.0 / std::sqrt(static_cast<double>(horizon));
  for (std::size_t i = 0; i < sums.size(); ++i) scaled[i] = sums[i] * inv;
  std::sort(scaled.begin(), scaled.end());
  double sigma = std::sqrt(std::max(res.sigma2_gk, 1e-300));
  double ks = 0.0;
  const double n_inv = 1.0 / static_cast<double>(scaled.size());
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    double f = 0.5 * std::erfc(-scaled[i] / (sigma * std::sqrt(2.0)));
    ks = std::max(ks, std::max(std::abs(static_cast<double>(i + 1) * n_inv - f),
                               std::abs(static_cast<double>(i) * n_inv - f)));
  }
  res.ks_stat = ks;
  res.pass = !res.degenerate && res.variance_stable && ks < ks_threshold;

  const int bins = 41;
  double lo = -4.0 * sigma, step = 8.0 * sigma / bins;
  res.hist_edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b) res.hist_edges[static_cast<std::size_t>(b)] = lo + b * step;
  res.hist_counts.assign(bins, 0);
  for (double v : scaled) {
    int b = static_cast<int>(std::floor((v - lo) / step));
    if (b >= 0 && b < bins) ++res.hist_counts[static_cast<std::size_t>(b)];
  }
  return res;
}

}  // namespace rsft
