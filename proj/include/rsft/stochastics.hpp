#pragma once

#include <functional>
#include <memory>

#include <json.hpp>

#include "rsft/density.hpp"

namespace rsft {

// Observable attached fiberwise; builders produce the representation at any
// requested fiber.
using FiberFunction = std::function<DepthFunction(const ShiftContext&, const FiberPoint&)>;

FiberFunction letter_indicator(int letter);     // 1_[e]
FiberFunction coordinate_minus(double shift);   // omega_0 - shift (encoded letter value)

struct CorrelationCurve {
  std::vector<int> ns;
  std::vector<double> values;         // fiber-averaged |integral|
  std::vector<double> signed_values;  // fiber-averaged signed integral
  double prefactor = 0.0;             // b from the log-linear fit
  double envelope_prefactor = 0.0;    // smallest b making the envelope one-sided
  double theta = 0.0;
  double fit_residual = 0.0;
  bool certified = false;
  double norm_g = 0.0;  // |g|_nu^{1,p} over the sampled fibers
  double norm_h = 0.0;  // |h|_{alpha,q}
  double p_exp = 1.0, q_exp = 0.0;  // q_exp = 0 encodes the sup norm
  nlohmann::json to_json() const;
};

// Exact correlation integrals on the truncated space: value(n) equals the
// integral of g at theta^n(x) against the n-step normalized image of h rho,
// with h auto-centered against mu fiber by fiber.
CorrelationCurve correlation(const ShiftContext& ctx, const std::vector<FiberPoint>& fibers,
                             const FiberFunction& g, const FiberFunction& h, int n_max,
                             int pullback, double p_exp = 1.0, double q_exp = 0.0);

struct SamplePaths {
  int length = 0;
  int count = 0;
  std::vector<int> symbols;  // row-major: path i at offset i*length
  int resampled = 0;         // zero-mass prefixes hit during initialization
  std::span<const int> path(int i) const {
    return {symbols.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(length),
            static_cast<std::size_t>(length)};
  }
};

// i.i.d. paths from the depth-d Markov approximation of mu along the quenched
// orbit of x; deterministic in (seed, path index) and safe to parallelize.
SamplePaths sample_mu(const ShiftContext& ctx, const OrbitData& orbit, int length, int count,
                      std::uint64_t seed);

struct CltResult {
  int horizon = 0;
  int samples = 0;
  double sigma2_gk = 0.0;
  double sigma2_emp = 0.0;
  double ks_stat = 1.0;
  std::vector<std::pair<int, double>> var_curve;  // (n, Var(S_n)/n)
  bool variance_stable = false;
  bool degenerate = false;  // sigma2 below floor: possibly cohomologous to zero
  bool pass = false;
  int gk_terms = 0;
  // histogram of S_n/sqrt(n) over +-4 sigma, 41 bins
  std::vector<double> hist_edges;
  std::vector<int> hist_counts;
  nlohmann::json to_json() const;
};

// Monte Carlo CLT check: S_n psi / sqrt(n) against N(0, sigma2_GK), with the
// Green-Kubo variance cross-checked by the empirical one.
CltResult clt_test(const ShiftContext& ctx, const std::vector<FiberPoint>& fibers,
                   const FiberFunction& psi, int horizon, int samples, std::uint64_t seed,
                   int pullback, double ks_threshold = 0.05);

int thread_count();  // RSFT_THREADS, default 1

}  // namespace rsft
