#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsft/conditions.hpp"
#include "rsft/depth_function.hpp"
#include "rsft/potential_ops.hpp"
#include "rsft/transfer.hpp"

namespace rsft {

// One backward conformal step: the dual transfer action pulls a measure at
// theta(x) down to x and renormalizes. The normalizer estimates lambda_x and
// is reported through `normalizer` when requested.
RandomMeasureApprox phi_map(const ShiftContext& ctx, const RandomMeasureApprox& nu_theta,
                            const FiberPoint& x, double* normalizer = nullptr);

struct AnchorPolicy {
  int skip = 0;  // take the (skip+1)-th viable anchor letter of F
};

struct ConformalEstimate {
  RandomMeasureApprox nu;
  double lambda = 0.0;          // normalizer of the final pullback step
  double lambda_error = 0.0;    // tail-driven error bar
  std::vector<double> tv_increments;  // ||nu^(m) - nu^(m-1)||_TV at x, m = 2..n
  bool converged = false;
  double tv_tolerance = 0.0;
  Symbols anchor_word;
  nlohmann::json to_json() const;
};

// Backward pullback from a Dirac anchor in [F] at theta^n(x). Convergence is
// declared when the TV increments stay below tol for three consecutive steps.
ConformalEstimate estimate_conformal(const ShiftContext& ctx, const FiberPoint& x, int n,
                                     const AnchorPolicy& policy = {}, double tv_tol = 1e-9);

// lambda_x = integral of L_x 1 against nu at theta(x); the error bar collects
// the dropped-letter weight and the measure tail.
double lambda_estimate(const ShiftContext& ctx, const FiberPoint& x,
                       const RandomMeasureApprox& nu_theta, double* error = nullptr);

// one-half l1 distance on depth-d cylinders between the pulled-back measure
// scaled by the given lambda and nu_x
double conformality_residual(const ShiftContext& ctx, const FiberPoint& x,
                             const RandomMeasureApprox& nu_x,
                             const RandomMeasureApprox& nu_theta, double lambda);

// Measures and normalizers along an orbit window, produced by one backward
// sweep from theta^{t_hi + depth}(x); every returned fiber has at least
// `depth` pullback steps behind it.
struct OrbitMeasures {
  std::int64_t t_lo = 0;
  std::vector<RandomMeasureApprox> nus;  // index t - t_lo
  LambdaSequence lambdas;

  const RandomMeasureApprox& nu(std::int64_t t) const;
};

OrbitMeasures orbit_measures(const ShiftContext& ctx, const FiberPoint& x, std::int64_t t_lo,
                             std::int64_t t_hi, int depth, const AnchorPolicy& policy = {});

// nu_x([w]) for a word of any length via the iterated conformal transport.
double cylinder_mass(const ShiftContext& ctx, const FiberPoint& x, std::span<const int> word,
                     const OrbitMeasures& om);

struct TightnessReport {
  bool certified = false;
  std::string message;
  double contraction_floor = 0.0;  // c = half inf L1 on [F]
  std::vector<double> gammas;      // gamma_0 .. gamma_n
  std::vector<int> levels;         // N_0 .. N_{n-1}
  double margin_step0 = 0.0;       // (1/4 - kappa) inf L1|F - M gamma_1
  std::vector<double> mass_margins;  // gamma_n - nu(K_n^c), depth-d projection
  double log_beta = 0.0;           // Lemma-4.1 style floor for the requested (D,n)
  double min_mass = 0.0;           // measured min cylinder mass over D-words
  bool beta_ok = false;
  nlohmann::json to_json() const;
};

// Runs the gamma/N recursion against the measured Z profile and verifies the
// mass floor: beta in log domain, D = letters, depth n_beta.
TightnessReport tightness_diagnostic(const ShiftContext& ctx, const FiberPoint& x,
                                     const RandomMeasureApprox& nu,
                                     const SummabilityReport& summ,
                                     const ConditionCReport& cond_c,
                                     const Symbols& anchor_word, int n_steps,
                                     const std::vector<int>& beta_letters, int n_beta,
                                     const LambdaSequence& lambdas, int mixing_horizon = 64);

// log of the Lemma-4.1 mass floor beta_{D,n}: -log(2|F|) - S*loglam + log Q,
// with S = n + N_conn + 2 and Q the minimal weight of an admissible
// connecting block (dynamic program over the window).
std::optional<double> log_beta_floor(const ShiftContext& ctx, const FiberPoint& x,
                                     const std::vector<int>& letters, int n,
                                     const LambdaSequence& lambdas, int mixing_horizon = 64);

}  // namespace rsft
