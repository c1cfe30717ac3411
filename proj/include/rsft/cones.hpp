#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsft/density.hpp"

namespace rsft {

// Derived constants of the invariant-cone argument. Quantities that underflow
// double precision for thin walks (the block floor and the peel fraction) are
// carried in log domain alongside their (possibly zero) linear values.
struct ConeConstants {
  double alpha = 1.0;
  double v_alpha = 0.0;
  double dist_const = 0.0;        // C
  double ratio_bound = 1.0;       // K = 1 + C v_alpha
  double op_norm = 0.0;           // M
  double norm_iter_bound = 0.0;   // empirical sup_n ||hat L^n 1||, the M-hat used below
  double two_norm_const = 0.0;    // S
  int tail_cut = 0;               // k: 1/2 + (2Mh+4) e^{-alpha k} <= 1
  int level0_cone = 0;            // l_0 of the cone stage (2 Mh hatL1 <= 1 beyond it)
  int level0 = 0;                 // strengthened Bowen level (2 A Mh hatL1 < 1 beyond it)
  bool level0_capped = false;     // strengthened level exceeds the window (vacuous region)
  std::vector<int> level_chain;   // l_0..l_k through the finite-range chain
  bool level_chain_capped = false;  // chain clipped at the window
  double log_mass_floor = 0.0;    // log beta: max of the analytic floor and the
                                  // measured minimum D-cylinder mass
  double cone_sup_factor = 0.0;   // A = 2 max{1, Mh, 1/beta}
  double cone_var_factor = 0.0;   // H = 2 Mh A + 4
  int min_push = 0;               // N_0: Mh H e^{-alpha N_0} <= 1
  int block_steps = 0;            // N = N_l of the block floor
  double log_block_floor = 0.0;   // log a
  double log_peel = 0.0;          // log eta, eta <= min{1/3, 1/H, a/(2 Mh)}
  double log_peel_effective = 0.0;  // log eta~ = log(eta Q_{l0} beta_{l0})
  double theta_certified = 1.0;   // 2^{-1/N_{1/2}} from the constructive route
  double log_lambda_bound = 0.0;

  nlohmann::json to_json() const;
};

struct ConeMembership {
  bool in_cone = false;    // sup and variation inequalities
  bool in_cone0 = false;   // additionally below 2 Mh A (int g) hat L 1
  double integral = 0.0;
  double sup_margin = 0.0;   // A int g - ||g||
  double var_margin = 0.0;   // H int g - v(g)
  double dom_margin = 0.0;   // min over words of 2 Mh A (int g) hatL1 - g
};

// Evaluates the three cone inequalities for g >= 0 against nu at the same
// fiber; `ref` is hat L_{theta^{-1}x} 1 represented at the fiber of g.
ConeMembership cone_membership(const DepthFunction& g, const RandomMeasureApprox& nu,
                               const DepthFunction& ref, const ConeConstants& cc);

struct ConeDerivation {
  bool ok = false;
  std::string stage;  // failing stage when !ok
  ConeConstants constants;
  nlohmann::json to_json() const;
};

// Runs the whole pipeline: distortion constants, empirical iterate bound,
// tail-cut k, the level chain, the mass floor, A/H/N_0, the block floor and
// the peel fraction. Fails loudly with the stage name when the truncation
// cannot support a step.
ConeDerivation derive_cone_constants(const ShiftContext& ctx, const OrbitData& orbit,
                                     int n_max = 24, int mixing_horizon = 64);

struct BowenReport {
  bool peel_in_cone = false;    // hat L^N g - eta chi lands in C_0
  double worst_dom_margin = 0.0;
  std::vector<double> block_norms;    // ||hat L^{kN}(g-h)||_alpha per block
  std::vector<double> block_factors;  // consecutive ratios
  double bound_factor = 1.0;          // 1 - eta~ (from log domain; ~1 when eta~ underflows)
  bool factors_below_bound = false;
  nlohmann::json to_json() const;
};

// Verifies the peeled function stays in the slice cone and measures the
// per-block contraction of pair differences against 1 - eta~.
BowenReport bowen_contraction_check(const ShiftContext& ctx, const OrbitData& orbit,
                                    const ConeConstants& cc, const DepthFunction& g,
                                    const DepthFunction& h, int blocks);

// Deterministic cone element: positive perturbation of the constant function
// pushed N_0 steps so that it lands in the slice cone at theta^{N_0} x.
DepthFunction random_cone_element(const ShiftContext& ctx, const OrbitData& orbit,
                                  std::int64_t t, std::uint64_t seed);

}  // namespace rsft
