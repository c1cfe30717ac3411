#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsft/context.hpp"
#include "rsft/depth_function.hpp"

namespace rsft {

// Normalizers lambda_{theta^t x} on an orbit window [t_begin, t_begin+size).
struct LambdaSequence {
  std::int64_t t_begin = 0;
  std::vector<double> values;

  double at(std::int64_t t) const;
  std::int64_t t_end() const { return t_begin + static_cast<std::int64_t>(values.size()); }
  bool covers(std::int64_t lo, std::int64_t hi) const {  // [lo, hi)
    return t_begin <= lo && hi <= t_end();
  }
  double log_bound() const;  // max |log lambda| over the window
  double log_product(std::int64_t from, int n) const;
};

// One transfer step: g at x -> L_x g at theta(x). Letters beyond the window
// contribute at most Z_x(L) ||g||_inf, which lands in the ledger along with
// M times the incoming ledger.
DepthFunction apply_transfer(const ShiftContext& ctx, const FiberPoint& x,
                             const DepthFunction& g);

// n-fold composition along the orbit; n = 0 is the identity.
DepthFunction iterate_transfer(const ShiftContext& ctx, const FiberPoint& x,
                               const DepthFunction& g, int n);

// Composition of lambda^{-1} L per step; stays O(1) in magnitude, so no
// log-domain bookkeeping is needed here.
DepthFunction normalized_iterate(const ShiftContext& ctx, const FiberPoint& x,
                                 const DepthFunction& g, int n, const LambdaSequence& lambdas);

// hat L_{theta^{-1}(x)} 1 represented at x; the reference function of the
// slice cone and of the truncated chi functions.
DepthFunction normalized_one_step_back(const ShiftContext& ctx, const FiberPoint& x,
                                       double lambda_prev);

struct ConditionAReport {
  bool certified = false;
  std::string message;
  std::map<int, double> m_e;  // letter -> 1 / min L1 on [e]
  nlohmann::json to_json() const;
};

struct ConditionBReport {
  bool certified = false;
  std::string message;
  std::vector<double> profile;   // e -> sup L1|[e] + column tail
  std::vector<double> envelope;  // running max from e to the window end
  double threshold = 0.0;
  int decay_level = -1;  // first e with envelope below threshold
  nlohmann::json to_json() const;
};

struct ConditionCReport {
  bool certified = false;
  std::string message;
  double kappa = 0.0;
  double numerator = 0.0;    // sup L(1 off F) + tails, probed beyond the window
  double denominator = 0.0;  // inf L1 on [F]
  std::vector<int> cylinder_set;
  int probe_max = 0;
  nlohmann::json to_json() const;
};

ConditionAReport check_condition_a(const ShiftContext& ctx, double floor_tol = 1e-300);
ConditionBReport check_condition_b(const ShiftContext& ctx, double rel_threshold = 0.05);
ConditionCReport check_condition_c(const ShiftContext& ctx, const std::vector<int>& cyl_set,
                                   int probe_factor = 3);

struct FiberOperatorReport {
  double sup_l1 = 0.0;
  std::map<int, double> inf_l1_per_letter;
  double cond_c_ratio = 0.0;
  double distortion_worst = 0.0;   // worst same-first-symbol ratio of L^n 1
  double ratio_bound = 1.0;        // K = 1 + C V_alpha
  double norm_iter_bound = 0.0;    // empirical sup_n ||hat L^n 1||_inf
  double norm_iter_bound_analytic = 0.0;  // K / beta route
  double two_norm_const = 0.0;     // worst empirical S in the two-norm bound
  double two_norm_const_analytic = 0.0;
  bool ratio_bound_ok = false;
  nlohmann::json to_json() const;
};

// Runs the distortion bound, the uniform bound on ||hat L^n 1|| and the
// two-norm inequality over sampled fibers for n <= n_max.
FiberOperatorReport check_distortion_and_bounds(const ShiftContext& ctx,
                                                const LambdaSequence& lambdas, int n_max,
                                                double beta_mass_floor);

// Sparse triplet dump of one transfer step (target word, source word, weight).
void export_operator_csv(const ShiftContext& ctx, const FiberPoint& x, const std::string& path);

}  // namespace rsft
