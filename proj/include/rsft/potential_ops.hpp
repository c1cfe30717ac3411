#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "rsft/context.hpp"
#include "rsft/depth_function.hpp"

namespace rsft {

// sum_{j=0}^{n-1} phi(theta^j x, sigma^j w); the word must cover each
// summand's depth window (clipped windows evaluate on the shorter prefix).
double birkhoff_sum(const ShiftContext& ctx, const FiberPoint& x,
                    std::span<const int> word, int n);

struct SummabilityReport {
  bool certifiable = false;   // analytic tails available and profile decays
  bool strongly_summable = false;
  std::string message;
  std::vector<double> z_profile;     // Z_x(l), l = 0..max_letter (tail included)
  double z_tail = 0.0;               // Z_x(L): pure dropped-letter bound
  double op_norm = 0.0;              // M with tail
  std::optional<double> strong_sum;  // sum_e sup-weight + tail, when finite
  double decay_threshold = 0.05;
  nlohmann::json to_json() const;
};

SummabilityReport check_summability(const ShiftContext& ctx, double decay_threshold = 0.05);

struct DistortionReport {
  // worst LHS/RHS ratios for the Birkhoff-sum bound and its exponential form,
  // measured over same-prefix pairs with the tail distance d(sigma^n w, sigma^n w')
  double worst_sum_ratio = 0.0;
  double worst_exp_ratio = 0.0;
  int pairs = 0;
  double dist_const = 0.0;  // C used on the right-hand side
  double v_alpha = 0.0;
  nlohmann::json to_json() const;
};

// Exhaustive scan over admissible words of length word_len at x sharing a
// prefix of length >= n; requires word_len > n.
DistortionReport distortion_check(const ShiftContext& ctx, const FiberPoint& x, int n,
                                  int word_len);

}  // namespace rsft
