#pragma once

#include <memory>
#include <span>
#include <vector>

#include "rsft/context.hpp"

namespace rsft {

// A real function on a fiber represented by its values on the admissible
// depth-d truncated words. Tail policy is zero extension; `ledger` carries
// the accumulated rigorous bound on everything the truncation discarded and
// only grows under operator application.
class DepthFunction {
 public:
  DepthFunction() = default;
  DepthFunction(FiberPoint fiber, std::shared_ptr<const WordSet> words,
                std::vector<double> values, double ledger = 0.0);

  static DepthFunction constant(const ShiftContext& ctx, const FiberPoint& x, double c);
  // indicator of the union of depth-d cylinders whose word starts with `prefix`
  static DepthFunction indicator_prefix(const ShiftContext& ctx, const FiberPoint& x,
                                        std::span<const int> prefix);
  // indicator of all words whose first letter lies in `letters` (sorted)
  static DepthFunction indicator_letters(const ShiftContext& ctx, const FiberPoint& x,
                                         std::span<const int> letters);

  const FiberPoint& fiber() const { return fiber_; }
  const WordSet& words() const { return *words_; }
  std::shared_ptr<const WordSet> words_ptr() const { return words_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double ledger() const { return ledger_; }
  void set_ledger(double v) { ledger_ = v; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double at(std::span<const int> word) const;

  double sup_norm() const;
  double min_value() const;
  // sup / inf over words starting with letter e (quiet NaN when empty)
  double sup_on_letter(int e) const;
  double inf_on_letter(int e) const;

  // exact alpha-variation of the cylinder function: max over same-first-symbol
  // word pairs of |g(w)-g(w')| e^{alpha s} with s the first disagreement index
  double variation_alpha(double alpha) const;
  double holder_norm(double alpha) const { return sup_norm() + variation_alpha(alpha); }

  DepthFunction& operator+=(const DepthFunction& o);
  DepthFunction& operator-=(const DepthFunction& o);
  DepthFunction& operator*=(double c);
  DepthFunction& pointwise_mul(const DepthFunction& o);

  friend DepthFunction operator+(DepthFunction a, const DepthFunction& b) { return a += b; }
  friend DepthFunction operator-(DepthFunction a, const DepthFunction& b) { return a -= b; }
  friend DepthFunction operator*(DepthFunction a, double c) { return a *= c; }
  friend DepthFunction operator*(double c, DepthFunction a) { return a *= c; }

 private:
  void check_compatible(const DepthFunction& o) const;

  FiberPoint fiber_{};
  std::shared_ptr<const WordSet> words_;
  std::vector<double> values_;
  double ledger_ = 0.0;
};

// Per-fiber cylinder masses over the truncated alphabet. `tail_bound` is an
// upper bound on the mass the truncation may have dropped (relative to the
// untruncated measure); masses themselves always sum to one.
struct RandomMeasureApprox {
  FiberPoint fiber{};
  std::shared_ptr<const WordSet> words;
  std::vector<double> masses;
  double tail_bound = 0.0;
  int pullback_depth = 0;

  double total() const;
  double mass_at(std::span<const int> word) const;
  double mass_of_prefix(std::span<const int> prefix) const;
  // integral of a depth function against the measure
  double integrate(const DepthFunction& g) const;
  // one-half the l1 distance on depth-d cylinder masses
  double tv_distance(const RandomMeasureApprox& o) const;
};

}  // namespace rsft
