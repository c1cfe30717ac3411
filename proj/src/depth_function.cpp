#include "rsft/depth_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rsft {

DepthFunction::DepthFunction(FiberPoint fiber, std::shared_ptr<const WordSet> words,
                             std::vector<double> values, double ledger)
    : fiber_(fiber), words_(std::move(words)), values_(std::move(values)), ledger_(ledger) {
  if (!words_ || values_.size() != words_->size())
    throw std::invalid_argument("DepthFunction: value count must match word set");
  if (ledger_ < 0.0) throw std::invalid_argument("DepthFunction: negative ledger");
}

DepthFunction DepthFunction::constant(const ShiftContext& ctx, const FiberPoint& x, double c) {
  auto ws = ctx.words(x);
  return DepthFunction(x, ws, std::vector<double>(ws->size(), c));
}

DepthFunction DepthFunction::indicator_prefix(const ShiftContext& ctx, const FiberPoint& x,
                                              std::span<const int> prefix) {
  auto ws = ctx.words(x);
  std::vector<double> v(ws->size(), 0.0);
  auto [lo, hi] = ws->prefix_range(prefix);
  for (int i = lo; i < hi; ++i) v[static_cast<std::size_t>(i)] = 1.0;
  return DepthFunction(x, ws, std::move(v));
}

DepthFunction DepthFunction::indicator_letters(const ShiftContext& ctx, const FiberPoint& x,
                                               std::span<const int> letters) {
  auto ws = ctx.words(x);
  std::vector<double> v(ws->size(), 0.0);
  for (int e : letters) {
    auto [lo, hi] = ws->letter_range(e);
    for (int i = lo; i < hi; ++i) v[static_cast<std::size_t>(i)] = 1.0;
  }
  return DepthFunction(x, ws, std::move(v));
}

double DepthFunction::at(std::span<const int> word) const {
  int i = words_->index_of(word);
  return i < 0 ? 0.0 : values_[static_cast<std::size_t>(i)];
}

double DepthFunction::sup_norm() const {
  double s = 0.0;
  for (double v : values_) s = std::max(s, std::abs(v));
  return s;
}

double DepthFunction::min_value() const {
  double s = std::numeric_limits<double>::infinity();
  for (double v : values_) s = std::min(s, v);
  return values_.empty() ? std::numeric_limits<double>::quiet_NaN() : s;
}

double DepthFunction::sup_on_letter(int e) const {
  auto [lo, hi] = words_->letter_range(e);
  if (lo == hi) return std::numeric_limits<double>::quiet_NaN();
  double s = -std::numeric_limits<double>::infinity();
  for (int i = lo; i < hi; ++i) s = std::max(s, values_[static_cast<std::size_t>(i)]);
  return s;
}

double DepthFunction::inf_on_letter(int e) const {
  auto [lo, hi] = words_->letter_range(e);
  if (lo == hi) return std::numeric_limits<double>::quiet_NaN();
  double s = std::numeric_limits<double>::infinity();
  for (int i = lo; i < hi; ++i) s = std::min(s, values_[static_cast<std::size_t>(i)]);
  return s;
}

namespace {

// Recursive scan over lexicographic prefix blocks. In a block of words
// sharing the first `pos` symbols, a pair drawn from two different child
// blocks disagrees first exactly at index `pos`; pairs inside one child are
// handled one level deeper. Tracking the two extreme child minima/maxima
// (with child ids) makes the widest cross-child difference exact.
struct VariationScan {
  const std::vector<Symbols>& words;
  std::span<const double> values;
  double alpha;
  double best = 0.0;

  // returns (min,max) over block [lo,hi)
  std::pair<double, double> scan(int lo, int hi, int pos) {
    const int len = static_cast<int>(words[static_cast<std::size_t>(lo)].size());
    if (lo + 1 == hi || pos >= len) {
      double mn = values[static_cast<std::size_t>(lo)], mx = mn;
      for (int i = lo + 1; i < hi; ++i) {
        mn = std::min(mn, values[static_cast<std::size_t>(i)]);
        mx = std::max(mx, values[static_cast<std::size_t>(i)]);
      }
      return {mn, mx};
    }
    const double inf = std::numeric_limits<double>::infinity();
    double min1 = inf, min2 = inf, max1 = -inf, max2 = -inf;
    int child_of_min = -1, child_of_max = -1, child = 0;
    int i = lo;
    while (i < hi) {
      int j = i;
      int letter = words[static_cast<std::size_t>(i)][static_cast<std::size_t>(pos)];
      while (j < hi && words[static_cast<std::size_t>(j)][static_cast<std::size_t>(pos)] == letter) ++j;
      auto [cmn, cmx] = scan(i, j, pos + 1);
      if (cmn < min1) { min2 = min1; min1 = cmn; child_of_min = child; }
      else min2 = std::min(min2, cmn);
      if (cmx > max1) { max2 = max1; max1 = cmx; child_of_max = child; }
      else max2 = std::max(max2, cmx);
      ++child;
      i = j;
    }
    if (child > 1) {
      double delta = child_of_min != child_of_max ? max1 - min1
                                                  : std::max(max1 - min2, max2 - min1);
      if (delta > 0.0 && std::isfinite(delta))
        best = std::max(best, delta * std::exp(alpha * pos));
    }
    return {min1, max1};
  }
};

}  // namespace

double DepthFunction::variation_alpha(double alpha) const {
  if (words_->length < 2 || words_->size() < 2) return 0.0;
  VariationScan scan{words_->words, values_, alpha};
  // top-level children are first letters; only same-first-symbol pairs count
  std::size_t i = 0;
  while (i < words_->size()) {
    std::size_t j = i;
    int letter = words_->words[i][0];
    while (j < words_->size() && words_->words[j][0] == letter) ++j;
    scan.scan(static_cast<int>(i), static_cast<int>(j), 1);
    i = j;
  }
  return scan.best;
}

void DepthFunction::check_compatible(const DepthFunction& o) const {
  if (!(fiber_ == o.fiber_) || words_.get() != o.words_.get())
    throw std::invalid_argument("DepthFunction: mixed fibers or truncation parameters");
}

DepthFunction& DepthFunction::operator+=(const DepthFunction& o) {
  check_compatible(o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  ledger_ += o.ledger_;
  return *this;
}

DepthFunction& DepthFunction::operator-=(const DepthFunction& o) {
  check_compatible(o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  ledger_ += o.ledger_;
  return *this;
}

DepthFunction& DepthFunction::operator*=(double c) {
  for (double& v : values_) v *= c;
  ledger_ *= std::abs(c);
  return *this;
}

DepthFunction& DepthFunction::pointwise_mul(const DepthFunction& o) {
  check_compatible(o);
  double ledger = ledger_ * o.sup_norm() + o.ledger_ * sup_norm();
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= o.values_[i];
  ledger_ = ledger;
  return *this;
}

double RandomMeasureApprox::total() const {
  double s = 0.0;
  for (double m : masses) s += m;
  return s;
}

double RandomMeasureApprox::mass_at(std::span<const int> word) const {
  int i = words->index_of(word);
  return i < 0 ? 0.0 : masses[static_cast<std::size_t>(i)];
}

double RandomMeasureApprox::mass_of_prefix(std::span<const int> prefix) const {
  auto [lo, hi] = words->prefix_range(prefix);
  double s = 0.0;
  for (int i = lo; i < hi; ++i) s += masses[static_cast<std::size_t>(i)];
  return s;
}

double RandomMeasureApprox::integrate(const DepthFunction& g) const {
  if (g.words_ptr().get() != words.get())
    throw std::invalid_argument("integrate: function and measure on different word sets");
  double s = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) s += masses[i] * g[i];
  return s;
}

double RandomMeasureApprox::tv_distance(const RandomMeasureApprox& o) const {
  if (o.words.get() != words.get())
    throw std::invalid_argument("tv_distance: measures on different word sets");
  double s = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) s += std::abs(masses[i] - o.masses[i]);
  return 0.5 * s;
}

}  // namespace rsft
