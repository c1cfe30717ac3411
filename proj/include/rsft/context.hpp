#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "rsft/model.hpp"
#include "rsft/shift.hpp"

namespace rsft {

// Admissible words of a fixed length at one fiber, sorted lexicographically
// (plain integer order on encoded symbols). Index lookups are binary search.
struct WordSet {
  int length = 0;
  int max_letter = 0;
  std::vector<Symbols> words;

  int index_of(std::span<const int> w) const;  // -1 if absent
  std::size_t size() const { return words.size(); }
  // contiguous index range of words starting with letter e
  std::pair<int, int> letter_range(int e) const;
  // contiguous index range of words with the given prefix
  std::pair<int, int> prefix_range(std::span<const int> prefix) const;
};

// One-step transfer action in sparse row form: for each target word at
// theta(x), the feeding source words at x with weights exp(phi_x(e w)).
struct TransferPlan {
  struct Term {
    int source;
    double weight;
  };
  std::vector<std::vector<Term>> rows;  // indexed like the target WordSet
};

// Binds a model to truncation parameters and memoizes per-fiber data.
// Everything here is a pure function of (model, seed, time); caches are
// keyed on canonical time so deterministic/periodic environments share.
class ShiftContext {
 public:
  ShiftContext(ModelSpec model, TruncationParams trunc);
  ~ShiftContext();
  ShiftContext(const ShiftContext&) = delete;
  ShiftContext& operator=(const ShiftContext&) = delete;

  const ModelSpec& model() const { return model_; }
  const TruncationParams& trunc() const { return trunc_; }
  int depth() const { return trunc_.depth; }
  int max_letter() const { return trunc_.max_letter; }

  const IncidenceSlice& slice(const FiberPoint& x) const;
  // {e <= max_letter : A_{e b}(x) = 1}
  const std::vector<int>& in_set(const FiberPoint& x, int b) const;
  // out-set of e clipped to the window
  const std::vector<int>& out_set(const FiberPoint& x, int e) const;

  std::shared_ptr<const WordSet> words(const FiberPoint& x) const;  // length = depth
  std::shared_ptr<const WordSet> words_len(const FiberPoint& x, int length) const;
  const TransferPlan& plan(const FiberPoint& x) const;  // x -> theta(x)

  double phi(const FiberPoint& x, std::span<const int> prefix) const;
  double weight(const FiberPoint& x, std::span<const int> prefix) const;  // exp(phi)

  // Analytic bound on the per-application weight of dropped letters e > L:
  // Z_x(L) = sup_b sum_{j > L feeding b} C_j.
  double tail_weight(const FiberPoint& x) const;
  // Upper bound M on ||L_x 1||_inf (windowed sup plus tail), sampled once.
  double op_norm_bound() const;

  HolderParams holder() const { return HolderParams::from(model_.potential.alpha, model_.potential.declared_variation); }

  // sampled fibers used by every certification routine
  const std::vector<FiberPoint>& audit_fibers() const { return audit_fibers_; }
  void set_audit_fibers(std::vector<FiberPoint> f) { audit_fibers_ = std::move(f); }

 private:
  struct FiberCache;
  FiberCache& cache(const FiberPoint& x) const;

  ModelSpec model_;
  TruncationParams trunc_;
  std::vector<FiberPoint> audit_fibers_;
  mutable std::map<std::pair<std::uint64_t, std::int64_t>, std::unique_ptr<FiberCache>> caches_;
  mutable double op_norm_bound_ = -1.0;
};

// Enumerates the admissible words of the given length over the window;
// single letters are always admissible.
std::vector<Symbols> admissible_words(const EnvironmentModel& model, const FiberPoint& x,
                                      int length, const TruncationParams& trunc);

}  // namespace rsft
