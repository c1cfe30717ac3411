#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rsft/environment.hpp"

namespace rsft {

using Symbols = std::vector<int>;

// Alphabet window {0..max_letter} and cylinder depth used by every truncated
// representation. Functions and measures record the params they were built
// with; mixing them is an error.
struct TruncationParams {
  int max_letter = 1;  // alphabet window {0,...,max_letter}
  int depth = 3;       // cylinder depth of function/measure representations

  friend bool operator==(const TruncationParams&, const TruncationParams&) = default;
};

// Zig-zag bijection Z -> N: 0,1,-1,2,-2,... -> 0,1,2,3,4,...
// Walk models on Z pass through this; everything downstream sees N.
struct SymbolCodec {
  bool zigzag = false;

  int encode(std::int64_t z) const {
    if (!zigzag) return static_cast<int>(z);
    return z > 0 ? static_cast<int>(2 * z - 1) : static_cast<int>(-2 * z);
  }
  std::int64_t decode(int n) const {
    if (!zigzag) return n;
    return (n % 2 == 1) ? (n + 1) / 2 : -(static_cast<std::int64_t>(n) / 2);
  }
};

// d(w,t) = exp(-first disagreement index), 0 if equal. Arguments are
// equal-length cylinder prefixes.
double shift_metric(std::span<const int> a, std::span<const int> b);

// A_{w_i w_{i+1}}(theta^i x) = 1 for all i. Single letters are admissible.
bool is_admissible(const EnvironmentModel& model, const FiberPoint& x,
                   std::span<const int> word);

}  // namespace rsft
