#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsft/context.hpp"

namespace rsft {

// Certification verdicts are always bounded statements: they quote the
// letter window, fiber sample and horizon they were checked under.
struct CertificationBounds {
  int max_letter = 0;
  int horizon = 0;
  int fibers = 0;
  std::string uniformity;  // "exact" for deterministic models, else "sampled"

  nlohmann::json to_json() const;
};

struct FiniteRangeReport {
  bool certified = false;
  std::string message;
  CertificationBounds bounds;
  std::map<int, std::vector<int>> out_sets;  // D_e per letter
  std::map<int, int> level_hat;              // l -> minimal l^ with no edge a<=l -> e>l^
  nlohmann::json to_json() const;
};

struct BoundedAccessReport {
  bool certified = false;
  std::string message;
  CertificationBounds bounds;
  std::map<int, int> b_star;  // letter -> minimal predecessor bound
  nlohmann::json to_json() const;
};

struct MixingReport {
  bool certified = false;
  std::string message;
  CertificationBounds bounds;
  int a = 0, b = 0;
  int n_mix = -1;  // least N with a->b connectable at every n in [N,horizon]
  nlohmann::json to_json() const;
};

// D_e per letter as the union over sampled fibers, plus the level chain
// l -> l^ used by the cone pipeline. scan_bound caps out-set enumeration.
FiniteRangeReport check_finite_range(const ShiftContext& ctx, const std::vector<int>& letters,
                                     int scan_bound = 1 << 20);

BoundedAccessReport check_bounded_access(const ShiftContext& ctx, const std::vector<int>& letters,
                                         int scan_bound = 1 << 20);

// Least N <= horizon such that for every n in [N,horizon] and every sampled
// fiber some interior word of length n+1 connects a to b inside the window.
MixingReport mixing_n(const ShiftContext& ctx, int a, int b, int horizon);

// max over pairs (a,b) in A x B; -1 when some pair fails
int mixing_bound(const ShiftContext& ctx, const std::vector<int>& from,
                 const std::vector<int>& to, int horizon);

}  // namespace rsft
