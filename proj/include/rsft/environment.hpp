#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rsft {

// One fiber's view of the incidence matrix A(x). `entry(i,j)` answers
// A_ij in encoded (non-negative) letters. `out` returns the finite
// successor set D_e of a letter, or nullopt when the model cannot bound it
// (not of finite range).
struct IncidenceSlice {
  std::function<bool(int, int)> entry;
  std::function<std::optional<std::vector<int>>(int)> out;
};

enum class EnvKind { deterministic, periodic, iid_seeded };

const char* to_string(EnvKind k);

// The base system: time acts by shifting an integer coordinate, and the
// matrix served at a coordinate depends on the kind:
//   deterministic : same slice at every time,
//   periodic      : slice depends on time mod period,
//   iid_seeded    : slice is a pure function of (base_seed, time) via
//                   counter-based hashing, so any (seed,t) replays bitwise.
struct EnvironmentModel {
  EnvKind kind = EnvKind::deterministic;
  int period = 1;
  // generator is called with (base_seed, canonical time)
  std::function<IncidenceSlice(std::uint64_t, std::int64_t)> generate;
  std::string description;

  std::int64_t canonical_time(std::int64_t t) const {
    switch (kind) {
      case EnvKind::deterministic: return 0;
      case EnvKind::periodic: {
        std::int64_t m = t % period;
        return m < 0 ? m + period : m;
      }
      case EnvKind::iid_seeded: return t;
    }
    return t;
  }
};

// Position along an environment orbit. Equal (base_seed, time) against the
// same model are interchangeable everywhere.
struct FiberPoint {
  std::uint64_t base_seed = 0;
  std::int64_t time = 0;

  friend bool operator==(const FiberPoint&, const FiberPoint&) = default;
};

inline FiberPoint advance(FiberPoint x, std::int64_t n) {
  x.time += n;
  return x;
}

IncidenceSlice matrix_at(const EnvironmentModel& model, const FiberPoint& x);

// `count` fibers at time 0 with distinct seeds derived from master_seed.
std::vector<FiberPoint> sample_fibers(const EnvironmentModel& model, int count,
                                      std::uint64_t master_seed);

}  // namespace rsft
