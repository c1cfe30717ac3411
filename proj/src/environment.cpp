#include "rsft/environment.hpp"

#include <stdexcept>

#include "rsft/util.hpp"

namespace rsft {

const char* to_string(EnvKind k) {
  switch (k) {
    case EnvKind::deterministic: return "deterministic";
    case EnvKind::periodic: return "periodic";
    case EnvKind::iid_seeded: return "iid-seeded";
  }
  return "?";
}

IncidenceSlice matrix_at(const EnvironmentModel& model, const FiberPoint& x) {
  if (!model.generate) throw std::runtime_error("environment model has no matrix generator");
  return model.generate(x.base_seed, model.canonical_time(x.time));
}

std::vector<FiberPoint> sample_fibers(const EnvironmentModel& model, int count,
                                      std::uint64_t master_seed) {
  if (count < 1) throw std::invalid_argument("sample_fibers: count must be >= 1");
  std::vector<FiberPoint> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    // Counter-derived so parallel callers agree on the list regardless of order.
    out.push_back(FiberPoint{hash_mix(master_seed, 0x5eedULL, static_cast<std::uint64_t>(i)), 0});
  }
  (void)model;
  return out;
}

}  // namespace rsft
