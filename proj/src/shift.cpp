#include "rsft/shift.hpp"

#include <cmath>
#include <stdexcept>

namespace rsft {

double shift_metric(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("shift_metric: equal nonzero lengths required");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return std::exp(-static_cast<double>(i));
  return 0.0;
}

bool is_admissible(const EnvironmentModel& model, const FiberPoint& x,
                   std::span<const int> word) {
  if (word.empty()) throw std::invalid_argument("is_admissible: empty word");
  for (std::size_t i = 0; i + 1 < word.size(); ++i) {
    IncidenceSlice s = matrix_at(model, advance(x, static_cast<std::int64_t>(i)));
    if (!s.entry(word[i], word[i + 1])) return false;
  }
  return true;
}

}  // namespace rsft
