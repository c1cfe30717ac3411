#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace rsft {

// Counter-based hashing (splitmix64 finalizer). All randomness in the engine
// is derived by hashing (seed, counter...) tuples so that results never depend
// on evaluation order or thread scheduling.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t hash_mix(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ mix64(b));
}

inline std::uint64_t hash_mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix64(hash_mix(a, b) ^ mix64(c));
}

// Uniform double in [0,1) from 53 high bits.
inline double u64_to_unit(std::uint64_t u) {
  return static_cast<double>(u >> 11) * 0x1.0p-53;
}

// Keyed counter stream; next() never depends on anything but (key, counter).
struct CounterRng {
  std::uint64_t key = 0;
  std::uint64_t counter = 0;

  explicit CounterRng(std::uint64_t k) : key(k) {}
  CounterRng(std::uint64_t a, std::uint64_t b) : key(hash_mix(a, b)) {}

  std::uint64_t next_u64() { return hash_mix(key, counter++); }
  double next_unit() { return u64_to_unit(next_u64()); }
  // uniform in {0,...,n-1}
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }
};

// Shortest round-trip-safe decimal for doubles; used by every artifact writer
// so reruns are bitwise identical.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace rsft
