// Seeded, splittable random streams.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace infoloss {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// FNV-1a; stable across platforms, unlike std::hash.
inline std::uint64_t tag_hash(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Child seed for an independent stream named `tag`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
  return splitmix64(splitmix64(seed) ^ tag_hash(tag));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::uint64_t index) {
  return splitmix64(derive_seed(seed, tag) + splitmix64(index));
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed, std::string_view tag) {
  return Engine(derive_seed(seed, tag));
}

/// Uniform in [0,1) from the top 53 bits; independent of the library's
/// generate_canonical implementation.
inline double uniform01(Engine& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

/// Standard normal via Box-Muller on uniform01, so draws are identical
/// across standard library implementations.
class NormalSource {
 public:
  double operator()(Engine& g) {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform01(g);
    } while (u1 <= 0.0);
    const double u2 = uniform01(g);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace infoloss
