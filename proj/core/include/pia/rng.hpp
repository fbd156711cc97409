#pragma once

#include <cstdint>
#include <random>

namespace pia {

/// SplitMix64 finalizer; every derived seed path goes through it so that
/// structured inputs (purpose, iteration, index) land on decorrelated states.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Named sub-stream roots. Distinct purposes can never alias, so evaluation
/// drops are disjoint from optimization drops by construction even when both
/// start from the same user seed.
enum class Stream : std::uint64_t {
  pso_init = 1,
  pso_velocity = 2,
  objective_drops = 3,
  eval_drops = 4,
  ma_drop_opt = 5,
  bootstrap = 6,
  instance = 7,
};

/// Derives the seed for one logical substream, e.g. (seed, objective_drops,
/// iteration, drop index). Reproducible irrespective of thread scheduling:
/// every consumer owns the stream for its own index.
inline std::uint64_t derive_seed(std::uint64_t root, Stream purpose,
                                 std::uint64_t a = 0,
                                 std::uint64_t b = 0) noexcept {
  std::uint64_t s = mix64(root);
  s = mix64(s ^ mix64(static_cast<std::uint64_t>(purpose)));
  s = mix64(s ^ mix64(a));
  s = mix64(s ^ mix64(b));
  return s;
}

/// FNV-1a over raw bytes; used wherever a stable content fingerprint is
/// needed (layouts, drop seed lists, canonical configs).
inline std::uint64_t fnv1a(const void* data, std::size_t bytes,
                           std::uint64_t hash = 14695981039346656037ULL) noexcept {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    hash ^= p[i];
    hash *= 1099511628211ULL;
  }
  return hash;
}

/// Uniform generator over mt19937_64. Doubles are built from the top 53 bits
/// of the raw stream, so sequences are bit-identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi); returns lo when lo == hi.
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t bits() { return engine_(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Rejection-free modulo bias is irrelevant at our n (<< 2^32).
    return engine_() % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pia
