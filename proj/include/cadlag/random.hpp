#pragma once

#include <cstdint>
#include <random>

namespace cadlag {

/// SplitMix64 finaliser; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed of replication `k` under master seed `master`.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t k) {
  return master ^ mix64(k);
}

/// Random stream with platform-independent conversions to doubles.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }
  /// Uniform on (0,1].
  double uniform_open_closed() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }
  /// Uniform on (0,1).
  double uniform_open() {
    for (;;) {
      const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;
    }
  }
  /// Fair sign.
  double sign() { return (engine_() >> 63) ? -1.0 : 1.0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cadlag
