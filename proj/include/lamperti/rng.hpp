#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace lamperti {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Deterministic random stream: (seed, stream_id) pins the whole sequence,
/// so ensemble paths can be generated independently and in parallel while
/// staying bit-reproducible. Gaussians come from an explicit Box-Muller pair
/// to keep the draw sequence pinned down rather than implementation-defined.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0) {
    std::uint64_t s = seed ^ (0xd1342543de82ef95ULL * (stream_id + 1));
    const std::uint64_t w0 = detail::splitmix64(s);
    const std::uint64_t w1 = detail::splitmix64(s);
    const std::uint64_t w2 = detail::splitmix64(s);
    const std::uint64_t w3 = detail::splitmix64(s);
    std::seed_seq seq{static_cast<std::uint32_t>(w0), static_cast<std::uint32_t>(w0 >> 32),
                      static_cast<std::uint32_t>(w1), static_cast<std::uint32_t>(w1 >> 32),
                      static_cast<std::uint32_t>(w2), static_cast<std::uint32_t>(w2 >> 32),
                      static_cast<std::uint32_t>(w3), static_cast<std::uint32_t>(w3 >> 32)};
    engine_.seed(seq);
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal draw.
  double gaussian() {
    if (cached_) {
      cached_ = false;
      return cache_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    cache_ = r * std::sin(a);
    cached_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 engine_;
  double cache_ = 0.0;
  bool cached_ = false;
};

}  // namespace lamperti
