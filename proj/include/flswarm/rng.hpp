#pragma once

// Deterministic counter-based random streams.
//
// Every stochastic component draws from a SplitMix64 stream whose state is
// derived by hashing a (seed, key...) tuple. Streams keyed by logical
// coordinates (round, particle, iteration, ant) make results independent of
// thread scheduling and let a resumed simulation replay the exact draws of
// an uninterrupted one. All distributions are implemented here rather than
// via <random>, whose distribution outputs are implementation-defined.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace flswarm::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Collapses (seed, keys...) into a single well-mixed 64-bit value.
inline std::uint64_t derive_key(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = seed;
  (void)splitmix64(h);
  for (std::uint64_t k : keys) {
    std::uint64_t mixed = k;
    h ^= splitmix64(mixed);
    (void)splitmix64(h);
  }
  return h;
}

class Stream {
 public:
  explicit Stream(std::uint64_t state) : state_(state) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform in [0, 1) with 53 bits of precision.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Uniform integer in [0, n); n must be > 0. Modulo bias is ~n/2^64.
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  // Standard normal via Box-Muller (one value per pair of uniforms; the
  // second value is discarded to keep the draw count predictable).
  double normal() {
    double u1 = 1.0 - next_double();  // (0, 1], keeps log finite
    double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Gamma(shape, 1) via Marsaglia-Tsang; shape > 0.
  double gamma(double shape) {
    if (shape < 1.0) {
      double u = 1.0 - next_double();  // (0, 1]
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      double u = 1.0 - next_double();  // (0, 1]
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
    }
  }

  // Dirichlet(alpha) over `dim` components; falls back to uniform if every
  // gamma draw underflows to zero.
  std::vector<double> dirichlet(double alpha, int dim) {
    std::vector<double> p(static_cast<std::size_t>(dim));
    double sum = 0.0;
    for (auto& v : p) {
      v = gamma(alpha);
      sum += v;
    }
    if (sum <= 0.0) {
      for (auto& v : p) v = 1.0 / dim;
      return p;
    }
    for (auto& v : p) v /= sum;
    return p;
  }

  // Fisher-Yates partial shuffle: permutes the first k slots of `items`.
  template <typename T>
  void partial_shuffle(std::vector<T>& items, std::size_t k) {
    const std::size_t n = items.size();
    for (std::size_t i = 0; i < k && i + 1 < n; ++i) {
      std::size_t j = i + static_cast<std::size_t>(below(n - i));
      std::swap(items[i], items[j]);
    }
  }

 private:
  std::uint64_t state_;
};

inline Stream make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  return Stream(derive_key(seed, keys));
}

// Stream purpose tags; one per independent consumer so streams never alias.
namespace tag {
inline constexpr std::uint64_t topology_devices = 0x10;
inline constexpr std::uint64_t topology_relays = 0x11;
inline constexpr std::uint64_t topology_links = 0x12;
inline constexpr std::uint64_t fleet = 0x20;
inline constexpr std::uint64_t dataset = 0x30;
inline constexpr std::uint64_t partition = 0x31;
inline constexpr std::uint64_t pso_init = 0x40;
inline constexpr std::uint64_t pso_step = 0x41;
inline constexpr std::uint64_t aco_ant = 0x50;
inline constexpr std::uint64_t random_selection = 0x60;
inline constexpr std::uint64_t round_selection = 0x70;
inline constexpr std::uint64_t round_training = 0x71;
inline constexpr std::uint64_t round_routing = 0x72;
}  // namespace tag

}  // namespace flswarm::rng
