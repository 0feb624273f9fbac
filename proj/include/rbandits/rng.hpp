#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

namespace rbandits {

// SplitMix64 finalizer. Used only for deriving substream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Substream derivation rule: fold each index into the seed with mix64.
// derive_stream(base, a)       -> per-arm / per-cell streams
// derive_stream(base, a, b)    -> per-(path, arm) streams
// Identical (base, indices) give identical streams on every platform.
inline std::uint64_t derive_stream(std::uint64_t base, std::uint64_t a) {
  return mix64(base ^ mix64(a));
}
inline std::uint64_t derive_stream(std::uint64_t base, std::uint64_t a,
                                   std::uint64_t b) {
  return mix64(derive_stream(base, a) ^ mix64(b + 0x632BE59BD9B4E019ULL));
}
inline std::uint64_t derive_stream(std::uint64_t base, std::uint64_t a,
                                   std::uint64_t b, std::uint64_t c) {
  return mix64(derive_stream(base, a, b) ^ mix64(c + 0x9E6C63D0876A9A62ULL));
}

// Seedable generator with bit-reproducible draws. std::mt19937_64 output is
// fully specified by the standard; the real-valued mappings below avoid
// std::*_distribution, whose algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1): 53 high bits of one draw.
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1): half-offset lattice, never returns an endpoint.
  double uniform01_open() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Exp(1) by inversion; strictly positive.
  double exponential() { return -std::log(uniform01_open()); }

  // Index sampled from a pmf (assumed to sum to 1) by CDF scan.
  int categorical(std::span<const double> pmf) {
    double u = uniform01();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < pmf.size(); ++i) {
      acc += pmf[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(pmf.size()) - 1;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace rbandits
