#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "predres/special.hpp"

namespace predres {

// SplitMix64 finalizer; used to turn (seed, replicate, step) keys into
// well-mixed engine seeds so that substreams are a pure function of the key.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic random stream. Draws are produced by explicit inverse-CDF
// and rejection constructions so that output is identical across platforms
// and standard-library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double uniform() {
    double u = (engine_() >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
  }

  double normal() { return norm_quantile(uniform()); }

  // Marsaglia-Tsang, valid for any shape > 0.
  double gamma(double shape) {
    if (shape < 1.0) {
      double u = uniform();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      double u = uniform();
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
        return d * v;
      }
    }
  }

  double chi_squared(double nu) { return 2.0 * gamma(0.5 * nu); }

 private:
  std::mt19937_64 engine_;
};

// Counter-based substream derivation: streams for distinct
// (seed, replicate, step) keys are independent for practical purposes and
// the mapping is a pure function of its inputs.
inline Rng substream(std::uint64_t seed, std::uint64_t replicate,
                     std::uint64_t step = 0) {
  std::uint64_t k = mix64(seed);
  k = mix64(k ^ (0xa0761d6478bd642fULL + replicate));
  k = mix64(k ^ (0xe7037ed1a0b428dbULL + step));
  return Rng(k);
}

}  // namespace predres
