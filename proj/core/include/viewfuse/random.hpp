#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace viewfuse {

/// 64-bit FNV-1a. Stable across platforms; used for seeds and cache keys.
[[nodiscard]] std::uint64_t fnv1a64(std::string_view bytes,
                                    std::uint64_t basis = 0xcbf29ce484222325ULL) noexcept;

/// Mixes a base seed with a label so independent streams never share state.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t base, std::string_view label) noexcept;

/// Seeded random source with platform-independent samplers.
///
/// The standard library distributions are implementation-defined, so the
/// samplers here are built directly on the mt19937_64 bit stream. Every
/// draw sequence is reproducible for a given seed on any conforming
/// compiler.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  /// Uniform on (0, 1]; safe to pass to log().
  double uniform_pos();
  /// Uniform integer in [0, n). `n` must be positive.
  std::size_t index(std::size_t n);
  bool bernoulli(double p);
  /// Standard normal (Marsaglia polar method).
  double normal();
  /// log of a Gamma(shape, 1) draw; stays finite for shapes far below 1.
  double log_gamma_draw(double shape);
  double gamma(double shape);
  double beta(double a, double b);

 private:
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace viewfuse
