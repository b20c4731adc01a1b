#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace fsi {

/// Philox4x32-10 counter-based generator.
///
/// Output is a pure function of (seed, stream, counter), so a draw can be
/// addressed directly (for example by fiber and entry) and results do not
/// depend on evaluation order or thread count.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept;

  Block block(std::uint64_t counter) const noexcept;

  /// Uniform double in [0, 1) with 53 random bits, drawn from block `counter`.
  double uniform(std::uint64_t counter) const noexcept;

  /// Standard normal pair (Box-Muller) drawn from block `counter`.
  std::array<double, 2> normal_pair(std::uint64_t counter) const noexcept;

  /// Complex standard Gaussian, E|z|² = 1.
  std::complex<double> complex_normal(std::uint64_t counter) const noexcept;

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
};

/// Sequential convenience wrapper over Philox4x32 with an internal counter.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept : gen_(seed, stream) {}

  double uniform() noexcept { return gen_.uniform(counter_++); }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  double normal() noexcept { return gen_.normal_pair(counter_++)[0]; }
  std::complex<double> complex_normal() noexcept { return gen_.complex_normal(counter_++); }
  /// Uniform integer in [lo, hi].
  int integer(int lo, int hi) noexcept;

 private:
  Philox4x32 gen_;
  std::uint64_t counter_ = 0;
};

}  // namespace fsi
