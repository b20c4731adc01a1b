#include "fsi/rng.hpp"

#include <cmath>
#include <numbers>

namespace fsi {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
  return static_cast<double>(bits & ((std::uint64_t{1} << 53) - 1)) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      stream_(stream) {}

Philox4x32::Block Philox4x32::block(std::uint64_t counter) const noexcept {
  Block ctr{static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32),
            static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  std::array<std::uint32_t, 2> key = key_;
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

double Philox4x32::uniform(std::uint64_t counter) const noexcept {
  const Block b = block(counter);
  return to_unit(b[0], b[1]);
}

std::array<double, 2> Philox4x32::normal_pair(std::uint64_t counter) const noexcept {
  const Block b = block(counter);
  // 1 − u keeps the logarithm argument in (0, 1].
  const double u1 = 1.0 - to_unit(b[0], b[1]);
  const double u2 = to_unit(b[2], b[3]);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

std::complex<double> Philox4x32::complex_normal(std::uint64_t counter) const noexcept {
  const auto pair = normal_pair(counter);
  return {pair[0] * std::numbers::sqrt2 / 2.0, pair[1] * std::numbers::sqrt2 / 2.0};
}

int RandomStream::integer(int lo, int hi) noexcept {
  const double span = static_cast<double>(hi - lo + 1);
  const int value = lo + static_cast<int>(std::floor(uniform() * span));
  return value > hi ? hi : value;
}

}  // namespace fsi
