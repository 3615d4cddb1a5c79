#include "genen/rng.hpp"

#include <cmath>
#include <numbers>

namespace genen {

namespace {

constexpr std::uint32_t kMult0 = 0xD2511F53u;
constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void one_round(std::array<std::uint32_t, 4>& x,
                      const std::array<std::uint32_t, 2>& k) noexcept {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kMult0) * x[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kMult1) * x[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::block(
    std::array<std::uint32_t, 4> counter,
    std::array<std::uint32_t, 2> key) noexcept {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    one_round(counter, key);
  }
  return counter;
}

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_{static_cast<std::uint32_t>(seed),
           static_cast<std::uint32_t>(seed >> 32)},
      counter_{0u, 0u, static_cast<std::uint32_t>(stream),
               static_cast<std::uint32_t>(stream >> 32)},
      pos_(4) {}

void Philox4x32::refill() {
  buffer_ = block(counter_, key_);
  pos_ = 0;
  // 64-bit within-stream counter; the stream words never change.
  if (++counter_[0] == 0) {
    ++counter_[1];
  }
}

Philox4x32::result_type Philox4x32::operator()() {
  if (pos_ == 4) {
    refill();
  }
  return buffer_[pos_++];
}

RngStream::RngStream(SeedSpec spec) noexcept
    : engine_(spec.seed, spec.stream), spec_(spec) {}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) noexcept
    : RngStream(SeedSpec{seed, stream}) {}

double RngStream::uniform() {
  const std::uint64_t hi = engine_();
  const std::uint64_t lo = engine_();
  const std::uint64_t bits = (hi << 32) | lo;
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double RngStream::gaussian() {
  const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace genen
