#pragma once

#include <array>
#include <cstdint>

namespace genen {

/// Philox4x32-10 counter-based generator (Salmon, Moraes, Dror, Shaw 2011).
///
/// The 64-bit user seed forms the key; the 64-bit stream id occupies the two
/// high counter words, so streams split from the same seed draw from disjoint
/// counter ranges and can run in parallel without coordination.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;

  Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xFFFFFFFFu; }

  result_type operator()();

  /// One keyed 10-round block; exposed for known-answer tests.
  static std::array<std::uint32_t, 4> block(
      std::array<std::uint32_t, 4> counter,
      std::array<std::uint32_t, 2> key) noexcept;

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> buffer_{};
  int pos_;
};

/// Seed record for one reproducible stream: stream r of master seed s.
struct SeedSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// One random stream with the uniform/gaussian draws the simulators need.
/// Gaussian variates use a fixed Box-Muller transform (two uniforms per
/// draw, no cached second value) so the draw order is stable.
class RngStream {
 public:
  explicit RngStream(SeedSpec spec) noexcept;
  RngStream(std::uint64_t seed, std::uint64_t stream) noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal.
  double gaussian();

  SeedSpec spec() const noexcept { return spec_; }

 private:
  Philox4x32 engine_;
  SeedSpec spec_;
};

}  // namespace genen
