#ifndef WISHLAB_RNG_HPP
#define WISHLAB_RNG_HPP

#include <array>
#include <cstdint>
#include <limits>

namespace wishlab {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11): a bijection of the
/// 128-bit counter under a 64-bit key.
PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) noexcept;

/// Maps 64 random bits to a double in the open interval (0, 1).
inline double to_unit_open(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Two independent standard normals as a pure function of (key, counter).
std::array<double, 2> normal_pair(PhiloxKey key, PhiloxCounter ctr) noexcept;

/// Key for the (seed, path) stream; stream_id separates independent uses.
PhiloxKey make_key(std::uint64_t seed) noexcept;

/// Sequential counter-based engine satisfying UniformRandomBitGenerator.
/// Counter layout: {block lo, block hi, path_index, stream_id}.
class PhiloxEngine {
 public:
  using result_type = std::uint32_t;

  PhiloxEngine(std::uint64_t seed, std::uint32_t path_index, std::uint32_t stream_id = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

 private:
  PhiloxKey key_;
  std::uint64_t block_ = 0;
  std::uint32_t path_;
  std::uint32_t stream_;
  PhiloxCounter buf_{};
  int pos_ = 4;
};

/// Random source handed to samplers: uniform, normal, gamma and Poisson
/// variates drawn from one Philox stream.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint32_t path_index, std::uint32_t stream_id = 0) noexcept
      : engine_(seed, path_index, stream_id) {}

  double uniform() noexcept;
  double normal() noexcept;
  /// Gamma with the given shape and rate (mean shape / rate).
  double gamma(double shape, double rate);
  std::uint64_t poisson(double mean);

  PhiloxEngine& engine() noexcept { return engine_; }

 private:
  PhiloxEngine engine_;
};

/// Independent random source for (seed, path_index).
RandomStream rng_streams(std::uint64_t seed, std::uint32_t path_index, std::uint32_t stream_id = 0) noexcept;

}  // namespace wishlab

#endif  // WISHLAB_RNG_HPP
