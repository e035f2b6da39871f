#include "wishlab/rng.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "wishlab/error.hpp"

namespace wishlab {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

PhiloxCounter philox4x32(PhiloxCounter c, PhiloxKey k) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

std::array<double, 2> normal_pair(PhiloxKey key, PhiloxCounter ctr) noexcept {
  const PhiloxCounter r = philox4x32(ctr, key);
  const double u1 = to_unit_open((static_cast<std::uint64_t>(r[0]) << 32) | r[1]);
  const double u2 = to_unit_open((static_cast<std::uint64_t>(r[2]) << 32) | r[3]);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

PhiloxKey make_key(std::uint64_t seed) noexcept {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

PhiloxEngine::PhiloxEngine(std::uint64_t seed, std::uint32_t path_index, std::uint32_t stream_id) noexcept
    : key_(make_key(seed)), path_(path_index), stream_(stream_id) {}

PhiloxEngine::result_type PhiloxEngine::operator()() noexcept {
  if (pos_ == 4) {
    buf_ = philox4x32({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32), path_, stream_},
                      key_);
    ++block_;
    pos_ = 0;
  }
  return buf_[pos_++];
}

double RandomStream::uniform() noexcept {
  const std::uint64_t hi = engine_();
  const std::uint64_t lo = engine_();
  return to_unit_open((hi << 32) | lo);
}

double RandomStream::normal() noexcept {
  // Polar-free Box-Muller; the second variate is discarded so that each call
  // consumes a fixed number of engine outputs.
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RandomStream::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) throw DomainError("gamma variate needs shape > 0 and rate > 0");
  std::gamma_distribution<double> dist(shape, 1.0 / rate);
  return dist(engine_);
}

std::uint64_t RandomStream::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw DomainError("poisson mean must be finite and >= 0");
  if (mean == 0.0) return 0;
  std::poisson_distribution<std::uint64_t> dist(mean);
  return dist(engine_);
}

RandomStream rng_streams(std::uint64_t seed, std::uint32_t path_index, std::uint32_t stream_id) noexcept {
  return RandomStream(seed, path_index, stream_id);
}

}  // namespace wishlab
