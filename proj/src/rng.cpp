#include "enrichsim/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "enrichsim/normal.hpp"

namespace enrichsim {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& c, std::uint32_t k0,
                         std::uint32_t k1) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const auto lo0 = static_cast<std::uint32_t>(p0);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(p1);
  c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
}

inline std::array<std::uint32_t, 4> philox10(std::array<std::uint32_t, 4> ctr,
                                             std::uint32_t k0,
                                             std::uint32_t k1) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k0 += kWeyl0;
      k1 += kWeyl1;
    }
    philox_round(ctr, k0, k1);
  }
  return ctr;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {}

void RngStream::refill() {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(draw_index_),
      static_cast<std::uint32_t>(draw_index_ >> 32),
      static_cast<std::uint32_t>(stream_id_),
      static_cast<std::uint32_t>(stream_id_ >> 32)};
  block_ = philox10(ctr, static_cast<std::uint32_t>(seed_),
                    static_cast<std::uint32_t>(seed_ >> 32));
  ++draw_index_;
  block_pos_ = 0;
}

std::uint32_t RngStream::next_u32() {
  if (block_pos_ >= 4) refill();
  return block_[block_pos_++];
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t hi = next_u32();
  const std::uint64_t lo = next_u32();
  return (hi << 32) | lo;
}

double RngStream::uniform01() {
  // (k + 0.5) / 2^53: equidistant cell centers, strictly inside (0,1).
  const std::uint64_t k = next_u64() >> 11;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double RngStream::normal(double mean, double sd) {
  if (!(sd >= 0.0)) throw std::domain_error("normal: sd must be >= 0");
  const double z = norm_quantile(uniform01());
  return mean + sd * z;
}

double RngStream::exponential(double rate) {
  if (!(rate > 0.0)) throw std::domain_error("exponential: rate must be > 0");
  return -std::log(uniform01()) / rate;
}

int RngStream::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::domain_error("bernoulli: p must be in [0,1]");
  return uniform01() < p ? 1 : 0;
}

ExponentialLaw ExponentialLaw::from_median(double median_months) {
  if (!(median_months > 0.0))
    throw std::domain_error("ExponentialLaw: median must be > 0");
  return ExponentialLaw{std::log(2.0) / median_months};
}

double ExponentialLaw::median() const { return std::log(2.0) / rate; }

double draw_exponential(RngStream& rng, const ExponentialLaw& law) {
  return rng.exponential(law.rate);
}

}  // namespace enrichsim
