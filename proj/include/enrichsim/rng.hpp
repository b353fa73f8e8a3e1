#pragma once

#include <array>
#include <cstdint>

namespace enrichsim {

/// Counter-based random stream (Philox4x32-10, Salmon et al. 2011).
///
/// A stream is fully determined by (seed, stream_id): replaying either on any
/// thread reproduces the identical draw sequence, and distinct stream_ids give
/// statistically independent sequences. This is what makes replication-level
/// parallelism schedule-independent: replication r simply owns stream_id r
/// (or a small fixed block of ids when it needs several purposes).
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform on the open interval (0,1); never returns 0 or 1, so it is safe
  /// to feed into log() or a normal quantile.
  double uniform01();

  /// mean + sd * Phi^{-1}(U). sd == 0 returns mean exactly (one uniform is
  /// still consumed so stream positions do not depend on parameters).
  double normal(double mean, double sd);

  /// Inverse-CDF exponential draw, rate in events per month.
  double exponential(double rate);

  /// Returns 1 with probability p, else 0.
  int bernoulli(double p);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t draw_index_ = 0;  // 128-bit counter = (draw_index, stream_id)
  std::array<std::uint32_t, 4> block_{};
  int block_pos_ = 4;
};

/// Exponential survival law; median = ln(2)/rate.
struct ExponentialLaw {
  double rate;  // events per month, > 0

  static ExponentialLaw from_median(double median_months);
  double median() const;
};

double draw_exponential(RngStream& rng, const ExponentialLaw& law);

}  // namespace enrichsim
