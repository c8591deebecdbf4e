#ifndef VERVAAT_RNG_HPP_
#define VERVAAT_RNG_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace vervaat {

/*
 * Philox4x32-10 counter-based block cipher (Salmon et al., SC'11).
 *
 * A block is a pure function of (counter, key), so any position of any stream
 * can be produced without touching shared state.
 */
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter block(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      ctr = single_round(ctr, key);
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static constexpr Counter single_round(const Counter& c, const Key& k) {
    const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/*
 * Standard normal quantile, Wichura's AS241 (PPND16).
 * Relative accuracy about 1e-16 over (0,1); the absolute quantile error stays
 * far below 1e-9 even in the extreme tails reachable from 53-bit uniforms.
 */
inline double normal_quantile(double p) {
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
              6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
            1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
          1.3314166789178437745e+2) * r + 3.3871328727963666080e+0);
    const double den =
        (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
              3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
            5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
          4.2313330701600911252e+1) * r + 1.0);
    return q * num / den;
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
            3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
          4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
          2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
          5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -x : x;
}

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/*
 * Deterministic random stream identified by (master_seed, stream_id).
 *
 * The master seed is the Philox key, the stream id occupies the upper half of
 * the counter and the lower half counts blocks. Distinct pairs therefore never
 * share a block, and the sequence for a pair is fixed bit-for-bit.
 */
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : master_seed_(master_seed),
        stream_id_(stream_id),
        key_{static_cast<std::uint32_t>(master_seed),
             static_cast<std::uint32_t>(master_seed >> 32)} {}

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint32_t next_u32() {
    if (used_ == 4) refill();
    return buffer_[used_++];
  }

  /// Uniform on the open interval (0,1) with 53 random bits.
  double uniform() {
    const std::uint32_t hi = next_u32();
    return to_unit(hi, next_u32());
  }

  double normal() { return normal_quantile(uniform()); }

  /// Same values as calling uniform() out.size() times, generated block-wise.
  void fill_uniform(std::span<double> out) {
    std::size_t i = 0;
    while (i < out.size() && used_ != 4) out[i++] = uniform();
    for (; i + 2 <= out.size(); i += 2) {
      refill();
      out[i] = to_unit(buffer_[0], buffer_[1]);
      out[i + 1] = to_unit(buffer_[2], buffer_[3]);
      used_ = 4;
    }
    if (i < out.size()) out[i] = uniform();
  }

  void fill_normal(std::span<double> out) {
    fill_uniform(out);
    for (double& x : out) x = normal_quantile(x);
  }

  double exponential() { return -std::log(uniform()); }

  /// Arcsine law on (0,1) by inversion: sin^2(pi U / 2).
  double arcsine() {
    const double s = std::sin(0.5 * std::numbers::pi * uniform());
    return s * s;
  }

  /// Rayleigh law with density x exp(-x^2/2): sqrt(2 E), E ~ Exp(1).
  double rayleigh() { return std::sqrt(2.0 * exponential()); }

 private:
  static double to_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (std::uint64_t{hi >> 5} << 26) | (lo >> 6);
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  void refill() {
    const Philox4x32::Counter ctr{
        static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(stream_id_),
        static_cast<std::uint32_t>(stream_id_ >> 32)};
    buffer_ = Philox4x32::block(ctr, key_);
    ++block_;
    used_ = 0;
  }

  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  Philox4x32::Key key_;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buffer_{};
  int used_ = 4;
};

/// Stream id for replicate `replicate` of an experiment component `tag`.
constexpr std::uint64_t stream_id_for(std::uint64_t tag, std::uint64_t replicate) {
  return (tag << 40) ^ replicate;
}

}  // namespace vervaat

#endif  // VERVAAT_RNG_HPP_
