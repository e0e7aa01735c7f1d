#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <random>

namespace hst {

/// SplitMix64 mixing step; the stated subseed derivation is
/// subseed(base, i) = splitmix64(base + (i + 1) * 0x9E3779B97F4A7C15),
/// i.e. the SplitMix64 output stream of `base` evaluated at index i.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t subseed(std::uint64_t base_seed, std::uint64_t index) {
  return splitmix64(base_seed + index * 0x9E3779B97F4A7C15ULL);
}

namespace detail {

// 128-layer ziggurat tables for the standard normal: equal-area horizontal
// strips under exp(-x^2/2) with r = 3.442619855899 and strip area
// v = 9.91256303526217e-3. x descends from v/exp(-r^2/2) to 0; f = exp(-x^2/2).
struct ZigguratTables {
  double x[130];
  double f[130];
  ZigguratTables() {
    const double r = 3.442619855899;
    const double v = 9.91256303526217e-3;
    auto pdf = [](double t) { return std::exp(-0.5 * t * t); };
    x[0] = v / pdf(r);
    x[1] = r;
    for (int i = 1; i < 127; ++i)
      x[i + 1] = std::sqrt(-2.0 * std::log(v / x[i] + pdf(x[i])));
    x[128] = 0.0;
    for (int i = 0; i <= 127; ++i) f[i] = pdf(x[i]);
    f[128] = 1.0;
  }
};

inline const ZigguratTables& ziggurat() {
  static const ZigguratTables tables;
  return tables;
}

}  // namespace detail

/// Deterministic randomness stream: mt19937_64 with a 53-bit uniform mapping
/// and ziggurat normal draws. Identical seeds give bit-identical sequences
/// on any conforming platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    static constexpr double kR = 3.442619855899;
    const auto& zt = detail::ziggurat();
    for (;;) {
      std::uint64_t bits = engine_();
      int i = static_cast<int>(bits & 127);  // layer; disjoint from the u bits
      double u =
          (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-52 - 1.0;  // (-1, 1)
      double x = u * zt.x[i];
      if (std::fabs(x) < zt.x[i + 1]) return x;
      if (i == 0) {
        // exact tail beyond r via exponential rejection
        double xx, yy;
        do {
          xx = -std::log(uniform01()) / kR;
          yy = -std::log(uniform01());
        } while (yy + yy < xx * xx);
        return u > 0.0 ? kR + xx : -(kR + xx);
      }
      if (zt.f[i] + uniform01() * (zt.f[i + 1] - zt.f[i]) <
          std::exp(-0.5 * x * x))
        return x;
    }
  }

  void fill_normal(Eigen::Ref<Eigen::VectorXd> out) {
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = normal();
  }

  Eigen::VectorXd normal_vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    fill_normal(v);
    return v;
  }

  /// Uniformly distributed unit direction.
  Eigen::VectorXd unit_direction(Eigen::Index n) {
    Eigen::VectorXd v = normal_vector(n);
    double nrm = v.norm();
    while (nrm == 0.0) {  // probability zero, but keep the contract total
      v = normal_vector(n);
      nrm = v.norm();
    }
    return v / nrm;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hst
