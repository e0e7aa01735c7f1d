#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "hst/function_spec.hpp"
#include "hst/rng.hpp"

namespace hst {

struct SamplerOptions {
  enum class Mode { Auto, ForceRejection };
  Mode mode = Mode::Auto;
  std::uint64_t rejection_cap = 1'000'000;
};

/// Bound pair of membership oracle MQ(f) and conditional sampler SAMP(f)
/// over one seeded randomness stream. Counters increase by exactly one per
/// oracle call; equal seeds and call sequences replay bit-identically.
/// Single-owner: parallel trials each derive their own bundle from a
/// per-trial subseed.
class OracleBundle {
 public:
  OracleBundle(FunctionSpec spec, std::uint64_t seed, SamplerOptions opts = {});

  /// MQ(f): exact membership of x in f^{-1}(1).
  bool mq(const Eigen::Ref<const Eigen::VectorXd>& x);

  /// SAMP(f): a draw from N(0, I_n) conditioned on f^{-1}(1). Halfspaces and
  /// slabs use an exact inverse-cdf construction along the direction vector;
  /// other variants use rejection sampling against N(0, I_n) and raise
  /// SamplerStarved past the attempt cap.
  Eigen::VectorXd sample();

  const FunctionSpec& spec() const { return spec_; }
  std::uint64_t mq_count() const { return mq_count_; }
  std::uint64_t samp_count() const { return samp_count_; }
  Rng& rng() { return rng_; }

 private:
  Eigen::VectorXd sample_exact_direction(const Eigen::VectorXd& direction, double xi);
  double truncated_coordinate_halfspace(double threshold);
  double truncated_coordinate_slab(double lower, double upper);
  Eigen::VectorXd sample_rejection();

  FunctionSpec spec_;
  Rng rng_;
  SamplerOptions opts_;
  std::uint64_t mq_count_ = 0;
  std::uint64_t samp_count_ = 0;
};

/// The conditional-sample oracle as a free operation.
inline Eigen::VectorXd sample_conditional(OracleBundle& bundle) {
  return bundle.sample();
}

/// Ornstein-Uhlenbeck noise operator: exp(-t) x + sqrt(1 - exp(-2t)) z with
/// fresh standard Gaussian z; t = 0 returns x unchanged.
Eigen::VectorXd noise_perturb(const Eigen::Ref<const Eigen::VectorXd>& x, double t,
                              Rng& rng);

}  // namespace hst
