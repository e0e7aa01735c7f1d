#include "hst/oracle_bundle.hpp"

#include <cmath>

#include "hst/errors.hpp"
#include "hst/gauss_special.hpp"

namespace hst {

OracleBundle::OracleBundle(FunctionSpec spec, std::uint64_t seed, SamplerOptions opts)
    : spec_(std::move(spec)), rng_(seed), opts_(opts) {
  // measure-zero (or empty) positive sets are forbidden at construction
  double vol;
  try {
    vol = exact_volume(spec_);
  } catch (const NoClosedForm&) {
    return;  // union volume is checked by the rejection sampler's cap instead
  }
  if (!(vol > 0.0))
    throw EmptyPositiveSet("positive set has zero Gaussian measure; SAMP undefined");
}

bool OracleBundle::mq(const Eigen::Ref<const Eigen::VectorXd>& x) {
  ++mq_count_;
  return evaluate(spec_, x);
}

Eigen::VectorXd OracleBundle::sample_exact_direction(const Eigen::VectorXd& direction,
                                                     double xi) {
  // z - (z.u)u is N(0, I - uu^T); adding xi*u gives the exact conditional law
  Eigen::VectorXd z = rng_.normal_vector(spec_.dimension());
  double along = direction.dot(z);
  return z + (xi - along) * direction;
}

double OracleBundle::truncated_coordinate_halfspace(double threshold) {
  // upper-tail inverse cdf: w uniform on (0, tail) keeps full relative
  // precision for volumes down to 1e-9 where rejection would starve
  double tail = detail::norm_upper(threshold);
  double w = tail * rng_.uniform01();
  return -detail::quantile_lower(w);
}

double OracleBundle::truncated_coordinate_slab(double lower, double upper) {
  if (upper <= 0.0) {
    double lo = detail::norm_lower(lower);
    double hi = detail::norm_lower(upper);
    double w = lo + rng_.uniform01() * (hi - lo);
    return detail::quantile_lower(w);
  }
  if (lower >= 0.0) {
    // mirror to the lower tail
    double lo = detail::norm_lower(-upper);
    double hi = detail::norm_lower(-lower);
    double w = lo + rng_.uniform01() * (hi - lo);
    return -detail::quantile_lower(w);
  }
  double lo = detail::norm_lower(lower);
  double hi = detail::norm_lower(upper);
  double w = lo + rng_.uniform01() * (hi - lo);
  return detail::quantile_lower(w);
}

Eigen::VectorXd OracleBundle::sample_rejection() {
  const std::uint64_t cap = opts_.rejection_cap;
  Eigen::VectorXd z(spec_.dimension());
  for (std::uint64_t attempt = 1; attempt <= cap; ++attempt) {
    rng_.fill_normal(z);
    if (evaluate(spec_, z)) return z;
  }
  throw SamplerStarved("rejection sampler exceeded its attempt cap", 0.0);
}

Eigen::VectorXd OracleBundle::sample() {
  ++samp_count_;
  if (opts_.mode == SamplerOptions::Mode::ForceRejection) return sample_rejection();
  return std::visit(
      [&](const auto& v) -> Eigen::VectorXd {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Halfspace>) {
          double xi = truncated_coordinate_halfspace(v.threshold);
          return sample_exact_direction(v.direction, xi);
        } else if constexpr (std::is_same_v<T, Slab>) {
          double xi = truncated_coordinate_slab(v.lower, v.upper);
          return sample_exact_direction(v.direction, xi);
        } else if constexpr (std::is_same_v<T, ConstantFn>) {
          return rng_.normal_vector(spec_.dimension());  // value 1; 0 is rejected at construction
        } else {
          return sample_rejection();
        }
      },
      spec_.variant());
}

Eigen::VectorXd noise_perturb(const Eigen::Ref<const Eigen::VectorXd>& x, double t,
                              Rng& rng) {
  if (!(t >= 0.0) || !std::isfinite(t))
    throw DomainError("noise_perturb: t must be finite and >= 0");
  if (t == 0.0) return x;
  double c = std::exp(-t);
  double s = std::sqrt(-std::expm1(-2.0 * t));
  Eigen::VectorXd z = rng.normal_vector(x.size());
  return c * x + s * z;
}

}  // namespace hst
