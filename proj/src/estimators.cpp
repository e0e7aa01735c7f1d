#include "hst/estimators.hpp"

#include <cmath>
#include <vector>

#include "hst/errors.hpp"

namespace hst {

std::int64_t est_sense_sample_count(double kappa, const EstSenseOptions& opts) {
  if (!(kappa > 0.0 && kappa < 1.0))
    throw ContractError("est_sense: kappa must lie in (0, 1)");
  if (!(opts.k_hoeffding > 0.0) || !(opts.m_scale > 0.0))
    throw ContractError("est_sense: k_hoeffding and m_scale must be positive");
  double n = std::ceil(opts.k_hoeffding * opts.m_scale / (kappa * kappa));
  if (!(n >= 1.0)) n = 1.0;
  if (n > 4.0e18)
    throw DegenerateParameters(
        "est_sense sample schedule is not runnable; widen kappa or lower m_scale");
  return static_cast<std::int64_t>(n);
}

NoiseSensEstimate est_sense(OracleBundle& bundle, double t, double kappa,
                            const EstSenseOptions& opts) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw ContractError("est_sense: t must be finite and positive");
  const std::int64_t n = est_sense_sample_count(kappa, opts);
  std::int64_t escaped = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    Eigen::VectorXd x = bundle.sample();
    Eigen::VectorXd y = noise_perturb(x, t, bundle.rng());
    if (!bundle.mq(y)) ++escaped;
  }
  // NS_t(f) = 2 Vol(f) Pr[f(y)=0 | f(x)=1] by exchangeability of (x, y)
  double value = 2.0 * static_cast<double>(escaped) / static_cast<double>(n);
  return NoiseSensEstimate{value, t, n, kappa};
}

PairwiseStatistic pairwise_T(OracleBundle& bundle, std::int64_t m, bool off_diagonal) {
  if (m < 2) throw ContractError("pairwise_T: m must be at least 2");
  const Eigen::Index n = bundle.spec().dimension();
  Eigen::VectorXd sum_x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sum_y = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::VectorXd> xs;
  if (off_diagonal) xs.reserve(static_cast<std::size_t>(m));
  for (std::int64_t i = 0; i < m; ++i) {
    Eigen::VectorXd x = bundle.sample();
    sum_x += x;
    if (off_diagonal) xs.push_back(std::move(x));
  }
  double diag = 0.0;
  for (std::int64_t i = 0; i < m; ++i) {
    Eigen::VectorXd y = bundle.sample();
    sum_y += y;
    if (off_diagonal) diag += xs[static_cast<std::size_t>(i)].dot(y);
  }
  double mm = static_cast<double>(m) * static_cast<double>(m);
  double value = off_diagonal ? (sum_x.dot(sum_y) - diag) / mm : sum_x.dot(sum_y) / mm;
  if (!std::isfinite(value)) throw Error("pairwise_T produced a non-finite statistic");
  return PairwiseStatistic{value, m};
}

McEstimate mc_volume(const FunctionSpec& spec, std::int64_t n_samples, Rng& rng) {
  if (n_samples < 100) throw ContractError("mc_volume: n_samples must be >= 100");
  std::int64_t hits = 0;
  Eigen::VectorXd z(spec.dimension());
  for (std::int64_t i = 0; i < n_samples; ++i) {
    rng.fill_normal(z);
    if (evaluate(spec, z)) ++hits;
  }
  double p = static_cast<double>(hits) / static_cast<double>(n_samples);
  double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n_samples));
  return McEstimate{p, se};
}

McEstimate mc_relative_distance(const FunctionSpec& spec_f, const FunctionSpec& spec_g,
                                std::int64_t n_samples, Rng& rng) {
  if (spec_f.dimension() != spec_g.dimension())
    throw ContractError("mc_relative_distance: dimension mismatch");
  if (n_samples < 100) throw ContractError("mc_relative_distance: n_samples >= 100");
  double vol_f, vol_f_se = 0.0;
  try {
    vol_f = exact_volume(spec_f);
  } catch (const NoClosedForm&) {
    McEstimate mv = mc_volume(spec_f, n_samples, rng);
    vol_f = mv.estimate;
    vol_f_se = mv.std_error;
  }
  if (!(vol_f > 0.0))
    throw ContractError("mc_relative_distance: Vol(f) must be positive");
  std::int64_t diff = 0;
  Eigen::VectorXd z(spec_f.dimension());
  for (std::int64_t i = 0; i < n_samples; ++i) {
    rng.fill_normal(z);
    if (evaluate(spec_f, z) != evaluate(spec_g, z)) ++diff;
  }
  double d = static_cast<double>(diff) / static_cast<double>(n_samples);
  double d_se = std::sqrt(d * (1.0 - d) / static_cast<double>(n_samples));
  double est = d / vol_f;
  // first-order error propagation for the ratio
  double rel_var = 0.0;
  if (d > 0.0) rel_var += (d_se / d) * (d_se / d);
  rel_var += (vol_f_se / vol_f) * (vol_f_se / vol_f);
  double se = d > 0.0 ? est * std::sqrt(rel_var) : d_se / vol_f;
  return McEstimate{est, se};
}

double mc_levelk_weight(const FunctionSpec& spec, int k, std::int64_t n_samples,
                        Rng& rng) {
  if (k != 1 && k != 2) throw ContractError("mc_levelk_weight: k must be 1 or 2");
  if (n_samples < 100) throw ContractError("mc_levelk_weight: n_samples >= 100");
  const Eigen::Index n = spec.dimension();
  // coefficient estimates from two independent halves; their per-index
  // product is an unbiased estimate of the squared coefficient
  const std::int64_t half = n_samples / 2;
  const Eigen::Index n_coeff =
      k == 1 ? n : n + n * (n - 1) / 2;  // h2 per coordinate plus cross pairs
  Eigen::VectorXd mean_a = Eigen::VectorXd::Zero(n_coeff);
  Eigen::VectorXd mean_b = Eigen::VectorXd::Zero(n_coeff);
  Eigen::VectorXd coeffs(n_coeff);
  Eigen::VectorXd z(n);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  auto fill_coeffs = [&](const Eigen::VectorXd& x) {
    if (k == 1) {
      coeffs = x;
      return;
    }
    for (Eigen::Index i = 0; i < n; ++i) coeffs[i] = (x[i] * x[i] - 1.0) * inv_sqrt2;
    Eigen::Index idx = n;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) coeffs[idx++] = x[i] * x[j];
  };
  for (int side = 0; side < 2; ++side) {
    Eigen::VectorXd& acc = side == 0 ? mean_a : mean_b;
    for (std::int64_t s = 0; s < half; ++s) {
      rng.fill_normal(z);
      if (!evaluate(spec, z)) continue;
      fill_coeffs(z);
      acc += coeffs;
    }
    acc /= static_cast<double>(half);
  }
  return mean_a.dot(mean_b);
}

}  // namespace hst
