#pragma once

#include <cstdint>

#include "hst/oracle_bundle.hpp"

namespace hst {

/// Estimate of NS_t(f) / Vol(f), the normalized noise sensitivity.
struct NoiseSensEstimate {
  double value;          // in [0, 2]
  double t;              // noise rate
  std::int64_t samples_used;
  double kappa;          // target additive accuracy
};

/// The pairwise inner-product statistic T over 2m conditional samples.
struct PairwiseStatistic {
  double value;
  std::int64_t m;
};

struct EstSenseOptions {
  double k_hoeffding = 16.0;  // N = ceil(k * m_scale / kappa^2)
  double m_scale = 1.0;
};

/// Sample count the est_sense schedule realizes for a given accuracy.
std::int64_t est_sense_sample_count(double kappa, const EstSenseOptions& opts = {});

/// Draws N = ceil(k_hoeffding * m_scale / kappa^2) conditional samples, noise-
/// perturbs each at rate t, queries membership at the perturbed point, and
/// returns twice the fraction that escaped f^{-1}(1). At the default k = 16
/// the estimate is within +-kappa of NS_t(f)/Vol(f) with probability >= 0.99.
NoiseSensEstimate est_sense(OracleBundle& bundle, double t, double kappa,
                            const EstSenseOptions& opts = {});

/// Draws m + m conditional samples and returns (sum_i x_i) . (sum_j y_j) / m^2,
/// algebraically the full double sum over all (i, j) pairs in O(mn).
/// Unbiased for the level-1 Hermite weight over squared volume. The
/// off_diagonal toggle drops the i = j terms (the prose variant); the mean is
/// unchanged, only the variance constant differs.
PairwiseStatistic pairwise_T(OracleBundle& bundle, std::int64_t m,
                             bool off_diagonal = false);

struct McEstimate {
  double estimate;
  double std_error;
};

/// Unconditioned Monte Carlo estimate of Vol(f) with binomial standard error.
McEstimate mc_volume(const FunctionSpec& spec, std::int64_t n_samples, Rng& rng);

/// Monte Carlo estimate of Vol(f^{-1}(1) symdiff g^{-1}(1)) / Vol(f) with
/// propagated standard error. Vol(f) uses the closed form when available and
/// an auxiliary MC estimate otherwise.
McEstimate mc_relative_distance(const FunctionSpec& spec_f, const FunctionSpec& spec_g,
                                std::int64_t n_samples, Rng& rng);

/// Monte Carlo estimate of the level-k Hermite weight, k in {1, 2}, via the
/// split-sample cross product of coefficient estimates (unbiased).
double mc_levelk_weight(const FunctionSpec& spec, int k, std::int64_t n_samples,
                        Rng& rng);

}  // namespace hst
