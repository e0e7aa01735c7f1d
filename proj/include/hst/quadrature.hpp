#pragma once

#include <functional>

namespace hst {

// Deterministic ground-truth oracles used by the validation suites and the
// calibration sweep. These follow computational routes independent of the
// Monte Carlo estimators they are checked against.

/// Adaptive Simpson integration to the requested absolute tolerance.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-12);

/// Noise sensitivity of a halfspace of Gaussian volume p at noise rate t,
/// by one-dimensional quadrature of the conditional escape probability.
double ns_halfspace(double p, double t);

/// Noise sensitivity of a centered slab of Gaussian volume p at rate t.
double ns_slab_centered(double p, double t);

/// Noise sensitivity of a halfspace in n = 2 by brute-force tensor-grid
/// quadrature over the plane (cross-check of ns_halfspace at higher cost).
double ns_halfspace_tensor2d(double p, double t, int grid_points_per_axis = 400);

/// Mean of a standard normal conditioned on [lower, upper].
double truncated_normal_mean(double lower, double upper);

/// Variance of a standard normal conditioned on [lower, upper].
double truncated_normal_variance(double lower, double upper);

/// Cdf of the standard normal conditioned on [lower, upper], evaluated at s.
double truncated_normal_cdf(double lower, double upper, double s);

}  // namespace hst
