#pragma once

#include <cmath>

#include "hst/errors.hpp"
#include "hst/probability.hpp"

// Scalar Gaussian kernel: pdf/cdf/quantile of N(0,1) plus the derived maps
// used by the halfspace testers. All maps are pure and total on their
// declared domains; out-of-domain inputs raise DomainError instead of
// returning infinities. Valid for volumes down to 1e-9.

namespace hst {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779;  // 1/sqrt(2*pi)
inline constexpr double kSqrt2 = 1.4142135623730950488;
inline constexpr double kSqrtPi = 1.7724538509055160273;

namespace detail {

// Upper tail Pr[g >= x]; full relative precision for x >= 0.
inline double norm_upper(double x) { return 0.5 * std::erfc(x / kSqrt2); }

// Lower tail Pr[g <= x]; full relative precision for x <= 0.
inline double norm_lower(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

// Lower-tail quantile on raw doubles, p in (0, 1). Rational initial
// approximation refined by two Halley steps against the erfc-based cdf.
double quantile_lower(double p);

// I(p) on a raw smaller-tail argument ps in (0, 0.5].
double isoperimetric_raw(double ps);

// psi(p) = I(p)/p on (0, 0.5].
double surface_ratio_raw(double p);

// V(p) = psi(p)^2 on (0, 0.5].
double level1_ratio_raw(double p);

}  // namespace detail

/// Standard normal density.
inline double gaussian_pdf(double x) {
  if (!std::isfinite(x)) throw DomainError("gaussian_pdf: non-finite input");
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

/// Standard normal cdf. Evaluated in complementary-error-function form so
/// both tails keep full relative precision; the far tail is stored on the
/// Probability's exact side.
Probability gaussian_cdf(double x);

/// Inverse of gaussian_cdf; strictly increasing, accurate to ~1e-14 relative
/// in x over the representable tail range.
double gaussian_quantile(const Probability& p);

/// Gaussian isoperimetric function I(p) = pdf(quantile(p)); equals the
/// Gaussian surface area of any halfspace of volume p. Symmetric about 1/2.
double isoperimetric_I(const Probability& p);

/// Level-1 Hermite weight of a halfspace with volume p (the square of its
/// surface area). Symmetric about 1/2; equals 1/(2*pi) at p = 1/2.
double halfspace_level1_weight(const Probability& p);

/// Surface-to-volume ratio I(p)/p of a halfspace; strictly decreasing on
/// (0, 1/2]. Domain p in (0, 0.5].
double halfspace_surface_ratio(const Probability& p);

/// Level-1 weight normalized by squared volume; equals the expected pairwise
/// statistic of a halfspace and the square of halfspace_surface_ratio.
/// Strictly decreasing on (0, 0.5]. Domain p in (0, 0.5].
double halfspace_level1_ratio(const Probability& p);

/// Inverts halfspace_level1_ratio by bisection over [p_floor, 0.5].
/// Throws OutOfRangeLow when a is below the value at 0.5 (the statistic
/// indicates volume above 1/2) and OutOfRangeHigh when a exceeds the value
/// at p_floor (volume below the floor).
Probability halfspace_volume_for_level1_ratio(double a, double p_floor = 1e-9);

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_lower(double a, double x);

/// Chi-square cdf with k degrees of freedom (Gaussian volume of a centered
/// ball of squared radius x in dimension k).
double chi_square_cdf(double k, double x);

/// Inverse chi-square cdf by bisection.
double chi_square_quantile(double k, double p);

}  // namespace hst
