#include "hst/gauss_special.hpp"

#include <algorithm>
#include <limits>

namespace hst {
namespace detail {

namespace {

// Acklam's rational approximation to the normal quantile (~1.15e-9 relative).
double acklam_initial(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    double q = p - 0.5;
    double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  double q = std::sqrt(-2.0 * std::log(1.0 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

// One Halley step of x -> x - e/phi / (1 + x*e/phi/2) against the lower-tail
// cdf; requires x <= 0 so that norm_lower keeps relative precision.
double halley_lower(double x, double p) {
  double e = norm_lower(x) - p;
  double u = e / gaussian_pdf(x);
  return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace

double quantile_lower(double p) {
  if (p == 0.5) return 0.0;
  if (p > 0.5) return -quantile_lower(1.0 - p);
  double x = acklam_initial(p);
  // phi(x) underflows past x ~ -38; the initial approximation is already
  // ~1e-9 relative there, far below any contracted tolerance.
  if (x > -37.0) {
    x = halley_lower(x, p);
    x = halley_lower(x, p);
  }
  return x == 0.0 ? 0.0 : x;
}

double isoperimetric_raw(double ps) {
  double z = quantile_lower(ps);
  if (ps < 1e-4) {
    // deep tail: expand log(phi(z)) analytically to sidestep intermediate
    // underflow of the squared quantile path
    return std::exp(-0.5 * z * z + std::log(kInvSqrt2Pi));
  }
  return gaussian_pdf(z);
}

double surface_ratio_raw(double p) { return isoperimetric_raw(p) / p; }

double level1_ratio_raw(double p) {
  double r = surface_ratio_raw(p);
  return r * r;
}

}  // namespace detail

Probability gaussian_cdf(double x) {
  if (!std::isfinite(x)) throw DomainError("gaussian_cdf: non-finite input");
  if (x == 0.0) return Probability(0.5);
  double tail = detail::norm_upper(std::fabs(x));
  if (tail <= 0.0)
    throw DomainError("gaussian_cdf: tail underflows double range (|x| > 38.4)");
  return x > 0.0 ? Probability::from_upper_tail(tail)
                 : Probability::from_lower_tail(tail);
}

double gaussian_quantile(const Probability& p) {
  double x = detail::quantile_lower(p.smaller_tail());
  if (x == 0.0) return 0.0;
  return p.smaller_tail_is_upper() ? -x : x;
}

double isoperimetric_I(const Probability& p) {
  return detail::isoperimetric_raw(p.smaller_tail());
}

double halfspace_level1_weight(const Probability& p) {
  double i = detail::isoperimetric_raw(p.smaller_tail());
  return i * i;
}

double halfspace_surface_ratio(const Probability& p) {
  double v = p.value();
  if (v > 0.5) throw DomainError("halfspace_surface_ratio: requires p <= 0.5");
  return detail::surface_ratio_raw(v);
}

double halfspace_level1_ratio(const Probability& p) {
  double v = p.value();
  if (v > 0.5) throw DomainError("halfspace_level1_ratio: requires p <= 0.5");
  return detail::level1_ratio_raw(v);
}

Probability halfspace_volume_for_level1_ratio(double a, double p_floor) {
  if (!std::isfinite(a)) throw DomainError("level1 ratio must be finite");
  if (!(p_floor > 0.0 && p_floor < 0.5))
    throw ContractError("p_floor must lie in (0, 0.5)");
  const double v_at_half = detail::level1_ratio_raw(0.5);
  const double v_at_floor = detail::level1_ratio_raw(p_floor);
  if (a < v_at_half)
    throw OutOfRangeLow("level1 ratio below V(0.5): volume would exceed 0.5");
  if (a > v_at_floor)
    throw OutOfRangeHigh("level1 ratio above V(p_floor): volume below floor");
  double lo = p_floor;  // V(lo) >= a
  double hi = 0.5;      // V(hi) <= a
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (detail::level1_ratio_raw(mid) > a)
      lo = mid;
    else
      hi = mid;
  }
  return Probability(0.5 * (lo + hi));
}

double regularized_gamma_lower(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0) || !std::isfinite(x))
    throw DomainError("regularized_gamma_lower: requires a > 0, x >= 0");
  if (x == 0.0) return 0.0;
  const double log_prefix = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    // series for P(a, x)
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 10000; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(log_prefix);
  }
  // Lentz continued fraction for Q(a, x)
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  double q = std::exp(log_prefix) * h;
  return 1.0 - q;
}

double chi_square_cdf(double k, double x) {
  if (!(k > 0.0)) throw DomainError("chi_square_cdf: requires k > 0");
  return regularized_gamma_lower(0.5 * k, 0.5 * x);
}

double chi_square_quantile(double k, double p) {
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("chi_square_quantile: requires p in (0, 1)");
  double lo = 0.0;
  double hi = k + 20.0 * std::sqrt(k) + 200.0;
  while (chi_square_cdf(k, hi) < p) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (chi_square_cdf(k, mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace hst
