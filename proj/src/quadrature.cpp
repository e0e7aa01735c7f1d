#include "hst/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "hst/errors.hpp"
#include "hst/gauss_special.hpp"
#include "hst/probability.hpp"

namespace hst {

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, double fa,
               double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double b, double fa,
                double fm, double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = f(lm);
  double frm = f(rm);
  double left = simpson(f, a, m, fa, flm, fm);
  double right = simpson(f, m, b, fm, frm, fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol) {
  double fa = f(a);
  double fb = f(b);
  double fm = f(0.5 * (a + b));
  double whole = simpson(f, a, b, fa, fm, fb);
  return adaptive(f, a, b, fa, fm, fb, whole, tol, 48);
}

double ns_halfspace(double p, double t) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("ns_halfspace: p in (0,1)");
  if (!(t > 0.0)) throw DomainError("ns_halfspace: t > 0");
  // threshold with upper tail p; escape probability of the correlated pair
  double a = -detail::quantile_lower(p);
  double rho = std::exp(-t);
  double s = std::sqrt(-std::expm1(-2.0 * t));
  auto f = [&](double x) {
    return gaussian_pdf(x) * detail::norm_lower((a - rho * x) / s);
  };
  double hi = std::max(a + 40.0, 40.0);
  return 2.0 * integrate_adaptive(f, a, hi, 1e-14);
}

double ns_slab_centered(double p, double t) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("ns_slab_centered: p in (0,1)");
  if (!(t > 0.0)) throw DomainError("ns_slab_centered: t > 0");
  double a = detail::quantile_lower(0.5 * (1.0 + p));
  if (a < 0.0) a = -a;
  double rho = std::exp(-t);
  double s = std::sqrt(-std::expm1(-2.0 * t));
  auto f = [&](double x) {
    double inside = detail::norm_lower((a - rho * x) / s) -
                    detail::norm_lower((-a - rho * x) / s);
    return gaussian_pdf(x) * (1.0 - inside);
  };
  return 2.0 * integrate_adaptive(f, -a, a, 1e-14);
}

double ns_halfspace_tensor2d(double p, double t, int grid_points_per_axis) {
  if (grid_points_per_axis < 10)
    throw ContractError("ns_halfspace_tensor2d: grid too coarse");
  double a = -detail::quantile_lower(p);
  double rho = std::exp(-t);
  double s = std::sqrt(-std::expm1(-2.0 * t));
  // E over x ~ N(0, I_2) restricted to {x1 >= a} of Pr[y1 < a | x], on a
  // tensor product midpoint grid in both coordinates
  const double lo1 = a, hi1 = a + 12.0;
  const double lo2 = -8.0, hi2 = 8.0;
  const int g = grid_points_per_axis;
  const double h1 = (hi1 - lo1) / g;
  const double h2 = (hi2 - lo2) / g;
  double acc = 0.0;
  for (int i = 0; i < g; ++i) {
    double x1 = lo1 + (i + 0.5) * h1;
    double w1 = gaussian_pdf(x1) * h1;
    double escape = detail::norm_lower((a - rho * x1) / s);
    double inner = 0.0;
    for (int j = 0; j < g; ++j) {
      double x2 = lo2 + (j + 0.5) * h2;
      inner += gaussian_pdf(x2) * h2;
    }
    acc += w1 * escape * inner;
  }
  return 2.0 * acc;
}

double truncated_normal_mean(double lower, double upper) {
  if (!(lower < upper)) throw DomainError("truncated_normal_mean: lower < upper");
  double mass = 0.0;
  if (upper <= 0.0)
    mass = detail::norm_lower(upper) - detail::norm_lower(lower);
  else if (lower >= 0.0)
    mass = detail::norm_upper(lower) - detail::norm_upper(upper);
  else
    mass = detail::norm_lower(upper) - detail::norm_lower(lower);
  // int x phi(x) = phi(lower) - phi(upper)
  double lo_pdf = std::isfinite(lower) ? gaussian_pdf(lower) : 0.0;
  double hi_pdf = std::isfinite(upper) ? gaussian_pdf(upper) : 0.0;
  return (lo_pdf - hi_pdf) / mass;
}

double truncated_normal_variance(double lower, double upper) {
  double mu = truncated_normal_mean(lower, upper);
  double mass = detail::norm_lower(upper) - detail::norm_lower(lower);
  double lo_term = std::isfinite(lower) ? lower * gaussian_pdf(lower) : 0.0;
  double hi_term = std::isfinite(upper) ? upper * gaussian_pdf(upper) : 0.0;
  double second = 1.0 + (lo_term - hi_term) / mass;
  return second - mu * mu;
}

double truncated_normal_cdf(double lower, double upper, double s) {
  if (s <= lower) return 0.0;
  if (s >= upper) return 1.0;
  double mass, below;
  if (lower >= 0.0) {
    // both endpoints in the upper tail: difference of upper tails is exact
    mass = detail::norm_upper(lower) - detail::norm_upper(upper);
    below = detail::norm_upper(lower) - detail::norm_upper(s);
  } else {
    mass = detail::norm_lower(upper) - detail::norm_lower(lower);
    below = detail::norm_lower(s) - detail::norm_lower(lower);
  }
  return below / mass;
}

}  // namespace hst
