#pragma once

// Test-only numeric oracles, independent of the library's double-precision
// erfc path: extended-precision erfcl plus raw quadrature cross-checks.

#include <cmath>
#include <functional>

namespace oracles {

inline long double upper_tail(long double r) {
  return 0.5L * erfcl(r / 1.41421356237309504880168872420969807857L);
}

inline long double norm_cdf(long double x) {
  return x < 0.0L ? upper_tail(-x) : 1.0L - upper_tail(x);
}

inline long double norm_pdf(long double x) {
  return 0.39894228040143267793994605993438186848L * expl(-0.5L * x * x);
}

// plain recursive Simpson in long double; used to cross-check erfcl itself
inline long double simpson_rec(const std::function<long double(long double)>& f,
                               long double a, long double b, long double fa,
                               long double fm, long double fb, long double whole,
                               long double tol, int depth) {
  long double m = 0.5L * (a + b);
  long double lm = 0.5L * (a + m), rm = 0.5L * (m + b);
  long double flm = f(lm), frm = f(rm);
  long double left = (m - a) / 6.0L * (fa + 4.0L * flm + fm);
  long double right = (b - m) / 6.0L * (fm + 4.0L * frm + fb);
  if (depth <= 0 || fabsl(left + right - whole) <= 15.0L * tol)
    return left + right + (left + right - whole) / 15.0L;
  return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0L, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0L, depth - 1);
}

inline long double integrate(const std::function<long double(long double)>& f,
                             long double a, long double b, long double tol = 1e-20L) {
  long double fa = f(a), fb = f(b), fm = f(0.5L * (a + b));
  long double whole = (b - a) / 6.0L * (fa + 4.0L * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 40);
}

// upper tail via quadrature on [r, r+12]; independent of erfc entirely
// (the truncated remainder is below 1e-31 relative)
inline long double upper_tail_quadrature(long double r) {
  long double tol = norm_pdf(r) * 1e-17L;
  return integrate([](long double x) { return norm_pdf(x); }, r, r + 12.0L, tol);
}

// quantile by bisection on the erfcl cdf
inline double quantile(double p) {
  long double lo = -41.0L, hi = 41.0L;
  for (int i = 0; i < 200; ++i) {
    long double mid = 0.5L * (lo + hi);
    if (static_cast<double>(norm_cdf(mid)) < p)
      lo = mid;
    else
      hi = mid;
  }
  return static_cast<double>(0.5L * (lo + hi));
}

// asymptotic Kolmogorov distribution: Pr[sqrt(n) D_n > lambda]
inline double kolmogorov_tail(double lambda) {
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double term = 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * lambda * lambda);
    s += term;
    if (std::fabs(term) < 1e-16) break;
  }
  return s;
}

}  // namespace oracles
