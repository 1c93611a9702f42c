#pragma once

// Reference computations that share no code with the library.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace oracle {

using Fn = std::function<double(double)>;

inline double simpson_step(const Fn& g, double a, double b, double fa, double fm, double fb,
                           double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = g(lm);
  const double frm = g(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Adaptive Simpson quadrature.
inline double integrate(const Fn& g, double a, double b, double tol = 1e-14) {
  if (a == b) return 0.0;
  const double fa = g(a);
  const double fb = g(b);
  const double fm = g(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(g, a, b, fa, fm, fb, whole, tol, 50);
}

// Plain bisection; g(lo) and g(hi) must differ in sign.
inline double bisect(const Fn& g, double lo, double hi) {
  double glo = g(lo);
  if (glo == 0.0) return lo;
  if (g(hi) == 0.0) return hi;
  if ((glo > 0.0) == (g(hi) > 0.0)) throw std::invalid_argument("bisect: no sign change");
  for (int k = 0; k < 200; ++k) {
    const double m = 0.5 * (lo + hi);
    if (m == lo || m == hi) break;
    const double gm = g(m);
    if (gm == 0.0) return m;
    if ((gm > 0.0) == (glo > 0.0)) {
      lo = m;
      glo = gm;
    } else {
      hi = m;
    }
  }
  return 0.5 * (lo + hi);
}

// a(u1,u2) as the ddf-weighted mean of u.
inline double average(const Fn& ddf, double u1, double u2) {
  if (u1 == u2) return u1;
  const double num = integrate([&](double u) { return ddf(u) * u; }, u1, u2);
  const double den = integrate(ddf, u1, u2);
  return num / den;
}

// Interpolant in x: u(x) on [x1,x2] by bisection of x(u) - x.
inline double interpolant_value(const Fn& df, double x1, double u1, double x2, double u2,
                                double x) {
  if (u1 == u2 || x1 == x2) return u1;
  const double s1 = df(u1);
  const double s2 = df(u2);
  const auto xu = [&](double u) { return x1 + (df(u) - s1) / (s2 - s1) * (x2 - x1); };
  return bisect([&](double u) { return xu(u) - x; }, std::min(u1, u2), std::max(u1, u2));
}

// Integral of the interpolant over [x1,x2] by quadrature in x.
inline double area_by_x(const Fn& df, double x1, double u1, double x2, double u2,
                        double tol = 1e-12) {
  return integrate([&](double x) { return interpolant_value(df, x1, u1, x2, u2, x); }, x1, x2, tol);
}

// Departure point of the characteristic through x at time t for smooth u0 before breaking.
inline double departure(const Fn& u0, const Fn& df, double x, double t, double lo, double hi) {
  return bisect([&](double x0) { return x0 + df(u0(x0)) * t - x; }, lo, hi);
}

}  // namespace oracle
