#pragma once

#include <functional>
#include <optional>

namespace cpm::numerics {

using ScalarFn = std::function<double(double)>;

struct RootResult {
  double root = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Newton iteration kept inside the bracket [lo, hi]; steps that leave the bracket
// or stall fall back to bisection. g(lo) and g(hi) must not have the same strict sign.
// Once the relative step drops below rel_tol one more Newton step is taken, which
// brings a quadratically converging iterate to machine precision.
// Returns std::nullopt when the bracket does not contain a sign change.
std::optional<RootResult> safeguarded_newton(const ScalarFn& g, const ScalarFn& dg, double lo,
                                             double hi, double guess, double rel_tol,
                                             int max_iter);

// Derivative-free bracketed root (TOMS 748) to full double precision.
std::optional<double> bracketed_root(const ScalarFn& g, double lo, double hi);

// Adaptive Gauss-Kronrod quadrature (abs 1e-12 / rel 1e-10 targets).
double integrate(const ScalarFn& g, double a, double b);

inline constexpr double kQuadratureAbsTol = 1e-12;
inline constexpr double kQuadratureRelTol = 1e-10;

}  // namespace cpm::numerics
