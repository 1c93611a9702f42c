#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cpm {

// Closed value range [lo, hi]; either end may be infinite.
struct ValueInterval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  ValueInterval() = default;
  ValueInterval(double lo_, double hi_);

  bool contains(double u) const { return u >= lo && u <= hi; }
  bool strictly_contains(double u) const { return u > lo && u < hi; }
  bool bounded() const;
  double length() const { return hi - lo; }
  static ValueInterval spanning(double a, double b);
};

// A scalar flux f with its first two derivatives and the known zero crossings of f''.
//
// The nonlinear average a(u1, u2) = [f'u - f] / [f'] gives the exact area between two
// characteristic particles as (gap) * a. It is evaluated from a closed form where one is
// supplied, from the boundary terms otherwise, and by quadrature of the f''-weighted
// mean only when [f'] is too small for the boundary form to be trusted.
//
// Instances are immutable after construction.
class FluxModel {
 public:
  using Fn = std::function<double(double)>;
  using AverageFn = std::function<double(double, double)>;

  enum class AverageForm { closed_form, quadrature };

  struct Definition {
    std::string name;
    Fn f;
    Fn df;
    Fn ddf;
    std::vector<double> inflection_points;  // sign changes of ddf, any order
    ValueInterval admissible;
    AverageFn closed_average;  // optional
  };

  // Validates derivatives by finite differences and the declared inflection points
  // against the sign pattern of ddf. Throws ConfigError on mismatch.
  static FluxModel from_definition(Definition def);

  static FluxModel burgers();
  static FluxModel quartic();
  static FluxModel buckley_leverett();
  static FluxModel linear(double speed);
  // "burgers" | "quartic" | "buckley_leverett" | "linear" (unit speed)
  static FluxModel by_name(std::string_view name);

  const std::string& name() const { return name_; }
  double f(double u) const { return f_(u); }
  double df(double u) const { return df_(u); }
  double ddf(double u) const { return ddf_(u); }
  std::span<const double> inflection_points() const { return inflections_; }
  const ValueInterval& admissible() const { return admissible_; }
  AverageForm average_form() const {
    return closed_average_ ? AverageForm::closed_form : AverageForm::quadrature;
  }

  // Unchecked nonlinear average; callers guarantee no inflection point inside (u1, u2).
  double average(double u1, double u2) const;

  // Flux of the mirrored problem v(y) = u_sign * u(x_sign * y):
  // f~(v) = x_sign * u_sign * f(u_sign * v). Averages map as a~(v1, v2) = u_sign * a(u_sign v1, u_sign v2).
  FluxModel transformed(int x_sign, int u_sign) const;

  // True if some inflection point lies strictly between u1 and u2.
  bool straddles_inflection(double u1, double u2) const;
  bool is_inflection_value(double u) const;

  // The maximal interval of the value range on which f'' keeps the sign it has just
  // to the `side` (+1 right, -1 left) of u.
  ValueInterval convex_branch(double u, int side) const;

 private:
  FluxModel() = default;

  double boundary_form_average(double u1, double u2) const;

  std::string name_;
  Fn f_;
  Fn df_;
  Fn ddf_;
  std::vector<double> inflections_;
  ValueInterval admissible_;
  AverageFn closed_average_;
};

// f(u) with a range check; throws DomainError outside the admissible range.
double eval_flux(const FluxModel& model, double u);

// a(u1, u2); throws ConvexityError when an inflection point lies strictly inside.
double nonlinear_average(const FluxModel& model, double u1, double u2);

// Inflection points strictly inside the interval, ascending.
std::vector<double> inflection_points_in(const FluxModel& model, const ValueInterval& interval);

// Solve f'(u) = speed for u inside a branch where f' is monotone.
// Returns the nearest branch end when the speed is not attained.
double inverse_speed(const FluxModel& model, double speed, const ValueInterval& branch);

}  // namespace cpm
