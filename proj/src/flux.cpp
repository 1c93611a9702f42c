#include "cpm/flux.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cpm/errors.hpp"
#include "cpm/numerics.hpp"

namespace cpm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// [f'] below this fraction of the speed scale is treated as numerically zero
constexpr double kAverageCancellation = 1e-13;
// largest rounding error of the boundary form accepted, as a fraction of |u2 - u1|
constexpr double kBoundaryFormAccuracy = 1e-14;

int sign_of(double v, double zero_tol) {
  if (v > zero_tol) return 1;
  if (v < -zero_tol) return -1;
  return 0;
}

ValueInterval validation_range(const ValueInterval& admissible) {
  const double lo = std::isfinite(admissible.lo) ? admissible.lo : -4.0;
  const double hi = std::isfinite(admissible.hi) ? admissible.hi : 4.0;
  return {std::min(lo, hi), std::max(lo, hi)};
}

void check_derivative(const FluxModel::Fn& fn, const FluxModel::Fn& deriv, const ValueInterval& range,
                      const ValueInterval& admissible, const std::string& what,
                      const std::string& name) {
  constexpr int kSamples = 41;
  for (int i = 0; i < kSamples; ++i) {
    const double u = range.lo + (range.hi - range.lo) * (i + 0.5) / kSamples;
    const double h = 1e-5 * std::max(1.0, std::abs(u));
    if (!admissible.contains(u - h) || !admissible.contains(u + h)) continue;
    const double fd = (fn(u + h) - fn(u - h)) / (2.0 * h);
    const double exact = deriv(u);
    const double scale = std::max({1.0, std::abs(exact), std::abs(fd)});
    if (!(std::abs(fd - exact) <= 1e-6 * scale)) {
      std::ostringstream msg;
      msg << "flux '" << name << "': " << what << " disagrees with finite differences at u=" << u
          << " (" << exact << " vs " << fd << ")";
      throw ConfigError(msg.str());
    }
  }
}

void check_inflections(const FluxModel::Definition& def, const ValueInterval& range) {
  for (double p : def.inflection_points) {
    if (!def.admissible.contains(p)) {
      throw ConfigError("flux '" + def.name + "': inflection point outside admissible range");
    }
    const double delta = 1e-4 * std::max(1e-3, range.length());
    const double left = def.ddf(std::max(p - delta, def.admissible.lo));
    const double right = def.ddf(std::min(p + delta, def.admissible.hi));
    if (!(left * right < 0.0)) {
      std::ostringstream msg;
      msg << "flux '" << def.name << "': declared inflection point " << p
          << " is not a sign change of f''";
      throw ConfigError(msg.str());
    }
  }

  constexpr int kGrid = 4000;
  double scale = 0.0;
  std::vector<double> values(kGrid + 1);
  for (int i = 0; i <= kGrid; ++i) {
    values[i] = def.ddf(range.lo + range.length() * i / kGrid);
    scale = std::max(scale, std::abs(values[i]));
  }
  const double zero_tol = 1e-12 * std::max(scale, 1.0);
  int last_sign = 0;
  double last_u = range.lo;
  for (int i = 0; i <= kGrid; ++i) {
    const double u = range.lo + range.length() * i / kGrid;
    const int s = sign_of(values[i], zero_tol);
    if (s == 0) continue;
    if (last_sign != 0 && s != last_sign) {
      const bool declared = std::any_of(def.inflection_points.begin(), def.inflection_points.end(),
                                        [&](double p) { return p >= last_u && p <= u; });
      if (!declared) {
        std::ostringstream msg;
        msg << "flux '" << def.name << "': f'' changes sign in [" << last_u << ", " << u
            << "] but no inflection point is declared there";
        throw ConfigError(msg.str());
      }
    }
    last_sign = s;
    last_u = u;
  }
}

}  // namespace

ValueInterval::ValueInterval(double lo_, double hi_) : lo(lo_), hi(hi_) {
  if (!(lo <= hi)) throw DomainError("value interval with lo > hi");
}

bool ValueInterval::bounded() const { return std::isfinite(lo) && std::isfinite(hi); }

ValueInterval ValueInterval::spanning(double a, double b) {
  return {std::min(a, b), std::max(a, b)};
}

FluxModel FluxModel::from_definition(Definition def) {
  if (!def.f || !def.df || !def.ddf) throw ConfigError("flux definition needs f, f' and f''");
  const ValueInterval range = validation_range(def.admissible);
  check_derivative(def.f, def.df, range, def.admissible, "f'", def.name);
  check_derivative(def.df, def.ddf, range, def.admissible, "f''", def.name);
  check_inflections(def, range);

  FluxModel model;
  model.name_ = std::move(def.name);
  model.f_ = std::move(def.f);
  model.df_ = std::move(def.df);
  model.ddf_ = std::move(def.ddf);
  model.inflections_ = std::move(def.inflection_points);
  std::sort(model.inflections_.begin(), model.inflections_.end());
  model.admissible_ = def.admissible;
  model.closed_average_ = std::move(def.closed_average);
  return model;
}

FluxModel FluxModel::burgers() {
  FluxModel m;
  m.name_ = "burgers";
  m.f_ = [](double u) { return 0.5 * u * u; };
  m.df_ = [](double u) { return u; };
  m.ddf_ = [](double) { return 1.0; };
  m.closed_average_ = [](double u1, double u2) { return 0.5 * (u1 + u2); };
  return m;
}

// f''(0) = 0 but f' = u^3 stays strictly increasing, so 0 is not an inflection point.
FluxModel FluxModel::quartic() {
  FluxModel m;
  m.name_ = "quartic";
  m.f_ = [](double u) { return 0.25 * u * u * u * u; };
  m.df_ = [](double u) { return u * u * u; };
  m.ddf_ = [](double u) { return 3.0 * u * u; };
  // (3/4) (u2^4 - u1^4) / (u2^3 - u1^3) with the common factor (u2 - u1) cancelled
  m.closed_average_ = [](double u1, double u2) {
    const double den = u1 * u1 + u1 * u2 + u2 * u2;
    if (den == 0.0) return u1;
    return 0.75 * (u1 + u2) * (u1 * u1 + u2 * u2) / den;
  };
  return m;
}

FluxModel FluxModel::buckley_leverett() {
  FluxModel m;
  m.name_ = "buckley_leverett";
  // u^2 / (u^2 + (1-u)^2 / 2) = 2u^2 / q with q = 3u^2 - 2u + 1
  m.f_ = [](double u) { return 2.0 * u * u / (3.0 * u * u - 2.0 * u + 1.0); };
  m.df_ = [](double u) {
    const double q = 3.0 * u * u - 2.0 * u + 1.0;
    return 4.0 * u * (1.0 - u) / (q * q);
  };
  m.ddf_ = [](double u) {
    const double q = 3.0 * u * u - 2.0 * u + 1.0;
    return 4.0 * (6.0 * u * u * u - 9.0 * u * u + 1.0) / (q * q * q);
  };
  m.admissible_ = {0.0, 1.0};
  const auto root = numerics::bracketed_root(m.ddf_, 0.1, 0.9);
  m.inflections_ = {*root};
  return m;
}

FluxModel FluxModel::linear(double speed) {
  FluxModel m;
  m.name_ = "linear";
  m.f_ = [speed](double u) { return speed * u; };
  m.df_ = [speed](double) { return speed; };
  m.ddf_ = [](double) { return 0.0; };
  m.closed_average_ = [](double u1, double u2) { return 0.5 * (u1 + u2); };
  return m;
}

FluxModel FluxModel::by_name(std::string_view name) {
  if (name == "burgers") return burgers();
  if (name == "quartic") return quartic();
  if (name == "buckley_leverett") return buckley_leverett();
  if (name == "linear") return linear(1.0);
  throw ConfigError("unknown flux '" + std::string(name) + "'");
}

double FluxModel::boundary_form_average(double u1, double u2) const {
  const double s1 = df_(u1);
  const double s2 = df_(u2);
  const double f1 = f_(u1);
  const double f2 = f_(u2);
  const double jump = s2 - s1;
  const double width = std::abs(u2 - u1);
  const double scale = std::max({std::abs(s1), std::abs(s2), 1.0});
  if (std::abs(jump) > kAverageCancellation * scale) {
    // a = u1 + (s2 (u2 - u1) - [f]) / [f'], i.e. the boundary form shifted by u1.
    // The numerator cancels as u2 -> u1; past the point where its rounding error
    // would show in a, the quadrature form is the more accurate one.
    const double rounding = 4.0 * std::numeric_limits<double>::epsilon() *
                            (std::abs(f1) + std::abs(f2) + std::abs(s2) * width) / std::abs(jump);
    if (rounding <= kBoundaryFormAccuracy * width) return u1 + (s2 * (u2 - u1) - (f2 - f1)) / jump;
  }
  const double den = numerics::integrate(ddf_, u1, u2);
  if (den == 0.0 || !std::isfinite(den)) return 0.5 * (u1 + u2);
  const double num = numerics::integrate([&](double u) { return ddf_(u) * (u - u1); }, u1, u2);
  return u1 + num / den;
}

double FluxModel::average(double u1, double u2) const {
  if (u1 == u2) return u1;
  const double a = closed_average_ ? closed_average_(u1, u2) : boundary_form_average(u1, u2);
  return std::clamp(a, std::min(u1, u2), std::max(u1, u2));
}

FluxModel FluxModel::transformed(int x_sign, int u_sign) const {
  const double sx = x_sign < 0 ? -1.0 : 1.0;
  const double su = u_sign < 0 ? -1.0 : 1.0;
  FluxModel m;
  m.name_ = name_;
  m.f_ = [f = f_, sx, su](double v) { return sx * su * f(su * v); };
  m.df_ = [df = df_, sx, su](double v) { return sx * df(su * v); };
  m.ddf_ = [ddf = ddf_, sx, su](double v) { return sx * su * ddf(su * v); };
  for (double p : inflections_) m.inflections_.push_back(su * p);
  std::sort(m.inflections_.begin(), m.inflections_.end());
  m.admissible_ = ValueInterval::spanning(su * admissible_.lo, su * admissible_.hi);
  if (closed_average_) {
    m.closed_average_ = [avg = closed_average_, su](double v1, double v2) {
      return su * avg(su * v1, su * v2);
    };
  }
  return m;
}

bool FluxModel::straddles_inflection(double u1, double u2) const {
  const double lo = std::min(u1, u2);
  const double hi = std::max(u1, u2);
  return std::any_of(inflections_.begin(), inflections_.end(),
                     [&](double p) { return p > lo && p < hi; });
}

bool FluxModel::is_inflection_value(double u) const {
  return std::find(inflections_.begin(), inflections_.end(), u) != inflections_.end();
}

ValueInterval FluxModel::convex_branch(double u, int side) const {
  double lo = admissible_.lo;
  double hi = admissible_.hi;
  for (double p : inflections_) {
    const bool below = side > 0 ? p <= u : p < u;
    if (below) {
      lo = std::max(lo, p);
    } else {
      hi = std::min(hi, p);
    }
  }
  return {lo, hi};
}

double eval_flux(const FluxModel& model, double u) {
  if (!model.admissible().contains(u)) {
    std::ostringstream msg;
    msg << "u=" << u << " outside the admissible range of flux '" << model.name() << "'";
    throw DomainError(msg.str());
  }
  return model.f(u);
}

double nonlinear_average(const FluxModel& model, double u1, double u2) {
  if (!model.admissible().contains(u1) || !model.admissible().contains(u2)) {
    throw DomainError("nonlinear average outside the admissible range of flux '" + model.name() +
                      "'");
  }
  if (model.straddles_inflection(u1, u2)) {
    std::ostringstream msg;
    msg << "flux '" << model.name() << "' is not convex or concave on [" << std::min(u1, u2) << ", "
        << std::max(u1, u2) << "]";
    throw ConvexityError(msg.str());
  }
  return model.average(u1, u2);
}

std::vector<double> inflection_points_in(const FluxModel& model, const ValueInterval& interval) {
  std::vector<double> out;
  for (double p : model.inflection_points()) {
    if (interval.strictly_contains(p)) out.push_back(p);
  }
  return out;
}

double inverse_speed(const FluxModel& model, double speed, const ValueInterval& branch) {
  double lo = branch.lo;
  double hi = branch.hi;
  const double anchor = std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);
  const auto reaches = [&](double a, double b) {
    const double sa = model.df(a);
    const double sb = model.df(b);
    return (sa - speed) * (sb - speed) <= 0.0;
  };
  if (!std::isfinite(lo)) lo = std::isfinite(hi) ? hi - 1.0 : anchor - 1.0;
  if (!std::isfinite(hi)) hi = std::max(lo, anchor) + 1.0;
  for (int i = 0; i < 64 && !reaches(lo, hi); ++i) {
    const double width = hi - lo;
    if (!std::isfinite(branch.lo)) lo -= width;
    if (!std::isfinite(branch.hi)) hi += width;
    if (std::isfinite(branch.lo) && std::isfinite(branch.hi)) break;
  }
  const double slo = model.df(lo);
  const double shi = model.df(hi);
  if (!reaches(lo, hi)) return std::abs(slo - speed) < std::abs(shi - speed) ? lo : hi;
  const auto root = numerics::safeguarded_newton(
      [&](double u) { return model.df(u) - speed; }, [&](double u) { return model.ddf(u); }, lo, hi,
      0.5 * (lo + hi), 1e-14, 200);
  return root ? root->root : 0.5 * (lo + hi);
}

}  // namespace cpm
