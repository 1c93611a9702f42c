#include "cpm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cpm/errors.hpp"
#include "cpm/numerics.hpp"

namespace cpm {

namespace {

constexpr int kScan = 4000;

// Zeros of f' in (lo, hi), located from sign changes on a fine scan.
std::vector<double> stationary_points(const FluxModel& f, double lo, double hi) {
  std::vector<double> out;
  if (!(hi > lo)) return out;
  double prev_u = lo;
  double prev = f.df(lo);
  for (int k = 1; k <= kScan; ++k) {
    const double u = lo + (hi - lo) * k / kScan;
    const double s = f.df(u);
    if (s == 0.0 && k < kScan) {
      out.push_back(u);
    } else if ((prev < 0.0 && s > 0.0) || (prev > 0.0 && s < 0.0)) {
      if (auto r = numerics::bracketed_root([&](double v) { return f.df(v); }, prev_u, u)) {
        out.push_back(*r);
      }
    }
    prev = s;
    prev_u = u;
  }
  return out;
}

double max_speed(const FluxModel& f, double lo, double hi) {
  double m = std::max(std::abs(f.df(lo)), std::abs(f.df(hi)));
  for (int k = 1; k < kScan; ++k) m = std::max(m, std::abs(f.df(lo + (hi - lo) * k / kScan)));
  for (double p : f.inflection_points()) {
    if (p > lo && p < hi) m = std::max(m, std::abs(f.df(p)));
  }
  return m;
}

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

std::vector<double> project(const InitialCondition& ic, double a, double dx, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double l = a + dx * static_cast<double>(i);
    const double r = a + dx * static_cast<double>(i + 1);
    double p = l;
    double sum = 0.0;
    for (double j : ic.jumps) {
      if (j > p && j < r) {
        sum += numerics::integrate(ic.u0, p, j);
        p = j;
      }
    }
    sum += numerics::integrate(ic.u0, p, r);
    out[i] = sum / dx;
  }
  return out;
}

class Scheme {
 public:
  Scheme(const FluxModel& f, const FvConfig& cfg, double lo, double hi)
      : f_(f), cfg_(cfg), stationary_(stationary_points(f, lo, hi)) {
    for (double s : stationary_) f_stationary_.push_back(f.f(s));
    monotone_ = stationary_.empty();
    increasing_ = f.df(0.5 * (lo + hi)) >= 0.0;
  }

  // du/dt = -(F[i+1] - F[i]) / dx with outflow ghost cells
  void rate(const std::vector<double>& u, double dx, std::vector<double>& out) {
    const std::size_t n = u.size();
    fu_.resize(n);
    for (std::size_t i = 0; i < n; ++i) fu_[i] = f_.f(u[i]);
    flux_.resize(n + 1);
    flux_[0] = fu_[0];
    flux_[n] = fu_[n - 1];
    const bool reconstruct = cfg_.reconstruction == FvConfig::Reconstruction::minmod;
    if (reconstruct) {
      slope_.assign(n, 0.0);
      for (std::size_t i = 1; i + 1 < n; ++i) slope_[i] = minmod(u[i] - u[i - 1], u[i + 1] - u[i]);
    }
    for (std::size_t k = 1; k < n; ++k) {
      if (!reconstruct) {
        flux_[k] = interface(u[k - 1], u[k], fu_[k - 1], fu_[k]);
      } else {
        const double ul = u[k - 1] + 0.5 * slope_[k - 1];
        const double ur = u[k] - 0.5 * slope_[k];
        flux_[k] = interface(ul, ur, f_.f(ul), f_.f(ur));
      }
    }
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = -(flux_[i + 1] - flux_[i]) / dx;
  }

 private:
  double interface(double ul, double ur, double ful, double fur) const {
    if (cfg_.numerical_flux == FvConfig::NumericalFlux::local_lax_friedrichs) {
      double alpha = std::max(std::abs(f_.df(ul)), std::abs(f_.df(ur)));
      for (double p : f_.inflection_points()) {
        if (p > std::min(ul, ur) && p < std::max(ul, ur)) alpha = std::max(alpha, std::abs(f_.df(p)));
      }
      return 0.5 * (ful + fur) - 0.5 * alpha * (ur - ul);
    }
    if (monotone_) return increasing_ ? ful : fur;
    if (ul == ur) return ful;
    if (ul < ur) {
      double m = std::min(ful, fur);
      for (std::size_t s = 0; s < stationary_.size(); ++s) {
        if (stationary_[s] > ul && stationary_[s] < ur) m = std::min(m, f_stationary_[s]);
      }
      return m;
    }
    double m = std::max(ful, fur);
    for (std::size_t s = 0; s < stationary_.size(); ++s) {
      if (stationary_[s] > ur && stationary_[s] < ul) m = std::max(m, f_stationary_[s]);
    }
    return m;
  }

  const FluxModel& f_;
  const FvConfig& cfg_;
  std::vector<double> stationary_;
  std::vector<double> f_stationary_;
  bool monotone_ = false;
  bool increasing_ = true;
  std::vector<double> fu_;
  std::vector<double> flux_;
  std::vector<double> slope_;
};

}  // namespace

double godunov_flux(const FluxModel& flux, double u_left, double u_right) {
  const double lo = std::min(u_left, u_right);
  const double hi = std::max(u_left, u_right);
  double best = u_left <= u_right ? std::min(flux.f(lo), flux.f(hi)) : std::max(flux.f(lo), flux.f(hi));
  for (double s : stationary_points(flux, lo, hi)) {
    best = u_left <= u_right ? std::min(best, flux.f(s)) : std::max(best, flux.f(s));
  }
  return best;
}

std::vector<GridFunction> fv_solve(const InitialCondition& ic, const FluxModel& flux,
                                   const FvConfig& cfg, const std::vector<double>& times) {
  if (cfg.cells < 10) throw ConfigError("finite-volume grid needs at least 10 cells");
  if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
  if (!cfg.domain.bounded() || !(cfg.domain.length() > 0.0)) {
    throw ConfigError("finite-volume domain must be bounded");
  }
  if (!std::is_sorted(times.begin(), times.end()) || (!times.empty() && times.front() < 0.0)) {
    throw ConfigError("output times must be nonnegative and ascending");
  }

  const std::size_t n = cfg.cells;
  const double dx = cfg.domain.length() / static_cast<double>(n);
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = cfg.domain.lo + dx * (static_cast<double>(i) + 0.5);
  std::vector<double> u = project(ic, cfg.domain.lo, dx, n);

  const auto [min_it, max_it] = std::minmax_element(u.begin(), u.end());
  const double umin = *min_it;
  const double umax = *max_it;
  const double alpha = max_speed(flux, umin, umax);
  double dt_base = alpha > 0.0 ? cfg.cfl * dx / alpha : std::numeric_limits<double>::infinity();
  if (cfg.fixed_dt) {
    if (!(*cfg.fixed_dt > 0.0)) throw ConfigError("fixed_dt must be positive");
    if (*cfg.fixed_dt * alpha / dx > 1.0 + 1e-12) {
      std::ostringstream msg;
      msg << "fixed dt=" << *cfg.fixed_dt << " gives Courant number " << *cfg.fixed_dt * alpha / dx
          << " > 1";
      throw CflError(msg.str());
    }
    dt_base = *cfg.fixed_dt;
  }
  const double slack = 1e-12 * (1.0 + (umax - umin));

  Scheme scheme(flux, cfg, umin, umax);
  std::vector<double> k1;
  std::vector<double> k2;
  std::vector<double> stage;
  std::vector<GridFunction> out;
  double t = 0.0;
  for (double target : times) {
    while (target - t > 1e-14 * std::max(1.0, target)) {
      const double dt = std::min(dt_base, target - t);
      scheme.rate(u, dx, k1);
      if (cfg.reconstruction == FvConfig::Reconstruction::none) {
        for (std::size_t i = 0; i < n; ++i) u[i] += dt * k1[i];
      } else {
        stage.resize(n);
        for (std::size_t i = 0; i < n; ++i) stage[i] = u[i] + dt * k1[i];
        scheme.rate(stage, dx, k2);
        for (std::size_t i = 0; i < n; ++i) u[i] = 0.5 * u[i] + 0.5 * (stage[i] + dt * k2[i]);
      }
      t = dt == target - t ? target : t + dt;
      const auto [lo_it, hi_it] = std::minmax_element(u.begin(), u.end());
      if (*lo_it < umin - slack || *hi_it > umax + slack || !std::isfinite(*lo_it + *hi_it)) {
        std::ostringstream msg;
        msg << "finite-volume solution left the initial range [" << umin << ", " << umax
            << "] at t=" << t << "; the step is unstable";
        throw CflError(msg.str());
      }
    }
    out.emplace_back(xs, u, GridFunction::Convention::cell_average);
  }
  return out;
}

GridFunction fv_solve(const InitialCondition& ic, const FluxModel& flux, const FvConfig& cfg,
                      double t_end) {
  return fv_solve(ic, flux, cfg, std::vector<double>{t_end}).front();
}

double exact_riemann(const FluxModel& flux, double u_left, double u_right, double x_over_t) {
  if (u_left == u_right) return u_left;
  if (flux.straddles_inflection(u_left, u_right)) {
    throw UnsupportedCaseError("exact_riemann: an inflection point lies between the states");
  }
  const double sl = flux.df(u_left);
  const double sr = flux.df(u_right);
  if (sl > sr) {
    const double s = (flux.f(u_left) - flux.f(u_right)) / (u_left - u_right);
    return x_over_t < s ? u_left : u_right;
  }
  if (x_over_t <= sl) return u_left;
  if (x_over_t >= sr) return u_right;
  const auto root = numerics::bracketed_root([&](double u) { return flux.df(u) - x_over_t; },
                                             std::min(u_left, u_right), std::max(u_left, u_right));
  return root ? *root : u_left;
}

}  // namespace cpm
