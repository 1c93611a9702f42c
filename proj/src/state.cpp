#include "cpm/state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "cpm/errors.hpp"
#include "cpm/io.hpp"

namespace cpm {

double InitialCondition::left_limit(double x) const {
  return u0(std::nextafter(x, -std::numeric_limits<double>::infinity()));
}

InitialCondition InitialCondition::exp_cos(ValueInterval domain) {
  InitialCondition ic;
  ic.u0 = [](double x) { return std::exp(-x * x) * std::cos(std::numbers::pi * x); };
  ic.domain = domain;
  ic.description = "exp(-x^2) cos(pi x)";
  return ic;
}

InitialCondition InitialCondition::riemann(double u_left, double u_right, double x0,
                                           ValueInterval domain, bool declare_jump) {
  auto ic = piecewise_constant({x0}, {u_left, u_right}, domain, declare_jump);
  ic.description = "riemann";
  return ic;
}

InitialCondition InitialCondition::piecewise_constant(std::vector<double> breaks,
                                                      std::vector<double> values,
                                                      ValueInterval domain, bool declare_jumps) {
  if (values.size() != breaks.size() + 1) {
    throw ConfigError("piecewise constant data needs one more value than breakpoints");
  }
  if (!std::is_sorted(breaks.begin(), breaks.end())) {
    throw ConfigError("piecewise constant breakpoints must be ascending");
  }
  InitialCondition ic;
  ic.domain = domain;
  ic.description = "piecewise_constant";
  if (declare_jumps) {
    for (double b : breaks) {
      if (domain.strictly_contains(b)) ic.jumps.push_back(b);
    }
  }
  ic.u0 = [breaks = std::move(breaks), values = std::move(values)](double x) {
    const auto k = std::upper_bound(breaks.begin(), breaks.end(), x) - breaks.begin();
    return values[static_cast<std::size_t>(k)];
  };
  return ic;
}

InitialCondition InitialCondition::sawtooth(double period, double amplitude, ValueInterval domain) {
  if (!(period > 0.0)) throw ConfigError("sawtooth period must be positive");
  InitialCondition ic;
  ic.domain = domain;
  ic.description = "sawtooth";
  ic.u0 = [period, amplitude](double x) {
    const double phase = x / period - std::floor(x / period);
    return amplitude * (phase - 0.5);
  };
  return ic;
}

void refresh_inflection_flags(ParticleField& field) {
  for (auto& p : field.particles) p.is_inflection = field.flux->is_inflection_value(p.u);
}

void insert_chord_inflections(ParticleField& field) {
  const FluxModel& flux = *field.flux;
  std::vector<Particle> out;
  out.reserve(field.particles.size());
  for (std::size_t i = 0; i < field.particles.size(); ++i) {
    const Particle& p = field.particles[i];
    out.push_back(p);
    if (i + 1 == field.particles.size()) break;
    const Particle& q = field.particles[i + 1];
    auto crossings = inflection_points_in(flux, ValueInterval::spanning(p.u, q.u));
    if (q.u < p.u) std::reverse(crossings.begin(), crossings.end());
    for (double us : crossings) {
      const double s = (us - p.u) / (q.u - p.u);
      const double x = std::clamp(p.x + s * (q.x - p.x), p.x, q.x);
      out.push_back(Particle{x, us, true, false});
    }
  }
  field.particles = std::move(out);
}

ParticleField sample_initial(const InitialCondition& ic, std::size_t n,
                             std::shared_ptr<const FluxModel> flux, double d_max, double d_min) {
  if (n < 2) throw ConfigError("at least two particles are required");
  if (!flux) throw ConfigError("no flux model given");
  if (!ic.u0) throw ConfigError("initial condition has no u0");
  if (!ic.domain.bounded() || !(ic.domain.length() > 0.0)) {
    throw ConfigError("initial condition needs a bounded domain of positive length");
  }
  if (!(d_max > 0.0) || !(d_min >= 0.0) || !(d_min < d_max)) {
    throw ConfigError("need 0 <= d_min < d_max");
  }

  ParticleField field;
  field.flux = flux;
  field.d_max = d_max;
  field.d_min = d_min;
  field.t = 0.0;

  std::vector<double> jumps = ic.jumps;
  std::sort(jumps.begin(), jumps.end());
  jumps.erase(std::unique(jumps.begin(), jumps.end()), jumps.end());

  const double lo = ic.domain.lo;
  const double hi = ic.domain.hi;
  std::size_t next_jump = 0;
  auto emit_jumps_before = [&](double x) {
    while (next_jump < jumps.size() && jumps[next_jump] <= x) {
      const double xj = jumps[next_jump++];
      field.particles.push_back(Particle{xj, ic.left_limit(xj)});
      field.particles.push_back(Particle{xj, ic.u0(xj)});
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    const double x = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    const bool on_jump = std::binary_search(jumps.begin(), jumps.end(), x);
    emit_jumps_before(x);
    if (!on_jump) field.particles.push_back(Particle{x, ic.u0(x)});
  }
  emit_jumps_before(std::numeric_limits<double>::infinity());

  for (const auto& p : field.particles) {
    if (!std::isfinite(p.u) || !flux->admissible().contains(p.u)) {
      std::ostringstream msg;
      msg << "initial value u=" << p.u << " at x=" << p.x << " is outside the admissible range of '"
          << flux->name() << "'";
      throw ConfigError(msg.str());
    }
  }
  insert_chord_inflections(field);
  refresh_inflection_flags(field);
  return field;
}

const char* to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::parameters: return "parameters";
    case Violation::Kind::non_finite: return "non_finite";
    case Violation::Kind::domain: return "domain";
    case Violation::Kind::ordering: return "ordering";
    case Violation::Kind::straddle: return "straddle";
    case Violation::Kind::inflection_flag: return "inflection_flag";
  }
  return "unknown";
}

std::vector<Violation> validate(const ParticleField& field) {
  std::vector<Violation> out;
  auto report = [&](Violation::Kind kind, std::size_t i, const std::string& msg) {
    out.push_back(Violation{kind, i, msg});
  };
  if (!field.flux) {
    report(Violation::Kind::parameters, 0, "field has no flux model");
    return out;
  }
  if (!(field.d_max > 0.0) || !(field.d_min >= 0.0) || !(field.d_min < field.d_max)) {
    report(Violation::Kind::parameters, 0, "need 0 <= d_min < d_max");
  }
  const FluxModel& flux = *field.flux;
  const auto& ps = field.particles;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (!std::isfinite(ps[i].x) || !std::isfinite(ps[i].u)) {
      report(Violation::Kind::non_finite, i, "non-finite position or value");
      continue;
    }
    if (!flux.admissible().contains(ps[i].u)) {
      report(Violation::Kind::domain, i, "value outside the admissible range");
    }
    if (ps[i].is_inflection != flux.is_inflection_value(ps[i].u)) {
      report(Violation::Kind::inflection_flag, i, "is_inflection flag does not match the value");
    }
    if (i + 1 == ps.size()) continue;
    if (ps[i + 1].x < ps[i].x) {
      std::ostringstream msg;
      msg << "x[" << i + 1 << "]=" << ps[i + 1].x << " < x[" << i << "]=" << ps[i].x;
      report(Violation::Kind::ordering, i, msg.str());
    }
    if (flux.straddles_inflection(ps[i].u, ps[i + 1].u)) {
      std::ostringstream msg;
      msg << "values " << ps[i].u << " and " << ps[i + 1].u
          << " straddle an inflection point without an inflection particle";
      report(Violation::Kind::straddle, i, msg.str());
    }
  }
  return out;
}

void write_snapshot_header(std::ostream& out) { out << "t,x,u,is_inflection,merged_origin\n"; }

void write_snapshot_rows(std::ostream& out, const ParticleField& field) {
  const std::string t = io::format_double(field.t);
  for (const auto& p : field.particles) {
    out << t << ',' << io::format_double(p.x) << ',' << io::format_double(p.u) << ','
        << (p.is_inflection ? 1 : 0) << ',' << (p.merged_origin ? 1 : 0) << '\n';
  }
}

}  // namespace cpm
