#include "cpm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cpm/errors.hpp"

namespace cpm {

std::optional<double> collision_time(const Particle& p1, const Particle& p2, const FluxModel& flux) {
  const double s1 = flux.df(p1.u);
  const double s2 = flux.df(p2.u);
  const double ds = s2 - s1;
  if (std::abs(ds) <= kParallelSpeedTol * std::max({1.0, std::abs(s1), std::abs(s2)})) {
    return std::nullopt;
  }
  if (ds > 0.0) return std::nullopt;  // deviating, including coincident pairs
  return std::max(p2.x - p1.x, 0.0) / -ds;
}

EventHorizon next_event(const ParticleField& field) {
  EventHorizon h;
  h.dt_s = std::numeric_limits<double>::infinity();
  const auto& ps = field.particles;
  if (ps.size() < 2) return h;
  std::vector<double> times(ps.size() - 1, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i + 1 < ps.size(); ++i) {
    if (auto dt = collision_time(ps[i], ps[i + 1], *field.flux)) {
      times[i] = *dt;
      h.dt_s = std::min(h.dt_s, times[i]);
    }
  }
  if (!std::isfinite(h.dt_s)) return h;
  const double tie = kEventTieTol * std::max(1.0, h.dt_s);
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] <= h.dt_s + tie) h.colliding_pairs.push_back(i);
  }
  return h;
}

void advance(ParticleField& field, double dt) {
  if (!(dt >= 0.0)) throw PreconditionError("advance needs dt >= 0");
  if (dt == 0.0) return;
  const EventHorizon h = next_event(field);
  if (dt > h.dt_s + kEventTieTol * std::max(1.0, h.dt_s)) {
    std::ostringstream msg;
    msg << "advance by " << dt << " overshoots the next collision at " << h.dt_s;
    throw OvershootError(msg.str());
  }
  const FluxModel& flux = *field.flux;
  for (auto& p : field.particles) p.x += flux.df(p.u) * dt;
  // a pair that collides exactly at dt may cross by a rounding error; keep the order
  for (std::size_t i = 1; i < field.particles.size(); ++i) {
    field.particles[i].x = std::max(field.particles[i].x, field.particles[i - 1].x);
  }
  field.t += dt;
}

}  // namespace cpm
