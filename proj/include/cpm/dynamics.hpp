#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "cpm/state.hpp"

namespace cpm {

inline constexpr double kParallelSpeedTol = 1e-14;
inline constexpr double kEventTieTol = 1e-12;

struct EventHorizon {
  double dt_s = 0.0;                          // +inf when no pair collides
  std::vector<std::size_t> colliding_pairs;   // left indices of pairs reaching dt_s
};

// Time until p2 catches p1 (or p1 catches p2); nullopt for parallel or deviating pairs.
std::optional<double> collision_time(const Particle& p1, const Particle& p2, const FluxModel& flux);

EventHorizon next_event(const ParticleField& field);

// Moves every particle along its characteristic. Throws OvershootError when dt
// exceeds the next collision time beyond the tie tolerance.
void advance(ParticleField& field, double dt);

}  // namespace cpm
