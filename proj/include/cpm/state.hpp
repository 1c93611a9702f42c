#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "cpm/flux.hpp"

namespace cpm {

struct Particle {
  double x = 0.0;
  double u = 0.0;
  bool is_inflection = false;
  bool merged_origin = false;
};

// Position-ordered particles at time t. Values between neighbors never straddle an
// inflection point of the flux; an inflection particle sits at every crossing.
struct ParticleField {
  std::vector<Particle> particles;
  double t = 0.0;
  std::shared_ptr<const FluxModel> flux;
  double d_max = 0.0;
  double d_min = 0.0;

  std::size_t size() const { return particles.size(); }
  bool empty() const { return particles.empty(); }
  Particle& operator[](std::size_t i) { return particles[i]; }
  const Particle& operator[](std::size_t i) const { return particles[i]; }
};

// Initial data u0 on a position interval. Positions listed in `jumps` are sampled as a
// coincident pair holding the left and right limits of u0.
struct InitialCondition {
  std::function<double(double)> u0;
  ValueInterval domain{0.0, 1.0};
  std::vector<double> jumps;
  std::string description;

  double left_limit(double x) const;

  // exp(-x^2) cos(pi x)
  static InitialCondition exp_cos(ValueInterval domain);
  // u_left for x < x0, u_right otherwise
  static InitialCondition riemann(double u_left, double u_right, double x0, ValueInterval domain,
                                  bool declare_jump);
  // values[i] on [breaks[i-1], breaks[i]); values.size() == breaks.size() + 1
  static InitialCondition piecewise_constant(std::vector<double> breaks, std::vector<double> values,
                                             ValueInterval domain, bool declare_jumps);
  // periodic sawtooth with the given period and amplitude, ramps rise to the right
  static InitialCondition sawtooth(double period, double amplitude, ValueInterval domain);
};

ParticleField sample_initial(const InitialCondition& ic, std::size_t n,
                             std::shared_ptr<const FluxModel> flux, double d_max, double d_min);

// Inserts an inflection particle at the chord crossing of every neighbor pair whose
// values straddle an inflection point.
void insert_chord_inflections(ParticleField& field);

// Sets is_inflection from the flux's inflection points.
void refresh_inflection_flags(ParticleField& field);

struct Violation {
  enum class Kind { parameters, non_finite, domain, ordering, straddle, inflection_flag };
  Kind kind;
  std::size_t index = 0;  // left particle of the offending pair, where applicable
  std::string message;
};

const char* to_string(Violation::Kind kind);

std::vector<Violation> validate(const ParticleField& field);

// CSV rows t,x,u,is_inflection,merged_origin with a header row.
void write_snapshot_header(std::ostream& out);
void write_snapshot_rows(std::ostream& out, const ParticleField& field);

}  // namespace cpm
