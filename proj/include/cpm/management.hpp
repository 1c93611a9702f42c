#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cpm/interpolation.hpp"
#include "cpm/state.hpp"

namespace cpm {

struct ManagementConfig {
  double d_max = 0.0;
  double d_min = 0.0;
  double newton_tol = 1e-12;
  int newton_max_iter = 50;
  bool entropy_fix_enabled = true;
  int max_fix_rounds = 8;
  // Colliding pairs that would meet within this time are merged as if coincident.
  double tie_time = 0.0;
};

struct MergeOutcome {
  double x23 = 0.0;
  double u23 = 0.0;
  std::vector<std::size_t> removed;
  bool tv_safe = true;
  bool entropy_safe = true;
  int iterations = 0;
};

struct Event {
  enum class Type { insert, merge, inflection_merge, fix_retry };
  Type type = Type::insert;
  double t = 0.0;
  std::vector<std::size_t> indices;
  std::vector<double> xs;
  std::vector<double> us;
  bool tv_safe = true;
  bool entropy_safe = true;
  int step = 0;  // inflection merge step, fix round
};

const char* to_string(Event::Type type);

struct EventLog {
  std::vector<Event> events;

  std::size_t count(Event::Type type) const;
  void write_jsonl(std::ostream& out) const;
};

struct ManagementHooks {
  // Called once at the start of every management pass.
  std::function<void(const ParticleField&)> before_pass;
  // Called with the field as it is right before a pair at index i is merged.
  std::function<void(const ParticleField&, std::size_t)> before_merge;
  std::function<void(const ParticleField&, const Event&)> after_event;
};

// Splits the gap (i, i+1) at its midpoint with a particle on the interpolant.
// Throws PreconditionError for colliding pairs.
void insert_between(ParticleField& field, std::size_t i, const ManagementConfig& cfg,
                    EventLog* log = nullptr);

// Value for the particle replacing the pair (i, i+1) so that the area between the
// outer neighbors is unchanged. Inside a cluster of coincident particles the cluster's end
// values are kept exactly. Does not modify the field.
MergeOutcome merge_value(const ParticleField& field, std::size_t i, const ManagementConfig& cfg);

// Sufficient condition for u23 to stay between u2 and u3. Missing neighbors drop out
// of the spans.
bool tvd_safety_check(const std::optional<Particle>& p1, const Particle& p2, const Particle& p3,
                      const std::optional<Particle>& p4, const FluxModel& flux);

// Monotone ordering u1 >= u23 >= u4 across a decreasing jump (u2 > u3), reversed for an
// increasing one. A missing neighbor passes its side.
bool entropy_check(std::optional<double> u1, double u23, std::optional<double> u4, double u2,
                   double u3);

// Merges the pair (i, i+1). When the entropy check fails, particles are inserted in the
// two flanking segments and the merge is retried, up to cfg.max_fix_rounds times.
void merge_with_fix(ParticleField& field, std::size_t i, const ManagementConfig& cfg,
                    EventLog* log = nullptr, const ManagementHooks* hooks = nullptr);

// Merge of a colliding pair where one member is an inflection particle. The inflection
// particle survives and exactly one particle is removed.
void inflection_merge(ParticleField& field, std::size_t i, const ManagementConfig& cfg,
                      EventLog* log = nullptr, const ManagementHooks* hooks = nullptr);

// Insertions into deviating gaps wider than d_max, then merges of colliding pairs
// closer than d_min (or meeting within cfg.tie_time).
void management_pass(ParticleField& field, const ManagementConfig& cfg, EventLog* log = nullptr,
                     const ManagementHooks* hooks = nullptr);

struct PostprocessResult {
  PiecewiseSolution solution;
  std::size_t reconstructed = 0;
  std::vector<std::string> warnings;
};

// Replaces each merged particle by a jump placed so that the local area is unchanged.
PostprocessResult postprocess_shocks(const ParticleField& field);

}  // namespace cpm
