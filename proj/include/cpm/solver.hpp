#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cpm/diagnostics.hpp"
#include "cpm/errors.hpp"
#include "cpm/management.hpp"
#include "cpm/state.hpp"

namespace cpm {

struct RunConfig {
  std::string flux = "quartic";
  std::shared_ptr<const FluxModel> flux_model;  // takes precedence over the name when set
  InitialCondition ic;
  std::size_t n = 100;
  double d_max_factor = 1.9;  // times the initial spacing
  double d_min = 0.0;
  double t_end = 1.0;
  std::vector<double> output_times;
  bool entropy_fix = true;
  bool postprocess = false;
  std::uint64_t seed = 0;
  std::size_t max_events = 0;  // 0: no limit
  double newton_tol = 1e-12;
  int newton_max_iter = 50;
  int max_fix_rounds = 8;
};

struct RunResult {
  std::vector<ParticleField> snapshots;
  DiagnosticsSeries diagnostics;
  std::vector<PostprocessResult> postprocessed;
  EventLog events;
  ParticleField final_field;
  std::size_t collision_events = 0;
  bool completed = false;
  std::string stop_reason;
};

struct RunHooks {
  ManagementHooks management;
  // Called after every collision event has been handled.
  std::function<void(const ParticleField&)> after_event;
};

// Solver failure carrying the events logged up to the failure.
class RunError : public Error {
 public:
  RunError(const std::string& what, EventLog log) : Error(what), log_(std::move(log)) {}
  const EventLog& log() const { return log_; }

 private:
  EventLog log_;
};

std::shared_ptr<const FluxModel> resolve_flux(const RunConfig& cfg);
ManagementConfig management_config(const RunConfig& cfg, const ParticleField& field);

RunResult run(const RunConfig& cfg, const RunHooks* hooks = nullptr);

}  // namespace cpm
