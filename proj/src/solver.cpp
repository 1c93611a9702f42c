#include "cpm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cpm/dynamics.hpp"

namespace cpm {

std::shared_ptr<const FluxModel> resolve_flux(const RunConfig& cfg) {
  if (cfg.flux_model) return cfg.flux_model;
  return std::make_shared<const FluxModel>(FluxModel::by_name(cfg.flux));
}

ManagementConfig management_config(const RunConfig& cfg, const ParticleField& field) {
  ManagementConfig m;
  m.d_max = field.d_max;
  m.d_min = field.d_min;
  m.newton_tol = cfg.newton_tol;
  m.newton_max_iter = cfg.newton_max_iter;
  m.entropy_fix_enabled = cfg.entropy_fix;
  m.max_fix_rounds = cfg.max_fix_rounds;
  return m;
}

namespace {

void check_config(const RunConfig& cfg) {
  if (cfg.n < 2) throw ConfigError("n must be at least 2");
  if (!(cfg.d_max_factor > 0.0)) throw ConfigError("d_max factor must be positive");
  if (!(cfg.t_end >= 0.0) || !std::isfinite(cfg.t_end)) throw ConfigError("t_end must be finite and >= 0");
  if (!std::is_sorted(cfg.output_times.begin(), cfg.output_times.end())) {
    throw ConfigError("output times must be ascending");
  }
  for (double t : cfg.output_times) {
    if (!(t >= 0.0 && t <= cfg.t_end)) throw ConfigError("output times must lie in [0, t_end]");
  }
  if (!(cfg.newton_tol > 0.0) || cfg.newton_max_iter < 1) throw ConfigError("invalid Newton settings");
}

}  // namespace

RunResult run(const RunConfig& cfg, const RunHooks* hooks) {
  check_config(cfg);
  const auto flux = resolve_flux(cfg);
  const double h = cfg.ic.domain.length() / static_cast<double>(cfg.n - 1);
  ParticleField field = sample_initial(cfg.ic, cfg.n, flux, cfg.d_max_factor * h, cfg.d_min);

  RunResult result;
  result.diagnostics.entropy_grid = default_entropy_grid(field);
  ManagementConfig at_output = management_config(cfg, field);
  const ManagementHooks* mhooks = hooks ? &hooks->management : nullptr;

  std::size_t next_output = 0;
  std::size_t zero_steps = 0;
  try {
    while (true) {
      while (next_output < cfg.output_times.size() && cfg.output_times[next_output] <= field.t) {
        management_pass(field, at_output, &result.events, mhooks);
        result.snapshots.push_back(field);
        record(field, result.diagnostics);
        if (cfg.postprocess) result.postprocessed.push_back(postprocess_shocks(field));
        ++next_output;
      }
      if (field.t >= cfg.t_end) {
        result.completed = true;
        result.stop_reason = "t_end";
        break;
      }
      if (cfg.max_events > 0 && result.collision_events >= cfg.max_events) {
        result.stop_reason = "max_events";
        break;
      }

      const EventHorizon horizon = next_event(field);
      const double stop = next_output < cfg.output_times.size()
                              ? std::min(cfg.output_times[next_output], cfg.t_end)
                              : cfg.t_end;
      const double to_stop = stop - field.t;
      if (horizon.dt_s < to_stop) {
        advance(field, horizon.dt_s);
        ManagementConfig at_event = at_output;
        at_event.tie_time = kEventTieTol * std::max(1.0, horizon.dt_s);
        const std::size_t before = field.size();
        management_pass(field, at_event, &result.events, mhooks);
        ++result.collision_events;
        if (hooks && hooks->after_event) hooks->after_event(field);
        // repeated zero-length steps that change nothing would never terminate
        zero_steps = (horizon.dt_s == 0.0 && field.size() >= before) ? zero_steps + 1 : 0;
        if (zero_steps > 100 + 10 * field.size()) {
          std::ostringstream msg;
          msg << "no progress at t=" << field.t << " after " << zero_steps << " zero-length events";
          throw RunError(msg.str(), result.events);
        }
      } else {
        advance(field, to_stop);
        field.t = stop;
      }
    }
  } catch (const RunError&) {
    throw;
  } catch (const Error& e) {
    std::ostringstream msg;
    msg << e.what() << " (t=" << field.t << ", " << result.events.events.size() << " events logged)";
    throw RunError(msg.str(), result.events);
  }
  result.diagnostics.count_events(result.events);
  result.final_field = field;
  return result;
}

}  // namespace cpm
