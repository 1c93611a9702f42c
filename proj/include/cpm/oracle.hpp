#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "cpm/diagnostics.hpp"
#include "cpm/flux.hpp"
#include "cpm/state.hpp"

namespace cpm {

struct FvConfig {
  enum class NumericalFlux { godunov, local_lax_friedrichs };
  enum class Reconstruction { none, minmod };

  std::size_t cells = 1000;
  double cfl = 0.45;
  NumericalFlux numerical_flux = NumericalFlux::godunov;
  // minmod slopes are advanced with a two-stage SSP Runge-Kutta step (experimental)
  Reconstruction reconstruction = Reconstruction::none;
  ValueInterval domain{0.0, 1.0};
  std::optional<double> fixed_dt;
};

// Cell averages of the finite-volume solution at each requested time (ascending).
// Throws CflError if the step violates the stability limit or the maximum principle fails.
std::vector<GridFunction> fv_solve(const InitialCondition& ic, const FluxModel& flux,
                                   const FvConfig& cfg, const std::vector<double>& times);
GridFunction fv_solve(const InitialCondition& ic, const FluxModel& flux, const FvConfig& cfg,
                      double t_end);

// Godunov flux min/max of f between the two states.
double godunov_flux(const FluxModel& flux, double u_left, double u_right);

// Self-similar solution u(x/t) of a Riemann problem without an inflection point
// between the states. Throws UnsupportedCaseError otherwise.
double exact_riemann(const FluxModel& flux, double u_left, double u_right, double x_over_t);

}  // namespace cpm
