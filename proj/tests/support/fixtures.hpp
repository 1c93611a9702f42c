#pragma once

#include <initializer_list>
#include <memory>
#include <utility>

#include "cpm/flux.hpp"
#include "cpm/state.hpp"

namespace fixture {

inline std::shared_ptr<const cpm::FluxModel> burgers() {
  static const auto f = std::make_shared<const cpm::FluxModel>(cpm::FluxModel::burgers());
  return f;
}

inline std::shared_ptr<const cpm::FluxModel> quartic() {
  static const auto f = std::make_shared<const cpm::FluxModel>(cpm::FluxModel::quartic());
  return f;
}

inline std::shared_ptr<const cpm::FluxModel> buckley_leverett() {
  static const auto f = std::make_shared<const cpm::FluxModel>(cpm::FluxModel::buckley_leverett());
  return f;
}

inline cpm::ParticleField field(std::shared_ptr<const cpm::FluxModel> flux,
                                std::initializer_list<std::pair<double, double>> xu,
                                double d_max = 10.0, double d_min = 0.0) {
  cpm::ParticleField f;
  f.flux = std::move(flux);
  f.d_max = d_max;
  f.d_min = d_min;
  for (const auto& [x, u] : xu) f.particles.push_back({x, u, false, false});
  cpm::refresh_inflection_flags(f);
  return f;
}

}  // namespace fixture
