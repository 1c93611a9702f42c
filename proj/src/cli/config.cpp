#include "cpm/cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <string>

#include "cpm/errors.hpp"

namespace cpm::cli {

using nlohmann::json;

namespace {

ValueInterval interval_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2) {
    throw ConfigError(std::string(what) + " must be a two-element array");
  }
  const double lo = j[0].get<double>();
  const double hi = j[1].get<double>();
  if (!(lo < hi)) throw ConfigError(std::string(what) + " needs lo < hi");
  return {lo, hi};
}

InitialCondition tabulated(const json& spec) {
  auto xs = spec.at("x").get<std::vector<double>>();
  auto us = spec.at("u").get<std::vector<double>>();
  if (xs.size() != us.size() || xs.size() < 2) {
    throw ConfigError("tabulated initial data needs matching x and u arrays of length >= 2");
  }
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw ConfigError("tabulated x must be strictly increasing");
  }
  InitialCondition ic;
  ic.domain = {xs.front(), xs.back()};
  ic.description = "tabulated";
  ic.u0 = [xs, us](double x) {
    if (x <= xs.front()) return us.front();
    if (x >= xs.back()) return us.back();
    const auto j = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
    const double s = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return us[j - 1] + s * (us[j] - us[j - 1]);
  };
  return ic;
}

}  // namespace

json default_config() {
  return json{
      {"flux", "quartic"},
      {"initial", {{"type", "exp_cos"}, {"domain", {-3.0, 3.0}}}},
      {"n", 100},
      {"d_max_factor", 1.9},
      {"d_min", 0.0},
      {"t_end", 1.0},
      {"output_times", json::array()},
      {"entropy_fix", true},
      {"postprocess", false},
      {"seed", 0},
      {"max_events", 0},
      {"newton", {{"tol", 1e-12}, {"max_iter", 50}}},
      {"max_fix_rounds", 8},
      {"curve_points", 16},
      {"converge",
       {{"resolutions", json::array()},
        {"times", json::array()},
        {"reference", "particle"},
        {"reference_factor", 8},
        {"fv_cells", 80000},
        {"fv_cfl", 0.9}}},
      {"compare",
       {{"times", json::array()},
        {"fv", {{"cells", 60}, {"cfl", 0.45}, {"numerical_flux", "local_lax_friedrichs"},
                {"reconstruction", "minmod"}}},
        {"reference", {{"cells", 80000}, {"cfl", 0.9}, {"numerical_flux", "godunov"},
                       {"reconstruction", "none"}}}}},
  };
}

json load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  json user;
  try {
    in >> user;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!user.is_object()) throw ConfigError("config " + path.string() + " must hold a JSON object");
  json config = default_config();
  config.merge_patch(user);
  return config;
}

void apply_override(json& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override '" + std::string(assignment) + "' is not of the form key=value");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  std::string pointer = "/" + key;
  std::replace(pointer.begin(), pointer.end(), '.', '/');
  config[json::json_pointer(pointer)] = value;
}

InitialCondition initial_condition_from(const json& spec) {
  const std::string type = spec.at("type").get<std::string>();
  if (type == "tabulated") return tabulated(spec);
  const ValueInterval domain = interval_from(spec.at("domain"), "initial.domain");
  if (type == "exp_cos") return InitialCondition::exp_cos(domain);
  if (type == "riemann") {
    return InitialCondition::riemann(spec.at("u_left").get<double>(), spec.at("u_right").get<double>(),
                                     spec.value("x0", 0.0), domain, spec.value("declare_jump", true));
  }
  if (type == "piecewise_constant") {
    return InitialCondition::piecewise_constant(spec.at("breaks").get<std::vector<double>>(),
                                                spec.at("values").get<std::vector<double>>(), domain,
                                                spec.value("declare_jumps", true));
  }
  if (type == "sawtooth") {
    return InitialCondition::sawtooth(spec.at("period").get<double>(),
                                      spec.at("amplitude").get<double>(), domain);
  }
  throw ConfigError("unknown initial condition type '" + type + "'");
}

RunConfig run_config_from(const json& config) {
  try {
    RunConfig cfg;
    cfg.flux = config.at("flux").get<std::string>();
    cfg.flux_model = std::make_shared<const FluxModel>(FluxModel::by_name(cfg.flux));
    cfg.ic = initial_condition_from(config.at("initial"));
    const auto n = config.at("n").get<long long>();
    if (n < 2) throw ConfigError("n must be at least 2");
    cfg.n = static_cast<std::size_t>(n);
    cfg.d_max_factor = config.at("d_max_factor").get<double>();
    cfg.d_min = config.at("d_min").get<double>();
    cfg.t_end = config.at("t_end").get<double>();
    cfg.output_times = config.at("output_times").get<std::vector<double>>();
    cfg.entropy_fix = config.at("entropy_fix").get<bool>();
    cfg.postprocess = config.at("postprocess").get<bool>();
    cfg.seed = config.at("seed").get<std::uint64_t>();
    cfg.max_events = config.at("max_events").get<std::size_t>();
    cfg.newton_tol = config.at("newton").at("tol").get<double>();
    cfg.newton_max_iter = config.at("newton").at("max_iter").get<int>();
    cfg.max_fix_rounds = config.at("max_fix_rounds").get<int>();
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
}

FvConfig fv_config_from(const json& spec, const ValueInterval& domain) {
  try {
    FvConfig cfg;
    cfg.domain = domain;
    cfg.cells = spec.at("cells").get<std::size_t>();
    cfg.cfl = spec.value("cfl", 0.45);
    const std::string flux = spec.value("numerical_flux", "godunov");
    if (flux == "godunov") {
      cfg.numerical_flux = FvConfig::NumericalFlux::godunov;
    } else if (flux == "local_lax_friedrichs") {
      cfg.numerical_flux = FvConfig::NumericalFlux::local_lax_friedrichs;
    } else {
      throw ConfigError("unknown numerical flux '" + flux + "'");
    }
    const std::string rec = spec.value("reconstruction", "none");
    if (rec == "none") {
      cfg.reconstruction = FvConfig::Reconstruction::none;
    } else if (rec == "minmod") {
      cfg.reconstruction = FvConfig::Reconstruction::minmod;
    } else {
      throw ConfigError("unknown reconstruction '" + rec + "'");
    }
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid finite-volume config: ") + e.what());
  }
}

}  // namespace cpm::cli
