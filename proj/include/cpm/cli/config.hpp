#pragma once

#include <filesystem>
#include <string_view>

#include <json.hpp>

#include "cpm/oracle.hpp"
#include "cpm/solver.hpp"

namespace cpm::cli {

// Built-in defaults for every key a config file may set.
nlohmann::json default_config();

// Reads a JSON config and layers it over the defaults. Throws ConfigError.
nlohmann::json load_config(const std::filesystem::path& path);

// "a.b.c=value"; the value is read as JSON when it parses, as a string otherwise.
void apply_override(nlohmann::json& config, std::string_view assignment);

InitialCondition initial_condition_from(const nlohmann::json& spec);
RunConfig run_config_from(const nlohmann::json& config);
FvConfig fv_config_from(const nlohmann::json& spec, const ValueInterval& domain);

}  // namespace cpm::cli
