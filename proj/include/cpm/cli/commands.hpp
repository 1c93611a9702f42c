#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace cpm::cli {

enum ExitCode : int { kSuccess = 0, kFailure = 1, kConfigError = 2 };

struct CommandOptions {
  std::filesystem::path config;
  std::filesystem::path out_dir = ".";
  std::vector<std::string> overrides;
};

// Each command reports progress on `log` and returns an ExitCode.
int cmd_run(const CommandOptions& opts, std::ostream& log);
int cmd_converge(const CommandOptions& opts, std::ostream& log);
int cmd_compare(const CommandOptions& opts, std::ostream& log);
int cmd_validate(const CommandOptions& opts, std::ostream& log);

}  // namespace cpm::cli
