#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cpm/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Particle solver for 1D scalar conservation laws"};
  app.require_subcommand(1);

  cpm::cli::CommandOptions opts;
  auto add = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", opts.config, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--out", opts.out_dir, "output directory");
    sub->add_option("-s,--set", opts.overrides, "override a config key, e.g. --set n=200")
        ->allow_extra_args(false);
    return sub;
  };
  CLI::App* run = add("run", "integrate and write snapshots, diagnostics and the event log");
  CLI::App* converge = add("converge", "L1 error against a reference over several resolutions");
  CLI::App* compare = add("compare", "particle method against a finite-volume scheme");
  CLI::App* validate = add("validate", "run with invariant auditing and write a report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cpm::cli::kConfigError;
  }

  if (run->parsed()) return cpm::cli::cmd_run(opts, std::cerr);
  if (converge->parsed()) return cpm::cli::cmd_converge(opts, std::cerr);
  if (compare->parsed()) return cpm::cli::cmd_compare(opts, std::cerr);
  if (validate->parsed()) return cpm::cli::cmd_validate(opts, std::cerr);
  return cpm::cli::kConfigError;
}
