#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sharpfront/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"sharp traveling fronts for doubly nonlinear diffusion with delayed birth"};
  app.require_subcommand(0, 1);

  std::string config;
  sharpfront::cli::RunContext ctx;
  app.add_option("--config", config, "configuration file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", ctx.out_dir, "output directory")->capture_default_str();
  app.add_option("--jobs", ctx.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_flag("--verbose", ctx.verbose, "progress on stderr");
  app.fallthrough();

  for (const char* name : {"speed", "profile", "variational", "regularity", "simulate", "sweep", "validate"})
    app.add_subcommand(name, std::string("run the ") + name + " command");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : sharpfront::cli::ConfigFailure;
  }
  std::string command;
  if (!app.get_subcommands().empty()) command = app.get_subcommands().front()->get_name();
  return sharpfront::cli::run_file(config, ctx, command);
}
