#include <iostream>

#include <CLI11.hpp>

#include "fermitest/commands.hpp"

int main(int argc, char** argv) {
  namespace cli = fermitest::cli;
  CLI::App app{"Asymptotic distinguishability of quasi-free fermionic states"};
  cli::Options options;
  std::string out;
  std::uint64_t seed = 0;
  int threads = 0;

  app.add_option("command", options.command, "exponents | converge | oracle")
      ->required()
      ->check(CLI::IsMember({"exponents", "converge", "oracle"}));
  app.add_option("--config", options.config, "run configuration (JSON)")->required();
  auto* out_opt = app.add_option("--out", out, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kConfigError;
  }
  if (*out_opt) options.out = out;
  if (*seed_opt) options.seed = seed;
  if (*threads_opt) options.threads = threads;
  return cli::run(options, std::cerr);
}
