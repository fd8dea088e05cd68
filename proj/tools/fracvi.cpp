#include <iostream>

#include <CLI11.hpp>

#include "fracvi/cli.hpp"
#include "fracvi/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Fractional gradient-constrained variational inequalities"};
  std::string command;
  fracvi::RunConfig config;
  std::uint64_t seed = 1;
  app.add_option("command", command,
                 "solve | solve-local | verify-estimates | study-sigma | study-epsilon | study-identity | cross-check")
      ->required();
  app.add_option("--problem", config.problem, "Problem file")->required();
  app.add_option("--out", config.out, "Output directory")->required();
  app.add_option("--set", config.overrides, "Override key=value (repeatable)")->take_all();
  auto* seed_opt = app.add_option("--seed", seed, "Random-field seed");
  app.add_flag("--test-corrupt-penalty", config.corrupt_penalty, "Negative control: add 1 to the penalty")
      ->group("");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : fracvi::kExitConfig;
  }
  if (*seed_opt) config.seed = seed;
  try {
    config.command = fracvi::parse_command(command);
  } catch (const fracvi::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return fracvi::kExitConfig;
  }
  return fracvi::run(config, std::cout);
}
