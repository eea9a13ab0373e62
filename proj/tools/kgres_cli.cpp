// kgres: resonance classification, profile integration and spectral runs for
// quadratic Klein-Gordon systems with masses m2 = 2 m1.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kgres/cli/commands.hpp"
#include "kgres/cli/config.hpp"

namespace {

struct Common {
  std::string config;
  std::string out = "out";
  std::uint64_t seed = 0;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "INI file with [system], [classify], [ode], [pde], [sweep] sections");
  sub->add_option("--out", c.out, "output directory")->capture_default_str();
  sub->add_option("--seed", c.seed, "seed for randomized sampling")->capture_default_str();
  sub->add_option("--override", c.overrides, "section.key=value, applied after the file (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Klein-Gordon resonance toolkit"};
  app.require_subcommand(1);
  Common common;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"classify", "compute and classify the resonance coefficients"},
      {"ode", "integrate the profile system"},
      {"pde", "run the split-step spectral solver and fit decay rates"},
      {"sweep", "run a parameter grid and aggregate one CSV row per run"},
      {"report", "summarize the outputs found in --out"},
  };
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kgres::cli::kConfigError;
  }

  kgres::cli::RunConfig cfg;
  cfg.seed = common.seed;
  cfg.out_dir = common.out;
  try {
    if (!common.config.empty()) cfg.load_file(common.config);
    for (const auto& o : common.overrides) cfg.apply_override(o);
  } catch (const kgres::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kgres::cli::kConfigError;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  return kgres::cli::run_command(name, cfg, std::cout, std::cerr);
}
