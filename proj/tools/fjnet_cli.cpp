#include <iostream>

#include <CLI11.hpp>

#include "fjnet/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Reduced-order diffusion on tubes and branched tubular networks"};
  app.require_subcommand(1);

  std::string config;
  fjnet::CommandOptions opt;
  std::string out;

  struct Entry {
    const char* name;
    const char* help;
    fjnet::Command fn;
  };
  const Entry entries[] = {
      {"simulate", "run one model and write trajectory.csv and manifest.json", fjnet::cmd_simulate},
      {"compare", "L1 error of each model against the analytic solution", fjnet::cmd_compare},
      {"convergence", "errors and slopes over refinement levels", fjnet::cmd_convergence},
      {"stability-check", "pre-flight stability report; exits 1 on failure", fjnet::cmd_stability},
  };
  fjnet::Command chosen = nullptr;
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("--config", config, "run configuration (INI)")->required();
    sub->add_flag("--force", opt.force, "run even when the stability pre-flight fails");
    sub->add_option("--out", out, "output directory (overrides [output] dir)");
    sub->callback([&chosen, fn = e.fn] { chosen = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fjnet::kExitConfig;
  }
  opt.out = out;
  return fjnet::run_command(chosen, config, opt, std::cout, std::cerr);
}
