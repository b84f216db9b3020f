// Command-line front end for super-directive circular array synthesis.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sda/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Super-directive circular array synthesis"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir = ".";
  std::string quadrature;
  double grid_deg = 0;
  app.add_option("--config", config_path, "Run configuration (JSON)");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--quadrature", quadrature, "Quadrature node counts, NTHETAxNPHI");
  app.add_option("--grid", grid_deg, "Pattern grid resolution in degrees");

  using Command = int (*)(const sda::RunConfig&, const std::string&, std::ostream&);
  Command selected = nullptr;
  auto verb = [&](const char* name, const char* help, Command cmd) {
    app.add_subcommand(name, help)->callback([&selected, cmd] { selected = cmd; });
  };
  verb("synth", "Synthesize sidelobe- and REIN-constrained weights", sda::cmd_synth);
  verb("sweep", "Maximum directivity and REIN over a parameter sweep", sda::cmd_sweep);
  verb("table2", "Synthesis results across the configured frequencies", sda::cmd_table2);
  verb("compose", "Compose synthesized sub-arrays into a line of copies", sda::cmd_compose);
  verb("radius-for-rein", "UCA radius at which maximum-directivity REIN meets the floor", sda::cmd_radius_for_rein);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sda::kExitConfig;
  }

  try {
    sda::RunConfig cfg = config_path.empty() ? sda::RunConfig{} : sda::load_run_config(config_path);
    if (!quadrature.empty()) cfg.quadrature = sda::parse_quadrature(quadrature);
    if (grid_deg != 0) {
      if (!(grid_deg > 0) || grid_deg > 10) throw sda::ConfigError("--grid must be in (0, 10] degrees");
      cfg.grid_deg = grid_deg;
    }
    return selected(cfg, out_dir, std::cout);
  } catch (const sda::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return sda::kExitConfig;
  } catch (const sda::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return sda::kExitInfeasible;
  } catch (const sda::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return sda::kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return sda::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return sda::kExitNumerical;
  }
}
