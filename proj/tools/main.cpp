// stablechaos command-line front end.
//
// Subcommands:
//   simulate --config <path> [--out <path>] [--png]   field CSV (+ heatmap)
//   verify   --config <path>                          cross-check report
//   atoms    --config <path> --out <path>             atom cloud CSV
//
// Exit codes: 0 success, 1 runtime/check/I-O failure, 2 configuration error.
// The only environment influence is STABLECHAOS_THREADS; every model
// parameter comes from the config file.

#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <stablechaos/stablechaos.hpp>

namespace {

stablechaos::RunConfig load_config(const std::string& path) {
  return stablechaos::parse_config_file(path);
}

int run_simulate(const std::string& config_path, const std::string& out_path, bool png) {
  const stablechaos::RunConfig cfg = load_config(config_path);
  const stablechaos::FieldResult field = stablechaos::run_field(cfg);

  std::string csv_target = out_path.empty() ? cfg.output_path : out_path;
  if (csv_target.empty()) {
    stablechaos::write_field_csv(std::cout, field);
  } else {
    std::ofstream out(csv_target, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot open '" << csv_target << "' for writing\n";
      return 1;
    }
    stablechaos::write_field_csv(out, field);
    if (!out) {
      std::cerr << "error: write failed for '" << csv_target << "'\n";
      return 1;
    }
  }

  if (png) {
    if (csv_target.empty()) {
      std::cerr << "error: --png requires an output path (--out or config output_path)\n";
      return 2;
    }
    std::string png_target = csv_target;
    const auto dot = png_target.find_last_of('.');
    if (dot != std::string::npos && png_target.find('/', dot) == std::string::npos)
      png_target.resize(dot);
    png_target += ".png";
    stablechaos::write_binary_file(png_target, stablechaos::field_png_bytes(field));
  }
  return 0;
}

int run_verify_cmd(const std::string& config_path) {
  const stablechaos::RunConfig cfg = load_config(config_path);
  const stablechaos::DiagnosticsReport report = stablechaos::run_verify(cfg);
  report.write(std::cout);
  return report.all_pass() ? 0 : 1;
}

int run_atoms(const std::string& config_path, const std::string& out_path) {
  const stablechaos::RunConfig cfg = load_config(config_path);
  const stablechaos::AtomCloud cloud(cfg.stable_params(), cfg.weight(), cfg.seed, cfg.atoms);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open '" << out_path << "' for writing\n";
    return 1;
  }
  stablechaos::write_cloud_csv(out, cloud);
  if (!out) {
    std::cerr << "error: write failed for '" << out_path << "'\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LePage-series simulation of stable-noise SPDE solutions"};
  app.require_subcommand(1);

  std::string sim_config, sim_out;
  bool sim_png = false;
  CLI::App* sim = app.add_subcommand("simulate", "evaluate a solution field on a grid");
  sim->add_option("--config", sim_config, "config file (flat key = value)")->required();
  sim->add_option("--out", sim_out, "output CSV path (default: config output_path or stdout)");
  sim->add_flag("--png", sim_png, "also render a heatmap next to the CSV");

  std::string ver_config;
  CLI::App* ver = app.add_subcommand("verify", "run the cross-check suite");
  ver->add_option("--config", ver_config, "config file (flat key = value)")->required();

  std::string atoms_config, atoms_out;
  CLI::App* atm = app.add_subcommand("atoms", "dump the sampled atom cloud as CSV");
  atm->add_option("--config", atoms_config, "config file (flat key = value)")->required();
  atm->add_option("--out", atoms_out, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return run_simulate(sim_config, sim_out, sim_png);
    if (ver->parsed()) return run_verify_cmd(ver_config);
    return run_atoms(atoms_config, atoms_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
