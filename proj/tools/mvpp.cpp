#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mvpp/cli.hpp"
#include "mvpp/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Simulation and verification of measure-valued Polya urns"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", suite = "all";
  std::uint64_t seed = 0;
  bool emit_svg = false, inject_fault = false;

  auto* simulate = app.add_subcommand("simulate", "Run the experiment described by a config file");
  simulate->add_option("--config", config_path, "Config file")->required();
  auto* sim_seed = simulate->add_option("--seed", seed, "Overrides the config seed");
  auto* sim_out = simulate->add_option("--out", out_dir, "Overrides the config output directory");
  auto* sim_svg = simulate->add_flag("--emit-svg", emit_svg, "Write SVG histograms");

  std::uint64_t verify_seed = 20240917;
  std::string verify_out = ".";
  auto* verify = app.add_subcommand("verify", "Run an acceptance suite and write a JSON report");
  verify->add_option("--suite", suite, "trees, coupling, martingale, mvpp, kdiscrete or all");
  verify->add_option("--seed", verify_seed, "Root seed");
  verify->add_option("--out", verify_out, "Report directory");
  verify->add_flag("--inject-fault", inject_fault, "Shift the depth centrings by one");

  mvpp::OracleRequest req;
  std::string oracle_out;
  auto* oracle = app.add_subcommand("oracle", "Dump an exact law as CSV");
  oracle->add_option("name", req.name, "Oracle name")->required();
  oracle->add_option("--n", req.n, "Size parameter");
  oracle->add_option("--kappa", req.kappa, "Arity for the kappa-ary oracles");
  oracle->add_option("--kernel", req.kernel, "identity or mixing");
  oracle->add_option("--m0", req.m0_weights, "Initial weights of colours 0, 1, ...");
  oracle->add_option("--variant", req.variant, "coupling_law: direct, rrt, bst; bst_joint_depths: depths, left");
  oracle->add_option("--out", oracle_out, "CSV file (default: stdout)");

  std::int64_t profile_n = 10;
  std::uint64_t profile_seed = 1;
  std::string profile_out = ".";
  bool profile_svg = false;
  auto* prof = app.add_subcommand("profile", "Grow one random recursive tree and dump its depths");
  prof->add_option("--n", profile_n, "Growth steps");
  prof->add_option("--seed", profile_seed, "Root seed");
  prof->add_option("--out", profile_out, "Output directory");
  prof->add_flag("--emit-svg", profile_svg, "Write an SVG histogram");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : mvpp::kExitConfig;
  }

  try {
    if (*simulate) {
      mvpp::ExperimentConfig c = mvpp::build_experiment(mvpp::load_config_file(config_path));
      if (*sim_seed) c.seed = seed;
      if (*sim_out) c.out_dir = out_dir;
      if (*sim_svg) c.emit_svg = true;
      return mvpp::run_simulate(c, std::cout);
    }
    if (*verify) return mvpp::run_verify(suite, verify_seed, verify_out, inject_fault, std::cout);
    if (*oracle) {
      if (oracle_out.empty()) return mvpp::run_oracle(req, std::cout);
      std::ofstream f(oracle_out, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + oracle_out);
      return mvpp::run_oracle(req, f);
    }
    if (*prof) return mvpp::run_profile(profile_n, profile_seed, profile_out, profile_svg, std::cout);
  } catch (const mvpp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return mvpp::kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return mvpp::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return mvpp::kExitRuntime;
  }
  return mvpp::kExitConfig;
}
