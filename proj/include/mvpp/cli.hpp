#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mvpp/config.hpp"

namespace mvpp {

// Exit codes shared by the runners and the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

// Writes <out>/<name>_n<N>.csv per grid point and <out>/<name>_summary.json.
int run_simulate(const ExperimentConfig& c, std::ostream& log);

// Writes <out>/verify_<suite>.json and a text summary to `log`; returns 0 iff every check passes.
int run_verify(const std::string& suite, std::uint64_t seed, const std::string& out_dir, bool inject_fault,
               std::ostream& log);

struct OracleRequest {
  std::string name;
  int n = 2;
  int kappa = 2;
  // exact_urn_law / coupling_law kernel preset: identity or mixing.
  std::string kernel = "identity";
  std::vector<double> m0_weights{1.0, 1.0};
  // coupling_law output: direct, rrt or bst. bst_joint_depths: depths or left.
  std::string variant;
};
std::vector<std::string> oracle_names();
// CSV `outcome,probability` on `out`.
int run_oracle(const OracleRequest& r, std::ostream& out);

// RRT with n+1 nodes: <out>/profile_n<N>.csv (node_id,parent_id,depth) and the profile measure.
int run_profile(std::int64_t n, std::uint64_t seed, const std::string& out_dir, bool emit_svg, std::ostream& log);

// Density histogram with an optional standard normal density overlay.
std::string histogram_svg(const std::vector<double>& values, const std::vector<double>& weights, const std::string& title,
                          const std::string& x_label, bool normal_overlay);

}  // namespace mvpp
