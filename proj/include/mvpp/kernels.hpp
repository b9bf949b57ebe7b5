#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "mvpp/measures.hpp"
#include "mvpp/random.hpp"
#include "mvpp/stats.hpp"

namespace mvpp {

using Matrix = std::vector<std::vector<double>>;

namespace increment {
struct Constant {
  std::vector<double> value;
};
// mean + L z with z standard normal; L lower triangular.
struct Gaussian {
  std::vector<double> mean;
  Matrix chol;
};
struct Table {
  std::vector<std::vector<double>> values;
  std::vector<double> probs;
};
}  // namespace increment

using Increment = std::variant<increment::Constant, increment::Gaussian, increment::Table>;

namespace kernel {
// R_i = row i of a row-stochastic matrix.
struct DColour {
  Matrix rows;
};
// R_x = law of x + Delta. Lattice walks need integer-valued increments.
struct RandomWalk {
  Increment delta;
  bool lattice = false;
  std::vector<double> mean;
  Matrix cov;
};
// One-dimensional walk with strictly stable increments (scale * S1 stable).
struct StableWalk {
  double alpha = 1.5;
  double scale = 1.0;
  double skew = 0.0;
};
// Jump chain of the M/M/infinity queue on the non-negative integers.
struct MMInfQueue {
  double lambda = 1.0;
  double mu = 1.0;
};
// R_x = (1/kappa) sum_j delta_{y_j(x)}. Lattice colours use y_j(x) = x + shifts[j];
// finite colours use y_j(i) = index_table[i][j].
struct KDiscrete {
  int kappa = 2;
  std::vector<std::int64_t> shifts;
  std::vector<std::vector<int>> index_table;
};
}  // namespace kernel

using ReplacementKernel =
    std::variant<kernel::DColour, kernel::RandomWalk, kernel::StableWalk, kernel::MMInfQueue, kernel::KDiscrete>;

std::string kernel_name(const ReplacementKernel& k);
void validate_kernel(const ReplacementKernel& k);

kernel::RandomWalk gaussian_walk(const std::vector<double>& mean, const Matrix& cov);
kernel::RandomWalk constant_walk(std::int64_t step);
// Lattice walk with P(Delta = values[i]) = probs[i].
kernel::RandomWalk lattice_table_walk(const std::vector<std::int64_t>& values, const std::vector<double>& probs);

Colour kernel_sample(const ReplacementKernel& k, const Colour& x, RngStream& s);
// The kappa atoms y_1(x)..y_kappa(x) in table order.
std::vector<Colour> kdiscrete_tuple(const kernel::KDiscrete& k, const Colour& x);
AtomicMeasure kernel_atoms(const ReplacementKernel& k, const Colour& x);
std::vector<Colour> companion_chain(const ReplacementKernel& k, const Colour& x0, std::int64_t n, RngStream& s);
std::vector<Colour> sym_shuffle(std::vector<Colour> atoms, RngStream& s);

struct Eigenpair {
  double lambda1 = 0.0;
  std::vector<double> v1;
  int iterations = 0;
};
Eigenpair leading_eigenpair(const Matrix& r, double tol = 1e-12, int max_iter = 200000);
bool is_irreducible(const Matrix& r);

struct MomentCheck {
  bool ok = true;
  std::vector<double> sample_mean;
  std::vector<double> sample_var;
  std::string message;
};
// Compares declared mean and covariance diagonal with `draws` increment draws at 3 sigma.
MomentCheck validate_declared_moments(const kernel::RandomWalk& w, RngStream& s, std::int64_t draws = 1000000);

// Stationary law of the M/M/infinity jump chain, proportional to Poisson(rho)(x) * (lambda + x mu).
std::vector<double> mminf_jump_stationary(double lambda, double mu, std::size_t kmax);

struct RenormalisationPlan {
  std::string name;
  // Applied at t = time_factor * log n.
  std::function<double(double)> a;
  std::function<double(double)> b;
  std::function<double(double)> f;
  std::function<double(double)> g;
  ReferenceLaw gamma_reference = law::StdNormal{};
  // Closed form of Gamma g(Lambda) + f(Lambda) when available.
  bool has_limit_law = false;
  ReferenceLaw limit_law = law::StdNormal{};
  double time_factor = 1.0;
  // Hypotheses are asserted for the preset, not verified.
  bool claimed = true;
};

Rescaling plan_rescaling(const RenormalisationPlan& p, std::int64_t n);

namespace presets {
// One-dimensional BRW along a fixed direction: a = sqrt(t), b = m t, f(x) = m x, g = 1.
RenormalisationPlan brw(double m, double sigma2);
RenormalisationPlan ergodic(const ReferenceLaw& gamma);
RenormalisationPlan stable(double alpha, double scale, double skew, double m);
RenormalisationPlan kdiscrete(int kappa, double m, double sigma2);
}  // namespace presets

double simulate_reference(const RenormalisationPlan& plan, RngStream& s);

}  // namespace mvpp
