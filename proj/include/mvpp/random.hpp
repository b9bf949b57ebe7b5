#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace mvpp {

// 64-bit finaliser used to derive stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

// Deterministic mix of (root_seed, stream_id) into a 64-bit engine seed.
std::uint64_t mix_seed(std::uint64_t root_seed, std::uint64_t stream_id);

// Single-owner pseudo-random stream. Engine is mt19937_64 (period 2^19937-1);
// all distributions below are implemented here so the output sequence only
// depends on the engine, not on the standard library's distribution code.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t root_seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return engine_(); }

  std::uint64_t root_seed() const { return root_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }
  double next_uniform();
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t next_below(std::uint64_t n);
  bool next_bernoulli(double p);
  double next_standard_normal();
  double next_exponential();
  double next_gamma(double shape);
  double next_beta(double a, double b);
  std::vector<double> next_dirichlet(const std::vector<double>& alpha);
  // S1-parameterised stable law with unit scale, Chambers-Mallows-Stuck.
  double next_stable(double alpha, double skew);

 private:
  std::uint64_t root_seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

RngStream derive_stream(std::uint64_t root_seed, std::uint64_t stream_id);

}  // namespace mvpp
