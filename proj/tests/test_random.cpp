#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mvpp/random.hpp"
#include "mvpp/stats.hpp"

using namespace mvpp;

namespace {

// One-sample KS against an arbitrary continuous CDF, computed directly.
template <class Cdf>
double ks_direct(std::vector<double> x, Cdf cdf) {
  std::sort(x.begin(), x.end());
  double d = 0.0, n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double f = cdf(x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

}  // namespace

TEST_CASE("derive_stream is deterministic") {
  RngStream a = derive_stream(42, 0), b = derive_stream(42, 0);
  for (int i = 0; i < 10; ++i) CHECK(a.next_uniform() == b.next_uniform());
}

TEST_CASE("distinct stream ids differ") {
  RngStream a = derive_stream(42, 0), b = derive_stream(42, 1);
  bool differ = false;
  for (int i = 0; i < 10; ++i) differ = differ || a.next_uniform() != b.next_uniform();
  CHECK(differ);
}

TEST_CASE("zero seed is not degenerate") {
  RngStream s = derive_stream(0, 0);
  std::vector<double> u;
  for (int i = 0; i < 10; ++i) u.push_back(s.next_uniform());
  CHECK(std::adjacent_find(u.begin(), u.end(), std::not_equal_to<>()) != u.end());
}

TEST_CASE("golden outputs of this release") {
  RngStream s = derive_stream(42, 0);
  CHECK(s.next_u64() == 4883220004899022647ULL);
  CHECK(s.next_u64() == 12049170137022094632ULL);
  CHECK(s.next_u64() == 10651152686277297848ULL);
  CHECK(derive_stream(42, 1).next_uniform() == 0.55970459436435671);
  CHECK(derive_stream(0, 0).next_uniform() == 0.52280899271727033);
}

TEST_CASE("uniforms: range, mean and equal-bin chi-square") {
  RngStream s = derive_stream(7, 3);
  const int n = 100000;
  std::vector<double> counts(100, 0.0);
  double sum = 0.0;
  bool in_range = true;
  for (int i = 0; i < n; ++i) {
    double u = s.next_uniform();
    in_range = in_range && u >= 0.0 && u < 1.0;
    sum += u;
    counts[static_cast<std::size_t>(u * 100)] += 1;
  }
  CHECK(in_range);
  CHECK(std::abs(sum / n - 0.5) <= 0.005);
  CHECK(chi_square(counts, std::vector<double>(100, 0.01)).p_value > 0.001);
}

TEST_CASE("streams are pairwise independent at the chi-square level") {
  RngStream a = derive_stream(5, 0), b = derive_stream(5, 1);
  std::vector<double> counts(100, 0.0);
  for (int i = 0; i < 100000; ++i) {
    int x = static_cast<int>(a.next_uniform() * 10), y = static_cast<int>(b.next_uniform() * 10);
    counts[static_cast<std::size_t>(10 * x + y)] += 1;
  }
  CHECK(chi_square(counts, std::vector<double>(100, 0.01)).p_value > 0.001);
}

TEST_CASE("next_below is uniform and rejects zero") {
  RngStream s = derive_stream(1, 1);
  std::vector<double> counts(7, 0.0);
  for (int i = 0; i < 70000; ++i) counts[s.next_below(7)] += 1;
  CHECK(chi_square(counts, std::vector<double>(7, 1.0 / 7)).p_value > 0.001);
  CHECK_THROWS_AS(s.next_below(0), std::invalid_argument);
}

TEST_CASE("standard normal KS") {
  RngStream s = derive_stream(11, 0);
  std::vector<double> x(100000);
  for (double& v : x) v = s.next_standard_normal();
  CHECK(ks_direct(x, [](double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }) <= 0.01);
}

TEST_CASE("gamma(1) is exponential") {
  RngStream s = derive_stream(12, 0);
  std::vector<double> x(100000);
  for (double& v : x) v = s.next_gamma(1.0);
  CHECK(ks_direct(x, [](double t) { return t <= 0 ? 0.0 : 1.0 - std::exp(-t); }) <= 0.01);
}

TEST_CASE("gamma below shape one has the right moments") {
  RngStream s = derive_stream(13, 0);
  std::vector<double> x(100000);
  for (double& v : x) v = s.next_gamma(0.3);
  // Mean 0.3 with sd sqrt(0.3/1e5) ~ 0.0017.
  CHECK(std::abs(mean(x) - 0.3) < 0.01);
  CHECK(std::abs(sample_variance(x) - 0.3) < 0.02);
}

TEST_CASE("beta and dirichlet") {
  RngStream s = derive_stream(14, 0);
  std::vector<double> x(50000);
  for (double& v : x) v = s.next_beta(2.0, 3.0);
  CHECK(ks_statistic(x, law::Beta{2.0, 3.0}) <= 0.015);
  auto d = s.next_dirichlet({0.5, 0.5, 0.5});
  CHECK(d.size() == 3);
  CHECK(std::abs(d[0] + d[1] + d[2] - 1.0) < 1e-12);
  CHECK_THROWS_AS(s.next_dirichlet({}), std::invalid_argument);
}

TEST_CASE("alpha = 2 stable is normal with variance 2") {
  RngStream s = derive_stream(15, 0);
  std::vector<double> x(100000);
  for (double& v : x) v = s.next_stable(2.0, 0.0);
  CHECK(ks_statistic(x, law::Normal{0.0, 2.0}) <= 0.01);
}

TEST_CASE("alpha = 1 symmetric stable is Cauchy") {
  RngStream s = derive_stream(16, 0);
  std::vector<double> x(100000);
  for (double& v : x) v = s.next_stable(1.0, 0.0);
  CHECK(ks_direct(x, [](double t) { return 0.5 + std::atan(t) / M_PI; }) <= 0.01);
}

TEST_CASE("out-of-range parameters are rejected") {
  RngStream s = derive_stream(1, 2);
  CHECK_THROWS_AS(s.next_gamma(0.0), std::invalid_argument);
  CHECK_THROWS_AS(s.next_gamma(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(s.next_stable(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(s.next_stable(2.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(s.next_stable(1.5, 1.5), std::invalid_argument);
}

TEST_CASE("replay of every sampler") {
  auto run = [] {
    RngStream s = derive_stream(99, 4);
    std::vector<double> out;
    for (int i = 0; i < 50; ++i) {
      out.push_back(s.next_standard_normal());
      out.push_back(s.next_gamma(0.7));
      out.push_back(s.next_stable(1.5, 0.3));
      out.push_back(s.next_beta(0.5, 2.0));
      out.push_back(static_cast<double>(s.next_below(13)));
    }
    return out;
  };
  CHECK(run() == run());
}
