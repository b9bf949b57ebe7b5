#include <doctest.h>

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mvpp/kernels.hpp"
#include "mvpp/stats.hpp"

using namespace mvpp;

TEST_CASE("normal CDF against the high-precision golden table") {
  std::ifstream in(std::string(MVPP_TEST_DATA_DIR) + "/normal_cdf_golden.csv");
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,cdf");
  int rows = 0;
  double worst = 0.0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string xs, ps;
    std::getline(ls, xs, ',');
    std::getline(ls, ps);
    worst = std::max(worst, std::abs(normal_cdf(std::stod(xs)) - std::stod(ps)));
    ++rows;
  }
  CHECK(rows == 40);
  CHECK(worst <= 1e-7);
}

TEST_CASE("KS of exact quantiles is tiny") {
  const int n = 10000;
  boost::math::normal_distribution<double> nd;
  std::vector<double> q(n);
  for (int k = 1; k <= n; ++k) q[k - 1] = boost::math::quantile(nd, k / double(n + 1));
  CHECK(ks_statistic(q, law::StdNormal{}) <= 2.0 / (n + 1));
}

TEST_CASE("KS of a single median point is one half") {
  CHECK(ks_statistic(WeightedSample{{0.0, 1.0}}, law::StdNormal{}) == doctest::Approx(0.5));
  CHECK(ks_statistic(WeightedSample{{3.0, 7.0}}, law::Normal{3.0, 2.0}) == doctest::Approx(0.5));
}

TEST_CASE("KS of simulated normals passes in most seeds") {
  int good = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RngStream s = derive_stream(seed, 77);
    std::vector<double> x(10000);
    for (double& v : x) v = s.next_standard_normal();
    good += ks_statistic(x, law::StdNormal{}) <= 0.02;
  }
  CHECK(good >= 95);
}

TEST_CASE("weighted KS normalises weights") {
  WeightedSample a{{-1.0, 1.0}, {0.5, 3.0}}, b{{-1.0, 2.0}, {0.5, 6.0}};
  CHECK(ks_statistic(a, law::StdNormal{}) == doctest::Approx(ks_statistic(b, law::StdNormal{})));
  CHECK_THROWS_AS(ks_statistic(WeightedSample{}, law::StdNormal{}), std::invalid_argument);
  CHECK_THROWS_AS(ks_statistic(WeightedSample{{0.0, 0.0}}, law::StdNormal{}), std::invalid_argument);
}

TEST_CASE("KS is invariant under affine maps") {
  RngStream s = derive_stream(31, 0);
  std::vector<double> x(2000), y(2000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = s.next_standard_normal() * 1.1 + 0.05;
    y[i] = 3.0 * x[i] - 2.0;
  }
  CHECK(ks_statistic(x, law::StdNormal{}) == doctest::Approx(ks_statistic(y, law::Normal{-2.0, 9.0})).epsilon(1e-12));
}

TEST_CASE("two-sample KS") {
  CHECK(ks_two_sample({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == 0.0);
  CHECK(ks_two_sample({1.0, 2.0}, {5.0, 6.0}) == 1.0);
  CHECK_THROWS_AS(ks_two_sample({}, {1.0}), std::invalid_argument);
}

TEST_CASE("total variation") {
  CHECK(total_variation(std::vector<double>{0.2, 0.8}, std::vector<double>{0.2, 0.8}) == 0.0);
  CHECK(total_variation(std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 1.0}) == 1.0);
  std::map<std::int64_t, double> a{{0, 0.5}, {1, 0.5}}, b{{2, 1.0}};
  CHECK(total_variation(a, b) == 1.0);
  CHECK_THROWS_AS(total_variation(std::vector<double>{1.0}, std::vector<double>{0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(total_variation(std::vector<double>{}, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("total variation is a metric on random pmfs") {
  RngStream s = derive_stream(32, 0);
  for (int rep = 0; rep < 200; ++rep) {
    auto p = s.next_dirichlet({1, 1, 1, 1, 1}), q = s.next_dirichlet({1, 1, 1, 1, 1}),
         r = s.next_dirichlet({1, 1, 1, 1, 1});
    CHECK(total_variation(p, q) == total_variation(q, p));
    CHECK(total_variation(p, r) <= total_variation(p, q) + total_variation(q, r) + 1e-15);
  }
}

TEST_CASE("chi-square of fair coins") {
  const double crit = chi_square_quantile(0.99, 1);
  CHECK(crit == doctest::Approx(6.6349).epsilon(1e-4));
  int good = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RngStream s = derive_stream(seed, 78);
    std::vector<double> c(2, 0.0);
    for (int i = 0; i < 100000; ++i) c[s.next_bernoulli(0.5)] += 1;
    auto r = chi_square(c, {0.5, 0.5});
    CHECK(r.dof == 1);
    good += r.statistic < crit;
  }
  CHECK(good >= 98);
}

TEST_CASE("chi-square pooling and errors") {
  // Expected counts 50, 45, 4, 1: the last two pool into one bin.
  auto r = chi_square({50, 45, 4, 1}, {0.5, 0.45, 0.04, 0.01});
  CHECK(r.dof == 2);
  CHECK(r.statistic == doctest::Approx(0.0));
  CHECK_THROWS_AS(chi_square({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(chi_square({1, 2}, {1.0}), std::invalid_argument);
  CHECK(chi_square_p_value(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-8));
}

TEST_CASE("Poisson pmf") {
  const double e = std::exp(-1.0);
  CHECK(reference_pmf(law::Poisson{1.0}, 0) == doctest::Approx(e).epsilon(1e-14));
  CHECK(reference_pmf(law::Poisson{1.0}, 1) == doctest::Approx(e).epsilon(1e-14));
  CHECK(reference_pmf(law::Poisson{1.0}, 2) == doctest::Approx(e / 2).epsilon(1e-14));
  CHECK(reference_cdf(law::Poisson{1.0}, 1.5) == doctest::Approx(2 * e).epsilon(1e-14));
  CHECK_THROWS_AS(reference_pmf(law::StdNormal{}, 0), std::invalid_argument);
}

TEST_CASE("geometric conventions") {
  CHECK(reference_pmf(law::Geometric{0.25, 0}, 0) == doctest::Approx(0.25));
  CHECK(reference_pmf(law::Geometric{0.25, 1}, 0) == 0.0);
  CHECK(reference_pmf(law::Geometric{0.25, 1}, 2) == doctest::Approx(0.1875));
}

TEST_CASE("invalid laws are rejected") {
  CHECK_THROWS_AS(validate_law(law::Normal{0.0, -1.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate_law(law::Poisson{0.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate_law(law::Beta{0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(reference_cdf(law::Stable{1.5, 0.0, 1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("simulate_reference with f = 0 and g = 1 is gamma itself") {
  RngStream s = derive_stream(33, 0);
  std::vector<double> x(20000);
  for (double& v : x)
    v = simulate_reference(law::Beta{2.0, 5.0}, [](double) { return 0.0; }, [](double) { return 1.0; }, s);
  CHECK(ks_statistic(x, law::Beta{2.0, 5.0}) <= 0.015);
}

TEST_CASE("BRW reference with zero variance is Lambda") {
  RenormalisationPlan p = presets::brw(1.0, 0.0);
  RngStream s = derive_stream(34, 0);
  std::vector<double> x(100000);
  for (double& v : x) v = simulate_reference(p, s);
  CHECK(ks_statistic(x, law::StdNormal{}) <= 0.01);
}

TEST_CASE("BRW reference composition matches N(0, sigma^2 + m^2)") {
  RenormalisationPlan p = presets::brw(1.0, 1.0);
  RngStream s = derive_stream(35, 0);
  std::vector<double> x(100000);
  for (double& v : x) v = simulate_reference(p, s);
  CHECK(ks_statistic(x, law::Normal{0.0, 2.0}) <= 0.02);
}

TEST_CASE("projection of a multivariate normal") {
  law::NormalMulti l{{1.0, 2.0}, {{2.0, 0.5}, {0.5, 1.0}}};
  law::Normal p = project(l, {0.6, 0.8});
  CHECK(p.mean == doctest::Approx(2.2));
  CHECK(p.var == doctest::Approx(0.36 * 2.0 + 2 * 0.48 * 0.5 + 0.64));
}

TEST_CASE("critical values and Hill estimator") {
  CHECK(kolmogorov_critical_value(0.05) == doctest::Approx(1.3581).epsilon(1e-3));
  CHECK(ks_critical_one_sample(10000, 0.05) == doctest::Approx(0.013581).epsilon(1e-3));
  RngStream s = derive_stream(36, 0);
  std::vector<double> x(100000);
  // Pareto(2) tail.
  for (double& v : x) v = std::pow(1.0 - s.next_uniform(), -0.5);
  CHECK(hill_estimator(x, 1000) == doctest::Approx(2.0).epsilon(0.1));
}
