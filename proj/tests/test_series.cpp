#include <doctest.h>

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "mvpp/kernels.hpp"
#include "mvpp/process.hpp"
#include "mvpp/series.hpp"
#include "mvpp/stats.hpp"

using namespace mvpp;

namespace {

const cplx I(0.0, 1.0);

// Fair +-1 step.
CharFn coin_phi() {
  return [](cplx z) { return std::cos(z); };
}

std::vector<double> coin_labels(std::int64_t n, RngStream& s) {
  static const ReplacementKernel k = lattice_table_walk({-1, 1}, {0.5, 0.5});
  return project_labels(sbmc_on_rrt(AtomicMeasure::dirac(std::int64_t{0}), k, n, s).labels, {1.0});
}

struct MeanSe {
  cplx mean;
  double se_re, se_im;
};

MeanSe summarise(const std::vector<cplx>& v) {
  std::vector<double> re, im;
  for (auto c : v) {
    re.push_back(c.real());
    im.push_back(c.imag());
  }
  double n = static_cast<double>(v.size());
  return {{mean(re), mean(im)}, std::sqrt(sample_variance(re) / n), std::sqrt(sample_variance(im) / n)};
}

bool within_3se(const MeanSe& m, cplx target) {
  auto ok = [](double d, double se) { return std::abs(d) <= 3.0 * se + 1e-12; };
  return ok(m.mean.real() - target.real(), m.se_re) && ok(m.mean.imag() - target.imag(), m.se_im);
}

}  // namespace

TEST_CASE("z_n special values") {
  for (std::int64_t n : {0, 1, 7, 1000, 1000000}) {
    CHECK(std::abs(z_n(n, 1.0) - 1.0) <= 1e-10);
    CHECK(std::abs(z_n(n, 2.0) / double(n + 1) - 1.0) <= 1e-10);
  }
  cplx x(0.3, 0.7);
  CHECK(std::abs(z_n(2, x) - x * (1.0 + x) / 2.0) <= 1e-14);
  CHECK(std::abs(z_n(3, 2.0) - 4.0) <= 1e-12);
  CHECK(z_n(0, x) == cplx(1.0, 0.0));
}

TEST_CASE("z_n asymptotics") {
  double r = std::abs(z_n(100000, 1.5)) * std::tgamma(1.5) / std::sqrt(1e5);
  CHECK(std::abs(r - 1.0) <= 1e-3);
}

TEST_CASE("empirical_f_n trivial cases") {
  CHECK(std::abs(empirical_f_n(std::vector<double>(6, 0.0), 0.7, 0.0) - 1.0) <= 1e-12);
  CHECK(std::abs(empirical_f_n(std::vector<double>{1.0, -2.0, 3.5}, 0.0, 0.4) - 1.0) <= 1e-12);
  CHECK(std::abs(empirical_f_n(std::vector<double>{2.5}, 0.4, 1.0) - std::exp(I * 0.4 * 2.5)) <= 1e-14);
  CHECK_THROWS(empirical_f_n(std::vector<double>{}, 0.4, 1.0));
}

TEST_CASE("empirical_f_n is bounded by |Z_n|") {
  RngStream s = derive_stream(21, 0);
  for (int rep = 0; rep < 20; ++rep) {
    auto x = coin_labels(50, s);
    double theta = s.next_uniform() * 2.0 - 1.0, m = s.next_uniform();
    CHECK(std::abs(empirical_f_n(x, theta, m)) <= std::abs(z_n(50, std::exp(-I * m * theta))) + 1e-12);
  }
}

TEST_CASE("empirical_f_n on colour labels along a direction") {
  std::vector<Colour> labels{make_real({1.0, 2.0}), make_real({0.0, -1.0})};
  cplx direct = empirical_f_n(std::vector<double>{1.0 * 0.6 + 2.0 * 0.8, -0.8}, 1.0, 0.5 * 0.6);
  cplx viavec = empirical_f_n(labels, {0.6, 0.8}, {0.5, 0.0});
  CHECK(std::abs(direct - viavec) <= 1e-14);
}

TEST_CASE("expected_f_n trivial cases") {
  CharFn one = [](cplx) { return cplx(1.0, 0.0); };
  for (std::int64_t n : {0, 1, 10, 12345}) {
    CHECK(std::abs(expected_f_n(n, 0.8, 0.0, one) - 1.0) <= 1e-10);
    CHECK(std::abs(expected_f_n(n, 0.0, 0.3, coin_phi()) - 1.0) <= 1e-10);
  }
}

TEST_CASE("expected_f_n against Monte Carlo, coin walk") {
  const std::int64_t n = 10000;
  const std::size_t reps = 10000;
  std::vector<cplx> f(reps);
  parallel_for(reps / 100, [&](std::size_t b) {
    RngStream s = derive_stream(22, b);
    for (std::size_t i = b * 100; i < (b + 1) * 100; ++i) f[i] = empirical_f_n(coin_labels(n, s), 0.3, 0.0);
  });
  CHECK(within_3se(summarise(f), expected_f_n(n, 0.3, 0.0, coin_phi())));
}

TEST_CASE("t_n trivial cases and errors") {
  CHECK(std::abs(t_n(std::vector<double>{0.0}, 0.5, 0.0, coin_phi()) - 1.0) <= 1e-14);
  RngStream s = derive_stream(23, 0);
  CHECK(std::abs(t_n(coin_labels(30, s), 0.0, 0.0, coin_phi()) - 1.0) <= 1e-12);
  // Phi = -1 makes Z_n(Phi+1) vanish.
  CharFn minus_one = [](cplx) { return cplx(-1.0, 0.0); };
  CHECK_THROWS(t_n(std::vector<double>{0.0, 1.0}, 0.5, 0.0, minus_one));
}

TEST_CASE("t_n is a mean-one martingale") {
  for (std::int64_t n : {10, 100, 1000}) {
    const std::size_t reps = 4000;
    std::vector<cplx> t(reps);
    parallel_for(reps / 100, [&](std::size_t b) {
      RngStream s = derive_stream(24, static_cast<std::uint64_t>(n) * 100 + b);
      for (std::size_t i = b * 100; i < (b + 1) * 100; ++i) t[i] = t_n(coin_labels(n, s), 0.2, 0.0, coin_phi());
    });
    CHECK(within_3se(summarise(t), 1.0));
  }
}

TEST_CASE("pbar_recursion base and one step") {
  CharFn phi = coin_phi();
  CHECK(std::abs(pbar_recursion(0, 0.3, -0.1, phi) - 1.0) <= 1e-15);
  cplx z1(0.3, 0.1), z2(-0.2, 0.05);
  cplx hand = 1.0 + phi(z1) + phi(z2) + phi(z1 + z2);
  CHECK(std::abs(pbar_recursion(1, z1, z2, phi) - hand) <= 1e-14);

  // One-step Monte Carlo with labels {0, Delta}.
  RngStream s = derive_stream(25, 0);
  std::vector<cplx> p(100000);
  for (auto& v : p) {
    auto x = coin_labels(1, s);
    v = fbar_n(x, z1) * fbar_n(x, z2);
  }
  CHECK(within_3se(summarise(p), hand));
}

TEST_CASE("pbar_recursion against Monte Carlo, coin walk") {
  const std::int64_t n = 100;
  const std::size_t reps = 100000;
  const cplx z1(0.0, 0.2), z2(0.0, -0.2);
  std::vector<cplx> p(reps);
  parallel_for(reps / 1000, [&](std::size_t b) {
    RngStream s = derive_stream(26, b);
    for (std::size_t i = b * 1000; i < (b + 1) * 1000; ++i) {
      auto x = coin_labels(n, s);
      p[i] = fbar_n(x, z1) * fbar_n(x, z2);
    }
  });
  CHECK(within_3se(summarise(p), pbar_recursion(n, z1, z2, coin_phi())));
}

TEST_CASE("default theta grid") {
  auto g = default_theta_grid(1000);
  REQUIRE(g.size() == 21);
  CHECK(g.front() == doctest::Approx(-3.0 / std::sqrt(std::log(1000.0))));
  CHECK(g[10] == doctest::Approx(0.0));
}

TEST_CASE("martingale series csv") {
  MartingaleSeries ms;
  ms.points.push_back({5, 0.1, {1.0, 0.0}, {1.0, 0.0}});
  std::ostringstream os;
  ms.write_csv(os);
  CHECK(os.str().find('\n') != std::string::npos);
}
