#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <vector>

#include "mvpp/oracle.hpp"
#include "mvpp/process.hpp"
#include "mvpp/stats.hpp"

using namespace mvpp;

namespace {

Colour fi(int i) { return FiniteIndex{i}; }
std::int64_t lat(const Colour& c) { return std::get<std::int64_t>(c); }
int idx(const Colour& c) { return std::get<FiniteIndex>(c).index; }

const ReplacementKernel kIdentity = kernel::DColour{{{1.0, 0.0}, {0.0, 1.0}}};
const ReplacementKernel kMixing = kernel::DColour{{{0.6, 0.4}, {0.3, 0.7}}};

ReplacementKernel coin_walk() { return lattice_table_walk({-1, 1}, {0.5, 0.5}); }

// Chi-square of simulated first-colour weights against the exact composition law of a 2-colour urn.
double composition_p(const ExactLaw& law, const std::map<double, double>& counts) {
  std::vector<double> c, p;
  for (const auto& [o, prob] : law.table()) {
    p.push_back(prob);
    auto it = counts.find(o[0]);
    c.push_back(it == counts.end() ? 0.0 : it->second);
  }
  return chi_square(c, p).p_value;
}

}  // namespace

TEST_CASE("mass bookkeeping") {
  RngStream s = derive_stream(81, 0);
  AtomicMeasure m0({{fi(0), 0.5}, {fi(1), 0.5}});
  for (std::int64_t n : {0, 1, 7, 200}) {
    CHECK(urn_measure(mvpp_direct(m0, kMixing, n, s)).total_mass() == doctest::Approx(1.0 + n).epsilon(1e-12));
    CHECK(urn_measure(mvpp_via_rrt(m0, kMixing, n, s)).total_mass() == doctest::Approx(1.0 + n).epsilon(1e-12));
    CHECK(urn_measure(mvpp_via_bst(m0, kMixing, n, s)).total_mass() == doctest::Approx(1.0 + n).epsilon(1e-12));
  }
  AtomicMeasure three({{fi(0), 2.0}, {fi(1), 1.0}});
  CHECK(urn_measure(mvpp_direct(three, kMixing, 50, s)).total_mass() == doctest::Approx(53.0).epsilon(1e-12));

  kernel::KDiscrete kd{3, {0, 1, 2}, {}};
  for (std::int64_t n : {0, 1, 10, 100}) {
    LabelledTree lt = mvpp_kdiscrete(AtomicMeasure::dirac(std::int64_t{0}, 1.0 / 3), kd, n, s);
    CHECK(lt.tree.leaf_list().size() == static_cast<std::size_t>(1 + 2 * n));
    CHECK(urn_measure(lt).total_mass() == doctest::Approx((1.0 + 2.0 * n) / 3).epsilon(1e-12));
    CHECK(lt.steps() == n);
  }
  CHECK(mvpp_direct(m0, kMixing, 0, s).drawn.empty());
}

TEST_CASE("errors") {
  RngStream s = derive_stream(82, 0);
  CHECK_THROWS_AS(mvpp_direct(AtomicMeasure(), kMixing, 3, s), std::invalid_argument);
  CHECK_THROWS_AS(mvpp_via_rrt(AtomicMeasure::dirac(fi(0), 2.0), kMixing, 3, s), std::invalid_argument);
  CHECK_THROWS_AS(mvpp_via_bst(AtomicMeasure::dirac(fi(0), 0.5), kMixing, 3, s), std::invalid_argument);
  CHECK_THROWS_AS(mvpp_forest(AtomicMeasure(), kMixing, 3, s), std::invalid_argument);
  kernel::KDiscrete kd{2, {0, 1}, {}};
  CHECK_THROWS_AS(mvpp_kdiscrete(AtomicMeasure::dirac(std::int64_t{0}, 0.3), kd, 3, s), std::invalid_argument);
  UrnTrace t = mvpp_direct(AtomicMeasure::dirac(fi(0)), kMixing, 0, s);
  CHECK_THROWS_AS(sample_pair(t, s), std::invalid_argument);
}

TEST_CASE("identity urn matches the enumeration oracle") {
  const int reps = 100000;
  for (double w : {0.5, 1.0}) {
    AtomicMeasure m0({{fi(0), w}, {fi(1), w}});
    ExactLaw law = exact_urn_law(m0, kIdentity, 2);
    std::map<double, double> counts;
    RngStream s = derive_stream(83, static_cast<std::uint64_t>(w * 10));
    for (int i = 0; i < reps; ++i) counts[std::round(urn_measure(mvpp_direct(m0, kIdentity, 2, s)).weight_of(fi(0)) * 1e9) / 1e9] += 1;
    CHECK(composition_p(law, counts) > 0.001);
  }
  // Mass 2 starting point gives the uniform law on the three compositions.
  ExactLaw uniform = exact_urn_law(AtomicMeasure({{fi(0), 1.0}, {fi(1), 1.0}}), kIdentity, 2);
  for (const auto& [o, p] : uniform.table()) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("profile identity: unit steps reproduce depths") {
  ReplacementKernel step = constant_walk(1);
  AtomicMeasure origin = AtomicMeasure::dirac(std::int64_t{0});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RngStream s = derive_stream(84, seed);
    UrnTrace t = mvpp_direct(origin, step, 500, s);
    // Node i+1 hangs below node source[i] (node 0 stands for m0).
    GrowingTree tree(TreeKind::Recursive);
    tree.add_root();
    for (std::int64_t p : t.source) tree.add_child(static_cast<NodeId>(p));
    for (std::size_t i = 0; i < t.drawn.size(); ++i)
      CHECK(lat(t.drawn[i]) == tree.depth(static_cast<NodeId>(i + 1)) - 1);

    LabelledTree lt = sbmc_on_rrt(origin, step, 500, s);
    bool same = true;
    for (std::size_t u = 0; u < lt.tree.size(); ++u) same = same && lat(lt.labels[u]) == lt.tree.depth(static_cast<NodeId>(u));
    CHECK(same);

    LabelledTree rt = mvpp_via_rrt(origin, step, 500, s);
    for (std::size_t u = 1; u < rt.tree.size(); ++u) CHECK(lat(rt.labels[u]) == rt.tree.depth(static_cast<NodeId>(u)) - 1);
  }
}

TEST_CASE("small-step structure of the couplings") {
  RngStream s = derive_stream(85, 0);
  AtomicMeasure m0({{fi(0), 0.25}, {fi(1), 0.75}});
  LabelledTree r = mvpp_via_rrt(m0, kMixing, 1, s);
  CHECK(r.tree.size() == 2);
  CHECK(r.source[0] == 1);
  CHECK(r.source[1] == 0);
  CHECK(urn_measure(r).total_mass() == doctest::Approx(2.0));

  int keep_left = 0, fresh_from_m0 = 0;
  const int reps = 40000;
  for (int i = 0; i < reps; ++i) {
    LabelledTree b = mvpp_via_bst(m0, kMixing, 1, s);
    REQUIRE(b.tree.size() == 3);
    REQUIRE(b.source[1] + b.source[2] == 1);
    keep_left += b.source[1];
    fresh_from_m0 += idx(b.labels[b.source[1] ? 2 : 1]) == 1;
  }
  CHECK(std::abs(keep_left / double(reps) - 0.5) <= 0.01);
  CHECK(std::abs(fresh_from_m0 / double(reps) - 0.75) <= 0.01);
}

TEST_CASE("the three constructions agree in law") {
  const std::int64_t n = 1000;
  const std::size_t reps = 10000;
  AtomicMeasure origin = AtomicMeasure::dirac(std::int64_t{0});
  ReplacementKernel k = coin_walk();
  std::vector<double> d(reps), r(reps), b(reps);
  parallel_for(reps / 100, [&](std::size_t blk) {
    RngStream s = derive_stream(86, blk);
    for (std::size_t i = blk * 100; i < (blk + 1) * 100; ++i) {
      d[i] = static_cast<double>(lat(sample_urn(mvpp_direct(origin, k, n, s), n, s)));
      r[i] = static_cast<double>(lat(sample_urn(mvpp_via_rrt(origin, k, n, s), s)));
      b[i] = static_cast<double>(lat(sample_urn(mvpp_via_bst(origin, k, n, s), s)));
    }
  });
  const double crit = ks_critical_two_sample(reps, reps, 0.01);
  CHECK(ks_two_sample(d, r) <= crit);
  CHECK(ks_two_sample(r, b) <= crit);
  CHECK(ks_two_sample(d, b) <= crit);
}

TEST_CASE("forest with integer mass has uniform size fractions") {
  const std::int64_t n = 10000;
  const std::size_t reps = 2000;
  std::vector<double> frac(reps);
  AtomicMeasure m0 = AtomicMeasure::dirac(std::int64_t{0}, 2.0);
  parallel_for(reps / 100, [&](std::size_t blk) {
    RngStream s = derive_stream(87, blk);
    for (std::size_t i = blk * 100; i < (blk + 1) * 100; ++i) {
      auto sz = forest_sizes(mvpp_forest(m0, coin_walk(), n, s));
      frac[i] = static_cast<double>(sz[0]) / n;
    }
  });
  CHECK(ks_statistic(frac, law::Uniform01{}) <= 0.05);
}

TEST_CASE("forest with fractional mass") {
  RngStream s = derive_stream(88, 0);
  CHECK(mvpp_forest(AtomicMeasure::dirac(fi(0)), kMixing, 10, s).size() == 1);
  const std::int64_t n = 2000;
  std::vector<double> third;
  for (int i = 0; i < 2000; ++i) {
    auto f = mvpp_forest(AtomicMeasure::dirac(std::int64_t{0}, 2.5), coin_walk(), n, s);
    REQUIRE(f.size() == 3);
    CHECK(f[2].source_weight == 0.5);
    auto sz = forest_sizes(f);
    CHECK(sz[0] + sz[1] + sz[2] == n);
    third.push_back(static_cast<double>(sz[2]) / n);
  }
  // The fractional tree's share is close to Beta(1/2, 2), mean 1/5.
  CHECK(std::abs(mean(third) - 0.2) <= 0.015);
}

TEST_CASE("kdiscrete urn") {
  kernel::KDiscrete kd{2, {0, 1}, {}};
  AtomicMeasure m0 = AtomicMeasure::dirac(std::int64_t{0});
  RngStream s = derive_stream(89, 0);
  for (int i = 0; i < 200; ++i) {
    LabelledTree lt = mvpp_kdiscrete(m0, kd, 30, s);
    std::int64_t lo = 1 << 20;
    for (NodeId u : lt.tree.leaf_list()) lo = std::min(lo, lat(lt.labels[static_cast<std::size_t>(u)]));
    CHECK(lo == 0);
  }

  // Leaf-label composition at n = 2 against the enumeration oracle (flattened colour, weight pairs).
  ExactLaw law = exact_kdiscrete_tree_law(m0, kd, 2);
  CHECK(max_abs_diff(law, exact_urn_law(m0, kd, 2, UrnDynamics::WithoutReplacement)) <= 1e-12);
  ExactLaw counts;
  const int reps = 50000;
  for (int i = 0; i < reps; ++i) {
    Outcome o;
    AtomicMeasure m = urn_measure(mvpp_kdiscrete(m0, kd, 2, s));
    for (const auto& a : m.atoms()) {
      o.push_back(static_cast<double>(lat(a.colour)));
      o.push_back(a.weight);
    }
    counts.add(o, 1.0);
  }
  CHECK(counts.size() == law.size());
  std::vector<double> c, p;
  for (const auto& [o, prob] : law.table()) {
    p.push_back(prob);
    c.push_back(counts.probability(o));
  }
  CHECK(chi_square(c, p).p_value > 0.001);
}

TEST_CASE("kdiscrete shift kernel labels equal leaf depths") {
  kernel::KDiscrete kd{3, {1, 1, 1}, {}};
  RngStream s = derive_stream(90, 0);
  const std::int64_t n = 100000;
  LabelledTree lt = mvpp_kdiscrete(AtomicMeasure::dirac(std::int64_t{0}, 1.0 / 3), kd, n, s);
  double sum = 0.0;
  bool same = true;
  for (NodeId u : lt.tree.leaf_list()) {
    same = same && lat(lt.labels[static_cast<std::size_t>(u)]) == lt.tree.depth(u);
    sum += lt.tree.depth(u);
  }
  CHECK(same);
  CHECK(std::abs(sum / lt.tree.leaf_list().size() / std::log(double(n)) - 1.5) <= 0.1);
}

TEST_CASE("sample_pair at n = 1 with unit steps") {
  RngStream s = derive_stream(91, 0);
  UrnTrace t = mvpp_direct(AtomicMeasure::dirac(std::int64_t{0}), constant_walk(1), 1, s);
  CHECK(lat(t.drawn[0]) == 0);
  // Normalised urn measure (1/2)(delta_0 + delta_1); the two coordinates are independent.
  std::vector<double> c(4, 0.0);
  for (int i = 0; i < 40000; ++i) {
    auto [a, b] = sample_pair(t, s);
    c[static_cast<std::size_t>(2 * lat(a) + lat(b))] += 1;
  }
  CHECK(chi_square(c, {0.25, 0.25, 0.25, 0.25}).p_value > 0.001);
}

TEST_CASE("pair decorrelation and exchangeability") {
  const std::int64_t n = 10000;
  const std::size_t reps = 10000;
  std::vector<double> a(reps), b(reps);
  parallel_for(reps / 100, [&](std::size_t blk) {
    RngStream s = derive_stream(92, blk);
    for (std::size_t i = blk * 100; i < (blk + 1) * 100; ++i) {
      UrnTrace t = mvpp_direct(AtomicMeasure::dirac(fi(0)), kMixing, n, s);
      auto [x, y] = sample_pair(t, s);
      a[i] = idx(x);
      b[i] = idx(y);
    }
  });
  CHECK(std::abs(correlation(a, b)) <= 0.05);
  std::vector<double> fwd(4, 0.0), rev(4, 0.0);
  for (std::size_t i = 0; i < reps / 2; ++i) fwd[static_cast<std::size_t>(2 * a[i] + b[i])] += 1;
  for (std::size_t i = reps / 2; i < reps; ++i) rev[static_cast<std::size_t>(2 * b[i] + a[i])] += 1;
  CHECK(chi_square_two_sample(fwd, rev).p_value > 0.001);
}

TEST_CASE("urn measure prefixes") {
  RngStream s = derive_stream(93, 0);
  UrnTrace t = mvpp_direct(AtomicMeasure::dirac(fi(1)), kMixing, 20, s);
  CHECK(urn_measure(t, 0).weight_of(fi(1)) == 1.0);
  CHECK(urn_measure(t, 5).total_mass() == doctest::Approx(6.0));
  CHECK_THROWS_AS(urn_measure(t, 21), std::invalid_argument);
  UrnTrace g = mvpp_direct(AtomicMeasure::dirac(make_real({0.0})), gaussian_walk({0.0}, {{1.0}}), 5, s);
  CHECK_THROWS_AS(urn_measure(g), std::invalid_argument);
}

TEST_CASE("theorem check is independent of the worker count") {
  TheoremCheckOptions o;
  o.n_grid = {100, 1000};
  o.replicas = 40;
  o.pairs_per_replica = 5;
  o.root_seed = 7;
  auto run = [&](const char* threads) {
    setenv("MVPP_THREADS", threads, 1);
    return verify_main_theorem(gaussian_walk({0.0}, {{1.0}}), presets::brw(0.0, 1.0),
                               AtomicMeasure::dirac(make_real({0.0})), o);
  };
  TheoremReport one = run("1"), three = run("3");
  unsetenv("MVPP_THREADS");
  CHECK(one.samples_per_n == three.samples_per_n);
  CHECK(one.points.back().ks == three.points.back().ks);
  CHECK(one.points.back().decorrelation == three.points.back().decorrelation);
  REQUIRE(one.points.size() == 2);
  CHECK(one.points[0].samples == 400);
}

TEST_CASE("theorem check on a Gaussian walk") {
  TheoremCheckOptions o;
  o.n_grid = {100000};
  o.replicas = 1000;
  o.pairs_per_replica = 5;
  o.root_seed = 8;
  TheoremReport r = verify_main_theorem(gaussian_walk({0.0}, {{1.0}}), presets::brw(0.0, 1.0),
                                        AtomicMeasure::dirac(make_real({0.0})), o);
  CHECK(r.points[0].ks <= 0.05);
  CHECK(std::abs(r.points[0].decorrelation) <= 0.05);
  TheoremCheckOptions bad = o;
  bad.n_grid = {100, 10};
  CHECK_THROWS_AS(verify_main_theorem(gaussian_walk({0.0}, {{1.0}}), presets::brw(0.0, 1.0),
                                      AtomicMeasure::dirac(make_real({0.0})), bad),
                  std::invalid_argument);
}
