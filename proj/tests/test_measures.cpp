#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "mvpp/measures.hpp"

using namespace mvpp;

namespace {

Colour fi(int i) { return FiniteIndex{i}; }

}  // namespace

TEST_CASE("normalize scales weights proportionally") {
  AtomicMeasure mu({{fi(0), 2.0}, {fi(1), 6.0}});
  AtomicMeasure p = normalize(mu);
  CHECK(p.weight_of(fi(0)) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(p.weight_of(fi(1)) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(std::abs(p.total_mass() - 1.0) <= 1e-12);
}

TEST_CASE("normalize fixes probability measures and is idempotent") {
  AtomicMeasure d = AtomicMeasure::dirac(std::int64_t{3});
  CHECK(normalize(d).weight_of(std::int64_t{3}) == 1.0);

  std::vector<Atom> atoms;
  for (int i = 0; i < 10; ++i) atoms.push_back({fi(i), 0.3});
  AtomicMeasure u = normalize(AtomicMeasure(atoms));
  for (int i = 0; i < 10; ++i) CHECK(u.weight_of(fi(i)) == doctest::Approx(0.1).epsilon(1e-14));
  AtomicMeasure uu = normalize(u);
  for (int i = 0; i < 10; ++i) CHECK(std::abs(uu.weight_of(fi(i)) - u.weight_of(fi(i))) <= 1e-15);
}

TEST_CASE("normalize rejects the null measure") {
  CHECK_THROWS_WITH_AS(normalize(AtomicMeasure()), "cannot normalize null measure", std::invalid_argument);
}

TEST_CASE("atoms must have positive finite weight") {
  CHECK_THROWS_AS(AtomicMeasure({{fi(0), 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(AtomicMeasure({{fi(0), -1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(AtomicMeasure({{fi(0), NAN}}), std::invalid_argument);
}

TEST_CASE("duplicate atoms merge") {
  AtomicMeasure mu({{fi(2), 1.0}, {fi(2), 0.5}});
  CHECK(mu.atoms().size() == 1);
  CHECK(mu.weight_of(fi(2)) == 1.5);
  mu.add(fi(2), 0.5);
  mu.add(fi(1), 1.0);
  CHECK(mu.atoms().size() == 2);
  CHECK(mu.total_mass() == 3.0);
}

TEST_CASE("merging uses bit identity, not closeness") {
  AtomicMeasure mu({{make_real({0.0}), 1.0}, {make_real({-0.0}), 1.0}, {make_real({1e-300}), 1.0}});
  CHECK(mu.atoms().size() == 3);
}

TEST_CASE("sample_atom frequencies") {
  RngStream s = derive_stream(3, 0);
  CHECK(std::get<std::int64_t>(sample_atom(AtomicMeasure::dirac(std::int64_t{5}), s)) == 5);

  AtomicMeasure mu({{fi(0), 0.25}, {fi(1), 0.75}});
  AtomSampler sampler(mu);
  int hits = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) hits += std::get<FiniteIndex>(sampler.sample(s)).index == 1;
  CHECK(std::abs(hits / double(n) - 0.75) <= 0.01);

  // Merged duplicates: a,a with 0.125 each against b with 0.75.
  AtomicMeasure dup({{fi(0), 0.125}, {fi(1), 0.75}, {fi(0), 0.125}});
  hits = 0;
  for (int i = 0; i < n; ++i) hits += std::get<FiniteIndex>(sample_atom(dup, s)).index == 1;
  CHECK(std::abs(hits / double(n) - 0.75) <= 0.01);

  CHECK_THROWS_AS(sample_atom(AtomicMeasure(), s), std::invalid_argument);
}

TEST_CASE("theta_rescale examples") {
  std::vector<WeightedColour> xs{{std::int64_t{2}, 1.0}, {std::int64_t{4}, 0.5}};
  auto same = theta_rescale(xs, Rescaling{1.0, {0.0}});
  CHECK(std::get<std::int64_t>(same[0].colour) == 2);

  auto r = theta_rescale(xs, Rescaling{2.0, {2.0}});
  REQUIRE(r.size() == 2);
  CHECK(colour_components(r[0].colour)[0] == 0.0);
  CHECK(colour_components(r[1].colour)[0] == 1.0);
  CHECK(r[1].weight == 0.5);
}

TEST_CASE("theta_rescale of a profile centres depths") {
  const double n = 1000.0, ln = std::log(n);
  std::vector<WeightedColour> prof;
  for (std::int64_t k = 0; k < 20; ++k) prof.push_back({k, 1.0});
  auto r = theta_rescale(prof, Rescaling{std::sqrt(ln), {ln}});
  for (std::size_t k = 0; k < r.size(); ++k)
    CHECK(colour_components(r[k].colour)[0] == doctest::Approx((double(k) - ln) / std::sqrt(ln)));
}

TEST_CASE("theta_rescale rejects algebra on finite colours") {
  std::vector<WeightedColour> xs{{fi(1), 1.0}};
  CHECK(theta_rescale(xs, Rescaling{1.0, {0.0}}).size() == 1);
  CHECK_THROWS_AS(theta_rescale(xs, Rescaling{2.0, {0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(theta_rescale(xs, Rescaling{1.0, {1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(theta_rescale(xs, Rescaling{0.0, {0.0}}), std::invalid_argument);
}

TEST_CASE("theta_rescale composition law") {
  RngStream s = derive_stream(4, 0);
  std::vector<WeightedColour> xs;
  for (int i = 0; i < 50; ++i) xs.push_back({make_real({s.next_standard_normal(), s.next_standard_normal()}), 1.0});
  Rescaling r1{1.7, {0.3, -2.0}}, r2{0.4, {5.0, 1.5}};
  auto twice = theta_rescale(theta_rescale(xs, r1), r2);
  auto once = theta_rescale(xs, compose(r1, r2));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    auto a = colour_components(twice[i].colour), b = colour_components(once[i].colour);
    for (int j = 0; j < 2; ++j) CHECK(a[j] == doctest::Approx(b[j]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(compose(r1, Rescaling{1.0, {0.0}}), std::invalid_argument);
}

TEST_CASE("colour helpers") {
  CHECK(colour_kind(fi(0)) == ColourKind::Finite);
  CHECK(colour_dim(make_real({1.0, 2.0, 3.0})) == 3);
  CHECK(colour_dot(make_real({1.0, 2.0}), {0.5, 0.25}) == 1.0);
  CHECK_THROWS_AS(colour_dot(fi(0), {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_real({}), std::invalid_argument);
  CHECK_THROWS_AS(make_real({1, 2, 3, 4, 5}), std::invalid_argument);
  CHECK(colour_to_string(make_real({0.5, -1.0})) == "0.5,-1");

  std::ostringstream os;
  AtomicMeasure({{std::int64_t{1}, 0.5}}).write_csv(os);
  CHECK(os.str() == "c1,weight\n1,0.5\n");
}
