#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "mvpp/oracle.hpp"

using namespace mvpp;

namespace {

Colour fi(int i) { return FiniteIndex{i}; }

const kernel::DColour kIdentity{{{1.0, 0.0}, {0.0, 1.0}}};
const kernel::DColour kMixing{{{0.5, 0.5}, {0.25, 0.75}}};

}  // namespace

TEST_CASE("identity urn laws") {
  // Half-weight start: the first draw is fair, the second follows the updated 1.5 : 0.5 split.
  ExactLaw half = exact_urn_law(AtomicMeasure({{fi(0), 0.5}, {fi(1), 0.5}}), kIdentity, 2);
  CHECK(half.size() == 3);
  CHECK(half.probability({2.5, 0.5}) == doctest::Approx(3.0 / 8).epsilon(1e-14));
  CHECK(half.probability({1.5, 1.5}) == doctest::Approx(1.0 / 4).epsilon(1e-14));
  CHECK(half.probability({0.5, 2.5}) == doctest::Approx(3.0 / 8).epsilon(1e-14));

  ExactLaw unit = exact_urn_law(AtomicMeasure({{fi(0), 1.0}, {fi(1), 1.0}}), kIdentity, 2);
  for (const auto& [o, p] : unit.table()) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-14));
}

TEST_CASE("urn law base case, normalisation and balance") {
  AtomicMeasure m0({{fi(0), 0.3}, {fi(1), 0.7}});
  ExactLaw zero = exact_urn_law(m0, kMixing, 0);
  CHECK(zero.size() == 1);
  CHECK(zero.probability({0.3, 0.7}) == 1.0);
  for (int n = 1; n <= 6; ++n) {
    ExactLaw law = exact_urn_law(m0, kMixing, n);
    CHECK(law.total() == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& [o, p] : law.table()) CHECK(o[0] + o[1] == doctest::Approx(1.0 + n).epsilon(1e-9));
  }
  CHECK_THROWS_AS(exact_urn_law(m0, kMixing, 9), std::length_error);
}

TEST_CASE("RRT joint depths") {
  ExactLaw one = exact_rrt_joint_depths(1);
  CHECK(one.probability({0, 0, 0}) == doctest::Approx(0.25));
  CHECK(one.probability({0, 1, 0}) == doctest::Approx(0.25));
  CHECK(one.probability({1, 0, 0}) == doctest::Approx(0.25));
  CHECK(one.probability({1, 1, 1}) == doctest::Approx(0.25));

  // Star: 7 of 9 ordered pairs meet at the root. Path: 5 of 9. Each history has probability 1/2.
  ExactLaw two = exact_rrt_joint_depths(2);
  CHECK(two.marginal(2).probability({0}) == doctest::Approx((7.0 / 9 + 5.0 / 9) / 2).epsilon(1e-14));

  // Depth of one uniform node at n = 3 by a separate loop over parent sequences.
  std::vector<double> pmf(4, 0.0);
  for (int p2 = 0; p2 < 2; ++p2)
    for (int p3 = 0; p3 < 3; ++p3) {
      int parent[4] = {-1, 0, p2, p3};
      for (int u = 0; u < 4; ++u) {
        int d = 0;
        for (int v = u; parent[v] >= 0; v = parent[v]) ++d;
        pmf[static_cast<std::size_t>(d)] += 1.0 / 6 / 4;
      }
    }
  ExactLaw m = exact_rrt_joint_depths(3).marginal(0);
  for (int d = 0; d < 4; ++d) CHECK(m.probability({double(d)}) == doctest::Approx(pmf[static_cast<std::size_t>(d)]).epsilon(1e-14));
  CHECK_THROWS_AS(exact_rrt_joint_depths(9), std::length_error);
}

TEST_CASE("BST joint depths") {
  CHECK(exact_bst_joint_depths(1).depths.probability({0, 0, 0}) == 1.0);
  ExactLaw lca = exact_bst_joint_depths(2).depths.marginal(2);
  CHECK(lca.probability({0}) == doctest::Approx(0.75));
  CHECK(lca.probability({1}) == doctest::Approx(0.25));
  for (int n = 1; n <= 6; ++n) {
    auto b = exact_bst_joint_depths(n);
    CHECK(b.depths.total() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.left_depths.total() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("left-depth transport from RRT to BST") {
  CHECK(max_abs_diff(exact_rrt_transport_law(3), exact_bst_joint_depths(3).left_depths) <= 1e-12);
  CHECK(max_abs_diff(exact_rrt_transport_law(5), exact_bst_joint_depths(5).left_depths) <= 1e-12);
}

TEST_CASE("kary tree counts") {
  CHECK(kary_tree_count(2, 2) == doctest::Approx(2.0));
  CHECK(enumerate_kary_tree_count(2, 2) == 2);
  CHECK(kary_tree_count(5, 3) == doctest::Approx(273.0));
  CHECK(enumerate_kary_tree_count(5, 3) == 273);
  const std::int64_t catalan[] = {1, 1, 2, 5, 14, 42, 132, 429};
  for (int m = 0; m < 8; ++m) {
    CHECK(enumerate_kary_tree_count(m, 2) == catalan[m]);
    CHECK(kary_tree_count(m, 2) == doctest::Approx(double(catalan[m])));
  }
}

TEST_CASE("kary root-subtree laws") {
  ExactLaw two = exact_kary_subtree_law(2, 2);
  CHECK(two.size() == 2);
  CHECK(two.probability({1, 0}) == doctest::Approx(0.5));
  CHECK(two.probability({0, 1}) == doctest::Approx(0.5));
  for (auto [n, kappa] : {std::pair{4, 2}, std::pair{3, 3}, std::pair{6, 2}, std::pair{4, 4}}) {
    ExactLaw e = exact_kary_subtree_law(n, kappa);
    CHECK(max_abs_diff(e, closed_form_kary(n, kappa)) <= 1e-10);
    CHECK(max_abs_diff(e, dirichlet_form_kary(n, kappa)) <= 1e-10);
  }
  CHECK_THROWS_AS(exact_kary_subtree_law(13, 2), std::length_error);
}

TEST_CASE("the shape-count expression does not match the enumeration") {
  // Kept as a regression marker: the corrected closed form above is the one that agrees.
  CHECK(max_abs_diff(exact_kary_subtree_law(4, 2), shape_count_form_kary(4, 2)) > 0.01);
  CHECK(max_abs_diff(exact_kary_subtree_law(3, 3), shape_count_form_kary(3, 3)) > 0.01);
}

TEST_CASE("kdiscrete urn and tree enumerations agree") {
  // Tree leaves are consumed when split, so the matching urn draws without replacement.
  kernel::KDiscrete kd{2, {0, 1}, {}};
  AtomicMeasure m0 = AtomicMeasure::dirac(std::int64_t{0});
  for (int n = 0; n <= 3; ++n) CHECK(max_abs_diff(exact_kdiscrete_tree_law(m0, kd, n), exact_urn_law(m0, kd, n, UrnDynamics::WithoutReplacement)) <= 1e-12);
  kernel::KDiscrete fin{3, {}, {{0, 0, 1}, {1, 2, 2}, {0, 1, 2}}};
  AtomicMeasure f0({{fi(0), 1.0 / 3}, {fi(2), 1.0 / 3}});
  CHECK(max_abs_diff(exact_kdiscrete_tree_law(f0, fin, 3), exact_urn_law(f0, fin, 3, UrnDynamics::WithoutReplacement)) <= 1e-12);
}

TEST_CASE("coupling laws agree") {
  AtomicMeasure m0({{fi(0), 0.4}, {fi(1), 0.6}});
  for (int n = 0; n <= 3; ++n) {
    CouplingLaws c = exact_coupling_law(m0, kMixing, n);
    CHECK(c.direct.total() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(max_abs_diff(c.direct, c.rrt) <= 1e-12);
    CHECK(max_abs_diff(c.direct, c.bst) <= 1e-12);
    CHECK(max_abs_diff(c.direct, exact_urn_law(m0, kMixing, n)) <= 1e-12);
  }
  CHECK_THROWS_AS(exact_coupling_law(m0, kMixing, 4), std::length_error);
}

TEST_CASE("law helpers") {
  ExactLaw a, b;
  a.add({0}, 0.5);
  a.add({1}, 0.5);
  b.add({1}, 1.0);
  CHECK(total_variation(a, b) == doctest::Approx(0.5));
  CHECK(max_abs_diff(a, b) == doctest::Approx(0.5));
  a.add({1.0 + 1e-12}, 0.0);
  CHECK(a.size() == 2);
  std::ostringstream os;
  b.write_csv(os);
  CHECK(os.str() == "outcome,probability\n1,1\n");
}
