#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

#include "mvpp/kernels.hpp"
#include "mvpp/measures.hpp"

namespace mvpp {

using Outcome = std::vector<double>;

// Finite law over outcome vectors; probabilities are doubles.
class ExactLaw {
 public:
  void add(const Outcome& o, double p);
  double probability(const Outcome& o) const;
  double total() const;
  const std::map<Outcome, double>& table() const { return table_; }
  std::size_t size() const { return table_.size(); }
  // Marginal of one coordinate.
  ExactLaw marginal(std::size_t coordinate) const;
  void write_csv(std::ostream& os) const;

 private:
  std::map<Outcome, double> table_;
};

double max_abs_diff(const ExactLaw& a, const ExactLaw& b);
double total_variation(const ExactLaw& a, const ExactLaw& b);

enum class UrnDynamics { WithReplacement, WithoutReplacement };

// Law of the composition after n steps by enumeration of draw sequences. DColour compositions are
// dense weight vectors over the d colours; KDiscrete lattice compositions are flattened
// (colour, weight) pairs in increasing colour order.
ExactLaw exact_urn_law(const AtomicMeasure& m0, const ReplacementKernel& k, int n,
                       UrnDynamics dynamics = UrnDynamics::WithReplacement);

// Law of the leaf-label composition of the kappa-ary coupling, by enumerating leaf choices and orderings.
ExactLaw exact_kdiscrete_tree_law(const AtomicMeasure& m0, const kernel::KDiscrete& k, int n);

// (|U|, |V|, |U^V|) for independent uniform nodes of RRT_n (n+1 nodes), enumerating attachment histories.
ExactLaw exact_rrt_joint_depths(int n, bool non_root_only = false);
// (|u|-1, |v|-1, |u^v| - [u, v comparable]) over non-root pairs of RRT_n.
ExactLaw exact_rrt_transport_law(int n);

struct BstDepthLaws {
  ExactLaw depths;
  ExactLaw left_depths;
};
// BST with n nodes grown by uniform free-slot insertion.
BstDepthLaws exact_bst_joint_depths(int n);

// Law of the internal-node counts of the kappa root subtrees of the kappa-ary tree with n internal nodes.
ExactLaw exact_kary_subtree_law(int n, int kappa);
// Closed form multinomial(n-1; n_j) prod H(n_j) / H(n), H(m) = prod_{i<m} (1 + i(kappa-1)).
ExactLaw closed_form_kary(int n, int kappa);
// Dirichlet-multinomial form with parameter 1/(kappa-1).
ExactLaw dirichlet_form_kary(int n, int kappa);
// The shape-count expression multinomial * prod K(n_j)-type Gamma ratios, left unnormalised.
ExactLaw shape_count_form_kary(int n, int kappa);
// Number of kappa-ary trees with m internal nodes, binom(kappa m, m)/((kappa-1)m+1).
double kary_tree_count(int m, int kappa);
// Same count by explicit enumeration of shapes.
std::int64_t enumerate_kary_tree_count(int m, int kappa);

struct CouplingLaws {
  ExactLaw direct;
  ExactLaw rrt;
  ExactLaw bst;
};
// Composition laws of the direct urn, the RRT coupling and the BST coupling for a 2-colour kernel.
CouplingLaws exact_coupling_law(const AtomicMeasure& m0, const kernel::DColour& k, int n);

}  // namespace mvpp
