#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mvpp/kernels.hpp"
#include "mvpp/measures.hpp"
#include "mvpp/random.hpp"
#include "mvpp/trees.hpp"

namespace mvpp {

// M_n = m0 + sum_{i<=n} R_{drawn[i]}.
struct UrnTrace {
  AtomicMeasure m0;
  ReplacementKernel kernel;
  std::vector<Colour> drawn;
  // Index of the earlier draw whose replacement measure produced drawn[i] (1-based); 0 means m0.
  std::vector<std::int64_t> source;

  std::int64_t n() const { return static_cast<std::int64_t>(drawn.size()); }
  double total_mass() const { return m0.total_mass() + static_cast<double>(drawn.size()); }
};

enum class TreeEncoding {
  // Every non-source node u contributes R_{X_u}; source nodes contribute their share of m0.
  NodeReplacement,
  // Leaves of a complete binary tree contribute R_{X_v}; the source leaf contributes m0.
  LeafReplacement,
  // Leaves are balls of mass 1/kappa with colour X_v.
  LeafAtoms,
  // Every node is a label X_u of a branching Markov chain started from a label drawn from m0.
  NodeLabels,
};

struct LabelledTree {
  GrowingTree tree{TreeKind::Recursive};
  std::vector<Colour> labels;
  // Source nodes carry no colour of their own and stand for a part of m0.
  std::vector<char> source;
  TreeEncoding encoding = TreeEncoding::NodeReplacement;
  AtomicMeasure m0;
  ReplacementKernel kernel;
  double source_weight = 1.0;

  std::int64_t steps() const;
};

UrnTrace mvpp_direct(const AtomicMeasure& m0, const ReplacementKernel& k, std::int64_t n, RngStream& s);
LabelledTree mvpp_via_rrt(const AtomicMeasure& m0, const ReplacementKernel& k, std::int64_t n, RngStream& s);
LabelledTree mvpp_via_bst(const AtomicMeasure& m0, const ReplacementKernel& k, std::int64_t n, RngStream& s);
std::vector<LabelledTree> mvpp_forest(const AtomicMeasure& m0, const ReplacementKernel& k, std::int64_t n,
                                      RngStream& s);
LabelledTree mvpp_kdiscrete(const AtomicMeasure& m0, const kernel::KDiscrete& k, std::int64_t n, RngStream& s);
// Branching Markov chain on an RRT: root label ~ m0, each new node gets parent label moved by the kernel.
LabelledTree sbmc_on_rrt(const AtomicMeasure& m0, const ReplacementKernel& k, std::int64_t n, RngStream& s);

// Number of draws contributed to each forest tree (excludes the root).
std::vector<std::int64_t> forest_sizes(const std::vector<LabelledTree>& forest);

// Materialised urn measure; kernels must be atomic (DColour, KDiscrete, lattice table walks, MMInfQueue).
AtomicMeasure urn_measure(const UrnTrace& t);
AtomicMeasure urn_measure(const LabelledTree& t);
// Prefix of the trace after n steps.
AtomicMeasure urn_measure(const UrnTrace& t, std::int64_t n);

// Two conditionally independent draws from the normalised urn measure.
std::pair<Colour, Colour> sample_pair(const UrnTrace& t, RngStream& s);
std::pair<Colour, Colour> sample_pair(const UrnTrace& t, std::int64_t n, RngStream& s);
std::pair<Colour, Colour> sample_pair(const LabelledTree& t, RngStream& s);
Colour sample_urn(const UrnTrace& t, std::int64_t n, RngStream& s);
Colour sample_urn(const LabelledTree& t, RngStream& s);

struct TheoremPoint {
  std::int64_t n = 0;
  std::size_t samples = 0;
  double ks = 0.0;
  double decorrelation = 0.0;
  double mean = 0.0;
  double variance = 0.0;
};

struct TheoremCheckOptions {
  std::vector<std::int64_t> n_grid;
  std::size_t replicas = 100;
  std::size_t pairs_per_replica = 10;
  // Projection direction for multi-dimensional colours.
  std::vector<double> direction{1.0};
  std::uint64_t root_seed = 0;
  std::uint64_t stream_offset = 0;
  // Number of reference draws when the plan has no closed-form limit law.
  std::size_t reference_draws = 100000;
};

struct TheoremReport {
  std::vector<TheoremPoint> points;
  // Pooled rescaled first coordinates at the largest n, sorted.
  std::vector<double> rescaled_samples;
  // Same, for every n of the grid.
  std::vector<std::vector<double>> samples_per_n;
};

// Pooled-marginal KS against the plan's limit and the pair decorrelation, per n.
TheoremReport verify_main_theorem(const ReplacementKernel& k, const RenormalisationPlan& plan, const AtomicMeasure& m0,
                                  const TheoremCheckOptions& opt);

// Runs fn(i) for i in [0, count) on MVPP_THREADS workers; fn must only touch slot i.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);
std::size_t worker_count();

}  // namespace mvpp
