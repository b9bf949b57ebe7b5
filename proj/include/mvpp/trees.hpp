#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "mvpp/measures.hpp"
#include "mvpp/random.hpp"

namespace mvpp {

using NodeId = std::int32_t;
inline constexpr NodeId kNone = -1;

enum class TreeKind { Recursive, IncompleteBinary, KaryComplete };

struct Node {
  NodeId parent = kNone;
  int slot = 0;
  int depth = 0;
  // Recursive: children in insertion order. Binary/Kary: indexed by slot, kNone if absent.
  std::vector<NodeId> children;
};

// Arena tree. Node ids equal insertion rank, so every parent id is smaller than its children's.
class GrowingTree {
 public:
  explicit GrowingTree(TreeKind kind, int kappa = 2);

  TreeKind kind() const { return kind_; }
  int kappa() const { return kappa_; }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  const Node& node(NodeId u) const;
  NodeId parent(NodeId u) const { return node(u).parent; }
  int depth(NodeId u) const { return node(u).depth; }
  int slot(NodeId u) const { return node(u).slot; }
  const std::vector<NodeId>& roots() const { return roots_; }

  NodeId add_root();
  // Recursive kind: slot is ignored and the child is appended last.
  NodeId add_child(NodeId parent, int slot = 0);
  NodeId child_at(NodeId u, int slot) const;
  std::size_t child_count(NodeId u) const;
  std::vector<NodeId> children(NodeId u) const;
  bool is_leaf(NodeId u) const { return child_count(u) == 0; }

  // Kary kind: give leaf u its kappa children and update the leaf list.
  void expand_leaf(NodeId u);
  // Kary kind: maintained list of current leaves (order is an implementation detail).
  const std::vector<NodeId>& leaf_list() const { return leaf_list_; }
  std::vector<NodeId> leaves() const;

  // Swap the children stored in slots 0 and 1 of u (binary kinds only).
  void swap_children(NodeId u);

  void check_valid(NodeId u) const;
  void dump_csv(std::ostream& os) const;

 private:
  TreeKind kind_;
  int kappa_;
  std::vector<Node> nodes_;
  std::vector<NodeId> roots_;
  std::vector<NodeId> leaf_list_;
  std::vector<std::int32_t> leaf_pos_;
};

struct EnrichedNodeData {
  // BST: inserted key per node. Kary: unused.
  std::vector<double> key;
  // Interval [first, second) attached to each node; children partition it.
  std::vector<std::pair<double, double>> interval;
  // Split fractions per internal node in slot order (empty for Kary leaves).
  std::vector<std::vector<double>> split;
};

GrowingTree grow_rrt(std::int64_t n, RngStream& s);
GrowingTree grow_bst_leaf(std::int64_t n, RngStream& s);
// Permutation model; larger keys go to slot 0.
std::pair<GrowingTree, EnrichedNodeData> grow_bst_permutation(std::int64_t n, RngStream& s);
std::pair<GrowingTree, EnrichedNodeData> grow_bst_from_keys(const std::vector<double>& keys);
GrowingTree grow_kary(std::int64_t n, int kappa, RngStream& s);
std::pair<GrowingTree, EnrichedNodeData> grow_kary_dirichlet(std::int64_t n, int kappa, RngStream& s);

GrowingTree complete(const GrowingTree& t);

struct RotationResult {
  GrowingTree tree;
  // image[u] is the node of `tree` matched with u; kNone where undefined.
  std::vector<NodeId> image;
};
// Planar (Recursive) tree with >= 2 nodes -> incomplete binary tree.
RotationResult rotation(const GrowingTree& t);
// Incomplete binary tree -> planar tree with one more node; image maps binary ids to planar ids.
RotationResult rotation_inverse(const GrowingTree& b);

int depth(const GrowingTree& t, NodeId u);
int left_depth(const GrowingTree& t, NodeId u);
NodeId lca(const GrowingTree& t, NodeId u, NodeId v);
bool is_ancestor(const GrowingTree& t, NodeId a, NodeId u);
std::vector<int> word(const GrowingTree& t, NodeId u);
NodeId find_word(const GrowingTree& t, const std::vector<int>& w);
std::vector<std::int64_t> subtree_sizes(const GrowingTree& t);

// Prof_n: atoms at depths k with weight (#nodes at depth k)/n, n = size-1.
AtomicMeasure profile(const GrowingTree& t);
std::vector<std::int64_t> depth_counts(const GrowingTree& t);

// Exchange the subtrees rooted at u0 and u1; identity if u is absent.
GrowingTree swap_subtrees(const GrowingTree& t, const std::vector<int>& u);

NodeId sample_uniform_node(const GrowingTree& t, RngStream& s);
NodeId sample_uniform_leaf(const GrowingTree& t, RngStream& s);

// Canonical string of the (planar or slot-tagged) shape.
std::string shape_code(const GrowingTree& t);

// All planar trees / incomplete binary trees with exactly `nodes` nodes.
std::vector<GrowingTree> enumerate_planar_trees(int nodes);
std::vector<GrowingTree> enumerate_binary_trees(int nodes);

}  // namespace mvpp
