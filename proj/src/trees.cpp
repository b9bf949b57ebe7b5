#include "mvpp/trees.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>

namespace mvpp {

GrowingTree::GrowingTree(TreeKind kind, int kappa) : kind_(kind), kappa_(kappa) {
  if (kind == TreeKind::IncompleteBinary) kappa_ = 2;
  if (kind == TreeKind::KaryComplete && kappa < 2) throw std::invalid_argument("kappa must be at least 2");
}

const Node& GrowingTree::node(NodeId u) const {
  check_valid(u);
  return nodes_[static_cast<std::size_t>(u)];
}

void GrowingTree::check_valid(NodeId u) const {
  if (u < 0 || static_cast<std::size_t>(u) >= nodes_.size())
    throw std::out_of_range("node id " + std::to_string(u) + " is not in the tree");
}

NodeId GrowingTree::add_root() {
  auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(Node{kNone, static_cast<int>(roots_.size()), 0, {}});
  roots_.push_back(id);
  if (kind_ == TreeKind::KaryComplete) {
    leaf_pos_.push_back(static_cast<std::int32_t>(leaf_list_.size()));
    leaf_list_.push_back(id);
  } else {
    leaf_pos_.push_back(-1);
  }
  return id;
}

NodeId GrowingTree::add_child(NodeId p, int slot) {
  check_valid(p);
  auto id = static_cast<NodeId>(nodes_.size());
  auto& parent = nodes_[static_cast<std::size_t>(p)];
  int d = parent.depth + 1;
  if (kind_ == TreeKind::Recursive) {
    slot = static_cast<int>(parent.children.size());
    parent.children.push_back(id);
  } else {
    if (slot < 0 || slot >= kappa_) throw std::invalid_argument("slot out of range");
    if (parent.children.empty()) parent.children.assign(static_cast<std::size_t>(kappa_), kNone);
    if (parent.children[static_cast<std::size_t>(slot)] != kNone)
      throw std::invalid_argument("slot " + std::to_string(slot) + " of node " + std::to_string(p) + " is occupied");
    parent.children[static_cast<std::size_t>(slot)] = id;
  }
  nodes_.push_back(Node{p, slot, d, {}});
  leaf_pos_.push_back(-1);
  return id;
}

NodeId GrowingTree::child_at(NodeId u, int slot) const {
  const auto& c = node(u).children;
  if (slot < 0 || static_cast<std::size_t>(slot) >= c.size()) return kNone;
  return c[static_cast<std::size_t>(slot)];
}

std::size_t GrowingTree::child_count(NodeId u) const {
  const auto& c = node(u).children;
  return static_cast<std::size_t>(std::count_if(c.begin(), c.end(), [](NodeId v) { return v != kNone; }));
}

std::vector<NodeId> GrowingTree::children(NodeId u) const {
  std::vector<NodeId> out;
  for (NodeId v : node(u).children)
    if (v != kNone) out.push_back(v);
  return out;
}

void GrowingTree::expand_leaf(NodeId u) {
  if (kind_ != TreeKind::KaryComplete) throw std::logic_error("expand_leaf needs a complete kary tree");
  check_valid(u);
  std::int32_t pos = leaf_pos_[static_cast<std::size_t>(u)];
  if (pos < 0) throw std::invalid_argument("node " + std::to_string(u) + " is not a leaf");
  NodeId last = leaf_list_.back();
  leaf_list_[static_cast<std::size_t>(pos)] = last;
  leaf_pos_[static_cast<std::size_t>(last)] = pos;
  leaf_list_.pop_back();
  leaf_pos_[static_cast<std::size_t>(u)] = -1;
  for (int j = 0; j < kappa_; ++j) {
    NodeId c = add_child(u, j);
    leaf_pos_[static_cast<std::size_t>(c)] = static_cast<std::int32_t>(leaf_list_.size());
    leaf_list_.push_back(c);
  }
}

std::vector<NodeId> GrowingTree::leaves() const {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (is_leaf(static_cast<NodeId>(i))) out.push_back(static_cast<NodeId>(i));
  return out;
}

void GrowingTree::swap_children(NodeId u) {
  if (kind_ == TreeKind::Recursive) throw std::logic_error("swap_children needs a binary tree");
  check_valid(u);
  auto& c = nodes_[static_cast<std::size_t>(u)].children;
  if (c.empty()) return;
  std::swap(c[0], c[1]);
  for (int j = 0; j < 2; ++j)
    if (c[static_cast<std::size_t>(j)] != kNone) nodes_[static_cast<std::size_t>(c[static_cast<std::size_t>(j)])].slot = j;
}

void GrowingTree::dump_csv(std::ostream& os) const {
  os << "node_id,parent_id,slot,depth\n";
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& nd = nodes_[i];
    os << i << "," << nd.parent << "," << nd.slot << "," << nd.depth << "\n";
  }
}

GrowingTree grow_rrt(std::int64_t n, RngStream& s) {
  if (n < 0) throw std::invalid_argument("grow_rrt: n must be non-negative");
  GrowingTree t(TreeKind::Recursive);
  t.add_root();
  for (std::int64_t k = 1; k <= n; ++k) t.add_child(static_cast<NodeId>(s.next_below(static_cast<std::uint64_t>(k))));
  return t;
}

GrowingTree grow_bst_leaf(std::int64_t n, RngStream& s) {
  if (n < 0) throw std::invalid_argument("grow_bst_leaf: n must be non-negative");
  GrowingTree t(TreeKind::IncompleteBinary);
  if (n == 0) return t;
  t.add_root();
  std::vector<std::pair<NodeId, int>> free_slots{{0, 0}, {0, 1}};
  for (std::int64_t k = 1; k < n; ++k) {
    auto i = static_cast<std::size_t>(s.next_below(free_slots.size()));
    auto [p, slot] = free_slots[i];
    free_slots[i] = free_slots.back();
    free_slots.pop_back();
    NodeId c = t.add_child(p, slot);
    free_slots.emplace_back(c, 0);
    free_slots.emplace_back(c, 1);
  }
  return t;
}

std::pair<GrowingTree, EnrichedNodeData> grow_bst_from_keys(const std::vector<double>& keys) {
  GrowingTree t(TreeKind::IncompleteBinary);
  EnrichedNodeData e;
  for (double x : keys) {
    if (t.empty()) {
      t.add_root();
      e.key.push_back(x);
      e.interval.emplace_back(0.0, 1.0);
      continue;
    }
    NodeId u = 0;
    double lo = 0.0, hi = 1.0;
    while (true) {
      double k = e.key[static_cast<std::size_t>(u)];
      if (x == k) throw std::invalid_argument("grow_bst_from_keys: keys must be distinct");
      // Larger keys descend into slot 0.
      int slot = x > k ? 0 : 1;
      if (slot == 0)
        lo = k;
      else
        hi = k;
      NodeId c = t.child_at(u, slot);
      if (c == kNone) {
        c = t.add_child(u, slot);
        e.key.push_back(x);
        e.interval.emplace_back(lo, hi);
        break;
      }
      u = c;
    }
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto [lo, hi] = e.interval[i];
    double k = e.key[i];
    e.split.push_back({(hi - k) / (hi - lo), (k - lo) / (hi - lo)});
  }
  return {std::move(t), std::move(e)};
}

std::pair<GrowingTree, EnrichedNodeData> grow_bst_permutation(std::int64_t n, RngStream& s) {
  if (n < 1) throw std::invalid_argument("grow_bst_permutation: n must be at least 1");
  std::vector<double> keys(static_cast<std::size_t>(n));
  for (double& k : keys) k = s.next_uniform();
  return grow_bst_from_keys(keys);
}

GrowingTree grow_kary(std::int64_t n, int kappa, RngStream& s) {
  if (kappa < 2) throw std::invalid_argument("grow_kary: kappa must be at least 2");
  if (n < 0) throw std::invalid_argument("grow_kary: n must be non-negative");
  GrowingTree t(TreeKind::KaryComplete, kappa);
  t.add_root();
  for (std::int64_t k = 0; k < n; ++k) {
    const auto& leaves = t.leaf_list();
    t.expand_leaf(leaves[static_cast<std::size_t>(s.next_below(leaves.size()))]);
  }
  return t;
}

std::pair<GrowingTree, EnrichedNodeData> grow_kary_dirichlet(std::int64_t n, int kappa, RngStream& s) {
  if (kappa < 2) throw std::invalid_argument("grow_kary_dirichlet: kappa must be at least 2");
  if (n < 0) throw std::invalid_argument("grow_kary_dirichlet: n must be non-negative");
  GrowingTree t(TreeKind::KaryComplete, kappa);
  EnrichedNodeData e;
  t.add_root();
  e.interval.emplace_back(0.0, 1.0);
  e.split.emplace_back();
  const std::vector<double> alpha(static_cast<std::size_t>(kappa), 1.0 / (kappa - 1));
  for (std::int64_t k = 0; k < n; ++k) {
    double v = s.next_uniform();
    NodeId u = 0;
    while (!t.is_leaf(u)) {
      const auto& sp = e.split[static_cast<std::size_t>(u)];
      double lo = e.interval[static_cast<std::size_t>(u)].first;
      double width = e.interval[static_cast<std::size_t>(u)].second - lo;
      int j = 0;
      double acc = lo + sp[0] * width;
      while (j + 1 < kappa && v >= acc) {
        ++j;
        acc += sp[static_cast<std::size_t>(j)] * width;
      }
      u = t.child_at(u, j);
    }
    auto split = s.next_dirichlet(alpha);
    auto [lo, hi] = e.interval[static_cast<std::size_t>(u)];
    e.split[static_cast<std::size_t>(u)] = split;
    t.expand_leaf(u);
    double a = lo;
    for (int j = 0; j < kappa; ++j) {
      double b = j + 1 == kappa ? hi : a + split[static_cast<std::size_t>(j)] * (hi - lo);
      e.interval.emplace_back(a, b);
      e.split.emplace_back();
      a = b;
    }
  }
  return {std::move(t), std::move(e)};
}

GrowingTree complete(const GrowingTree& t) {
  if (t.kind() != TreeKind::IncompleteBinary) throw std::invalid_argument("complete: needs an incomplete binary tree");
  GrowingTree c(TreeKind::KaryComplete, 2);
  if (t.empty()) return c;
  // Original nodes keep their ids; added leaves follow.
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto u = static_cast<NodeId>(i);
    if (t.parent(u) == kNone)
      c.add_root();
    else
      c.add_child(t.parent(u), t.slot(u));
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto u = static_cast<NodeId>(i);
    for (int j = 0; j < 2; ++j)
      if (t.child_at(u, j) == kNone) c.add_child(u, j);
  }
  return c;
}

RotationResult rotation(const GrowingTree& t) {
  if (t.kind() != TreeKind::Recursive) throw std::invalid_argument("rotation: needs a planar tree");
  if (t.size() < 2) throw std::invalid_argument("rotation: planar tree needs at least 2 nodes");
  if (t.roots().size() != 1) throw std::invalid_argument("rotation: needs a single root");
  RotationResult r{GrowingTree(TreeKind::IncompleteBinary), std::vector<NodeId>(t.size(), kNone)};
  std::deque<NodeId> queue{t.roots()[0]};
  while (!queue.empty()) {
    NodeId u = queue.front();
    queue.pop_front();
    NodeId prev = kNone;
    for (NodeId v : t.node(u).children) {
      if (prev == kNone) {
        if (t.parent(u) == kNone)
          r.image[static_cast<std::size_t>(v)] = r.tree.add_root();
        else
          r.image[static_cast<std::size_t>(v)] = r.tree.add_child(r.image[static_cast<std::size_t>(u)], 0);
      } else {
        r.image[static_cast<std::size_t>(v)] = r.tree.add_child(r.image[static_cast<std::size_t>(prev)], 1);
      }
      prev = v;
      queue.push_back(v);
    }
  }
  return r;
}

RotationResult rotation_inverse(const GrowingTree& b) {
  if (b.kind() != TreeKind::IncompleteBinary) throw std::invalid_argument("rotation_inverse: needs a binary tree");
  RotationResult r{GrowingTree(TreeKind::Recursive), std::vector<NodeId>(b.size(), kNone)};
  NodeId root = r.tree.add_root();
  if (b.empty()) return r;
  // Each entry: planar parent and the binary node that becomes its first child.
  std::deque<std::pair<NodeId, NodeId>> queue{{root, b.roots()[0]}};
  while (!queue.empty()) {
    auto [p, x] = queue.front();
    queue.pop_front();
    for (NodeId y = x; y != kNone; y = b.child_at(y, 1)) {
      NodeId v = r.tree.add_child(p);
      r.image[static_cast<std::size_t>(y)] = v;
      NodeId first = b.child_at(y, 0);
      if (first != kNone) queue.emplace_back(v, first);
    }
  }
  return r;
}

int depth(const GrowingTree& t, NodeId u) { return t.depth(u); }

int left_depth(const GrowingTree& t, NodeId u) {
  if (t.kind() == TreeKind::Recursive) throw std::invalid_argument("left_depth: needs a binary tree");
  t.check_valid(u);
  int d = 0;
  for (NodeId v = u; t.parent(v) != kNone; v = t.parent(v))
    if (t.slot(v) == 0) ++d;
  return d;
}

NodeId lca(const GrowingTree& t, NodeId u, NodeId v) {
  t.check_valid(u);
  t.check_valid(v);
  while (t.depth(u) > t.depth(v)) u = t.parent(u);
  while (t.depth(v) > t.depth(u)) v = t.parent(v);
  while (u != v) {
    u = t.parent(u);
    v = t.parent(v);
    if (u == kNone || v == kNone) throw std::invalid_argument("lca: nodes lie in different trees");
  }
  return u;
}

bool is_ancestor(const GrowingTree& t, NodeId a, NodeId u) {
  t.check_valid(a);
  t.check_valid(u);
  while (u != kNone && t.depth(u) > t.depth(a)) u = t.parent(u);
  return u == a;
}

std::vector<int> word(const GrowingTree& t, NodeId u) {
  t.check_valid(u);
  std::vector<int> w;
  for (NodeId v = u; t.parent(v) != kNone; v = t.parent(v)) w.push_back(t.slot(v));
  std::reverse(w.begin(), w.end());
  return w;
}

NodeId find_word(const GrowingTree& t, const std::vector<int>& w) {
  if (t.empty()) return kNone;
  NodeId u = t.roots()[0];
  for (int letter : w) {
    u = t.child_at(u, letter);
    if (u == kNone) return kNone;
  }
  return u;
}

std::vector<std::int64_t> subtree_sizes(const GrowingTree& t) {
  std::vector<std::int64_t> s(t.size(), 1);
  for (std::size_t i = t.size(); i-- > 0;) {
    NodeId p = t.parent(static_cast<NodeId>(i));
    if (p != kNone) s[static_cast<std::size_t>(p)] += s[i];
  }
  return s;
}

std::vector<std::int64_t> depth_counts(const GrowingTree& t) {
  std::vector<std::int64_t> c;
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto d = static_cast<std::size_t>(t.depth(static_cast<NodeId>(i)));
    if (c.size() <= d) c.resize(d + 1, 0);
    ++c[d];
  }
  return c;
}

AtomicMeasure profile(const GrowingTree& t) {
  if (t.size() < 2) throw std::invalid_argument("profile: tree needs at least one growth step");
  auto c = depth_counts(t);
  double n = static_cast<double>(t.size() - 1);
  std::vector<Atom> atoms;
  for (std::size_t k = 0; k < c.size(); ++k)
    if (c[k] > 0) atoms.push_back({Colour{static_cast<std::int64_t>(k)}, static_cast<double>(c[k]) / n});
  return AtomicMeasure(atoms);
}

GrowingTree swap_subtrees(const GrowingTree& t, const std::vector<int>& u) {
  if (t.kind() == TreeKind::Recursive) throw std::invalid_argument("swap_subtrees: needs a binary tree");
  GrowingTree out = t;
  NodeId v = find_word(t, u);
  if (v != kNone) out.swap_children(v);
  return out;
}

NodeId sample_uniform_node(const GrowingTree& t, RngStream& s) {
  if (t.empty()) throw std::invalid_argument("sample_uniform_node: empty tree");
  return static_cast<NodeId>(s.next_below(t.size()));
}

NodeId sample_uniform_leaf(const GrowingTree& t, RngStream& s) {
  if (t.empty()) throw std::invalid_argument("sample_uniform_leaf: empty tree");
  if (t.kind() == TreeKind::KaryComplete) {
    const auto& l = t.leaf_list();
    return l[static_cast<std::size_t>(s.next_below(l.size()))];
  }
  auto l = t.leaves();
  return l[static_cast<std::size_t>(s.next_below(l.size()))];
}

namespace {

void shape_rec(const GrowingTree& t, NodeId u, std::string& out) {
  out.push_back('(');
  if (t.kind() == TreeKind::IncompleteBinary) {
    for (int j = 0; j < 2; ++j) {
      NodeId c = t.child_at(u, j);
      if (c == kNone)
        out.push_back('.');
      else
        shape_rec(t, c, out);
    }
  } else {
    for (NodeId c : t.children(u)) shape_rec(t, c, out);
  }
  out.push_back(')');
}

struct PlanarShape {
  std::vector<std::shared_ptr<const PlanarShape>> kids;
};
using PlanarPtr = std::shared_ptr<const PlanarShape>;

struct BinaryShape {
  std::shared_ptr<const BinaryShape> left, right;
};
using BinaryPtr = std::shared_ptr<const BinaryShape>;


// Ordered forests with exactly k nodes.
std::vector<std::vector<PlanarPtr>> forests(int k, const std::function<std::vector<PlanarPtr>(int)>& trees) {
  if (k == 0) return {{}};
  std::vector<std::vector<PlanarPtr>> out;
  for (int first = 1; first <= k; ++first)
    for (const auto& head : trees(first))
      for (auto tail : forests(k - first, trees)) {
        tail.insert(tail.begin(), head);
        out.push_back(std::move(tail));
      }
  return out;
}

std::vector<PlanarPtr> planar_shapes(int k) {
  std::vector<PlanarPtr> out;
  if (k < 1) return out;
  for (auto f : forests(k - 1, planar_shapes)) {
    auto s = std::make_shared<PlanarShape>();
    s->kids = std::move(f);
    out.push_back(s);
  }
  return out;
}

std::vector<BinaryPtr> binary_shapes(int k) {
  if (k == 0) return {nullptr};
  std::vector<BinaryPtr> out;
  for (int l = 0; l < k; ++l)
    for (const auto& a : binary_shapes(l))
      for (const auto& b : binary_shapes(k - 1 - l)) {
        auto s = std::make_shared<BinaryShape>();
        s->left = a;
        s->right = b;
        out.push_back(s);
      }
  return out;
}

}  // namespace

std::string shape_code(const GrowingTree& t) {
  std::string out;
  for (NodeId r : t.roots()) shape_rec(t, r, out);
  return out;
}

std::vector<GrowingTree> enumerate_planar_trees(int nodes) {
  std::vector<GrowingTree> out;
  for (const auto& shape : planar_shapes(nodes)) {
    GrowingTree t(TreeKind::Recursive);
    std::deque<std::pair<NodeId, const PlanarShape*>> q{{t.add_root(), shape.get()}};
    while (!q.empty()) {
      auto [u, s] = q.front();
      q.pop_front();
      for (const auto& k : s->kids) q.emplace_back(t.add_child(u), k.get());
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<GrowingTree> enumerate_binary_trees(int nodes) {
  std::vector<GrowingTree> out;
  if (nodes < 1) return out;
  for (const auto& shape : binary_shapes(nodes)) {
    GrowingTree t(TreeKind::IncompleteBinary);
    std::deque<std::pair<NodeId, const BinaryShape*>> q{{t.add_root(), shape.get()}};
    while (!q.empty()) {
      auto [u, s] = q.front();
      q.pop_front();
      if (s->left) q.emplace_back(t.add_child(u, 0), s->left.get());
      if (s->right) q.emplace_back(t.add_child(u, 1), s->right.get());
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace mvpp
