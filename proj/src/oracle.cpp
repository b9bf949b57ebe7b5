#include "mvpp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace mvpp {

namespace {

constexpr double kKeyGrid = 1e9;
constexpr std::int64_t kPathBudget = 5000000;

double snap(double x) { return std::round(x * kKeyGrid) / kKeyGrid; }

[[noreturn]] void budget_exceeded(const std::string& what) {
  throw std::length_error(what + ": enumeration budget exceeded");
}

double multinomial(int total, const std::vector<int>& parts) {
  double r = std::lgamma(total + 1.0);
  for (int p : parts) r -= std::lgamma(p + 1.0);
  return std::exp(r);
}

// Compositions of `total` into `k` ordered non-negative parts.
void for_each_composition(int total, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> parts(static_cast<std::size_t>(k), 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == k - 1) {
      parts[static_cast<std::size_t>(i)] = left;
      fn(parts);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      parts[static_cast<std::size_t>(i)] = v;
      rec(i + 1, left - v);
    }
  };
  rec(0, total);
}

std::int64_t colour_key(const Colour& c) {
  if (const auto* f = std::get_if<FiniteIndex>(&c)) return f->index;
  if (const auto* v = std::get_if<std::int64_t>(&c)) return *v;
  throw std::invalid_argument("exact oracles need finite or lattice colours");
}

Colour key_colour(std::int64_t key, bool finite) {
  if (finite) return FiniteIndex{static_cast<int>(key)};
  return Colour{key};
}

// Composition in units of 1/kappa balls for kdiscrete urns.
using BallState = std::map<std::int64_t, std::int64_t>;

Outcome ball_outcome(const BallState& st, int kappa, bool finite, std::size_t d) {
  Outcome o;
  if (finite) {
    o.assign(d, 0.0);
    for (const auto& [c, b] : st) o[static_cast<std::size_t>(c)] = static_cast<double>(b) / kappa;
    return o;
  }
  for (const auto& [c, b] : st) {
    if (b == 0) continue;
    o.push_back(static_cast<double>(c));
    o.push_back(static_cast<double>(b) / kappa);
  }
  return o;
}

BallState initial_balls(const AtomicMeasure& m0, int kappa) {
  BallState st;
  for (const auto& a : m0.atoms()) {
    double balls = a.weight * kappa;
    double r = std::round(balls);
    if (std::abs(balls - r) > 1e-9 || r < 1.0)
      throw std::invalid_argument("atom weight is not a positive multiple of 1/kappa");
    st[colour_key(a.colour)] += static_cast<std::int64_t>(r);
  }
  return st;
}

}  // namespace

void ExactLaw::add(const Outcome& o, double p) {
  Outcome key = o;
  for (double& x : key) x = snap(x);
  table_[key] += p;
}

double ExactLaw::probability(const Outcome& o) const {
  Outcome key = o;
  for (double& x : key) x = snap(x);
  auto it = table_.find(key);
  return it == table_.end() ? 0.0 : it->second;
}

double ExactLaw::total() const {
  double s = 0.0;
  for (const auto& [o, p] : table_) s += p;
  return s;
}

ExactLaw ExactLaw::marginal(std::size_t coordinate) const {
  ExactLaw m;
  for (const auto& [o, p] : table_) m.add({o.at(coordinate)}, p);
  return m;
}

void ExactLaw::write_csv(std::ostream& os) const {
  os << "outcome,probability\n";
  char buf[64];
  for (const auto& [o, p] : table_) {
    for (std::size_t i = 0; i < o.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", o[i]);
      os << (i ? ";" : "") << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", p);
    os << "," << buf << "\n";
  }
}

double max_abs_diff(const ExactLaw& a, const ExactLaw& b) {
  double d = 0.0;
  for (const auto& [o, p] : a.table()) d = std::max(d, std::abs(p - b.probability(o)));
  for (const auto& [o, p] : b.table()) d = std::max(d, std::abs(p - a.probability(o)));
  return d;
}

double total_variation(const ExactLaw& a, const ExactLaw& b) {
  double s = 0.0;
  for (const auto& [o, p] : a.table()) s += std::abs(p - b.probability(o));
  for (const auto& [o, p] : b.table())
    if (a.table().find(o) == a.table().end()) s += std::abs(p);
  return 0.5 * s;
}

ExactLaw exact_urn_law(const AtomicMeasure& m0, const ReplacementKernel& k, int n, UrnDynamics dynamics) {
  if (n < 0 || n > 8) throw std::length_error("exact_urn_law: n must lie in [0,8]");
  if (!(m0.total_mass() > 0.0)) throw std::invalid_argument("exact_urn_law: null initial measure");
  validate_kernel(k);
  ExactLaw law;
  std::int64_t paths = 0;
  if (const auto* dc = std::get_if<kernel::DColour>(&k)) {
    if (dynamics != UrnDynamics::WithReplacement)
      throw std::invalid_argument("exact_urn_law: d-colour urns are drawn with replacement");
    std::size_t d = dc->rows.size();
    if (d > 4) throw std::length_error("exact_urn_law: at most 4 colours");
    std::vector<double> comp(d, 0.0);
    for (const auto& a : m0.atoms()) {
      auto c = colour_key(a.colour);
      if (c < 0 || c >= static_cast<std::int64_t>(d)) throw std::invalid_argument("initial colour out of range");
      comp[static_cast<std::size_t>(c)] += a.weight;
    }
    std::function<void(std::vector<double>&, double, int)> rec = [&](std::vector<double>& st, double p, int left) {
      if (left == 0) {
        if (++paths > kPathBudget) budget_exceeded("exact_urn_law");
        law.add(st, p);
        return;
      }
      double total = std::accumulate(st.begin(), st.end(), 0.0);
      for (std::size_t i = 0; i < d; ++i) {
        if (st[i] <= 0.0) continue;
        std::vector<double> next = st;
        for (std::size_t j = 0; j < d; ++j) next[j] += dc->rows[i][j];
        rec(next, p * st[i] / total, left - 1);
      }
    };
    rec(comp, 1.0, n);
    return law;
  }
  const auto* kd = std::get_if<kernel::KDiscrete>(&k);
  if (!kd) throw std::invalid_argument("exact_urn_law: kernel must be dcolour or kdiscrete");
  const bool finite = !kd->index_table.empty();
  const std::size_t d = kd->index_table.size();
  BallState start = initial_balls(m0, kd->kappa);
  std::function<void(const BallState&, double, int)> rec = [&](const BallState& st, double p, int left) {
    if (left == 0) {
      if (++paths > kPathBudget) budget_exceeded("exact_urn_law");
      law.add(ball_outcome(st, kd->kappa, finite, d), p);
      return;
    }
    std::int64_t total = 0;
    for (const auto& [c, b] : st) total += b;
    for (const auto& [c, b] : st) {
      if (b == 0) continue;
      BallState next = st;
      if (dynamics == UrnDynamics::WithoutReplacement) next[c] -= 1;
      for (const auto& y : kdiscrete_tuple(*kd, key_colour(c, finite))) next[colour_key(y)] += 1;
      rec(next, p * static_cast<double>(b) / static_cast<double>(total), left - 1);
    }
  };
  rec(start, 1.0, n);
  return law;
}

ExactLaw exact_kdiscrete_tree_law(const AtomicMeasure& m0, const kernel::KDiscrete& k, int n) {
  if (n < 0 || n > 6) throw std::length_error("exact_kdiscrete_tree_law: n must lie in [0,6]");
  validate_kernel(k);
  const bool finite = !k.index_table.empty();
  std::vector<std::int64_t> leaves;
  for (const auto& [c, b] : initial_balls(m0, k.kappa))
    for (std::int64_t i = 0; i < b; ++i) leaves.push_back(c);
  std::vector<int> perm(static_cast<std::size_t>(k.kappa));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> orderings;
  do {
    orderings.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  ExactLaw law;
  std::int64_t paths = 0;
  std::function<void(const std::vector<std::int64_t>&, double, int)> rec = [&](const std::vector<std::int64_t>& lv,
                                                                              double p, int left) {
    if (left == 0) {
      if (++paths > kPathBudget) budget_exceeded("exact_kdiscrete_tree_law");
      BallState st;
      for (auto c : lv) st[c] += 1;
      law.add(ball_outcome(st, k.kappa, finite, k.index_table.size()), p);
      return;
    }
    double pick = p / static_cast<double>(lv.size());
    for (std::size_t i = 0; i < lv.size(); ++i) {
      auto tuple = kdiscrete_tuple(k, key_colour(lv[i], finite));
      for (const auto& order : orderings) {
        std::vector<std::int64_t> next;
        next.reserve(lv.size() + tuple.size());
        for (std::size_t j = 0; j < lv.size(); ++j)
          if (j != i) next.push_back(lv[j]);
        for (int o : order) next.push_back(colour_key(tuple[static_cast<std::size_t>(o)]));
        rec(next, pick / static_cast<double>(orderings.size()), left - 1);
      }
    }
  };
  rec(leaves, 1.0, n);
  return law;
}

ExactLaw exact_rrt_joint_depths(int n, bool non_root_only) {
  if (n < 0 || n > 8) throw std::length_error("exact_rrt_joint_depths: n must lie in [0,8]");
  if (non_root_only && n < 1) throw std::invalid_argument("exact_rrt_joint_depths: no non-root nodes");
  ExactLaw law;
  std::vector<int> parent(static_cast<std::size_t>(n) + 1, -1), dep(static_cast<std::size_t>(n) + 1, 0);
  auto lca_depth = [&](int u, int v) {
    while (dep[static_cast<std::size_t>(u)] > dep[static_cast<std::size_t>(v)]) u = parent[static_cast<std::size_t>(u)];
    while (dep[static_cast<std::size_t>(v)] > dep[static_cast<std::size_t>(u)]) v = parent[static_cast<std::size_t>(v)];
    while (u != v) {
      u = parent[static_cast<std::size_t>(u)];
      v = parent[static_cast<std::size_t>(v)];
    }
    return dep[static_cast<std::size_t>(u)];
  };
  std::function<void(int, double)> rec = [&](int k, double p) {
    if (k > n) {
      int first = non_root_only ? 1 : 0;
      double cnt = static_cast<double>(n + 1 - first);
      double w = p / (cnt * cnt);
      for (int u = first; u <= n; ++u)
        for (int v = first; v <= n; ++v)
          law.add({static_cast<double>(dep[static_cast<std::size_t>(u)]), static_cast<double>(dep[static_cast<std::size_t>(v)]),
                   static_cast<double>(lca_depth(u, v))},
                  w);
      return;
    }
    for (int par = 0; par < k; ++par) {
      parent[static_cast<std::size_t>(k)] = par;
      dep[static_cast<std::size_t>(k)] = dep[static_cast<std::size_t>(par)] + 1;
      rec(k + 1, p / k);
    }
  };
  rec(1, 1.0);
  return law;
}

ExactLaw exact_rrt_transport_law(int n) {
  if (n < 1 || n > 8) throw std::length_error("exact_rrt_transport_law: n must lie in [1,8]");
  ExactLaw law;
  std::vector<int> parent(static_cast<std::size_t>(n) + 1, -1), dep(static_cast<std::size_t>(n) + 1, 0);
  auto up = [&](int u, int d) {
    while (dep[static_cast<std::size_t>(u)] > d) u = parent[static_cast<std::size_t>(u)];
    return u;
  };
  std::function<void(int, double)> rec = [&](int k, double p) {
    if (k > n) {
      double w = p / (static_cast<double>(n) * n);
      for (int u = 1; u <= n; ++u)
        for (int v = 1; v <= n; ++v) {
          int du = dep[static_cast<std::size_t>(u)], dv = dep[static_cast<std::size_t>(v)];
          int a = up(u, std::min(du, dv)), b = up(v, std::min(du, dv));
          bool comparable = a == b;
          while (a != b) {
            a = parent[static_cast<std::size_t>(a)];
            b = parent[static_cast<std::size_t>(b)];
          }
          int l = dep[static_cast<std::size_t>(a)];
          law.add({du - 1.0, dv - 1.0, static_cast<double>(l - (comparable ? 1 : 0))}, w);
        }
      return;
    }
    for (int par = 0; par < k; ++par) {
      parent[static_cast<std::size_t>(k)] = par;
      dep[static_cast<std::size_t>(k)] = dep[static_cast<std::size_t>(par)] + 1;
      rec(k + 1, p / k);
    }
  };
  rec(1, 1.0);
  return law;
}

BstDepthLaws exact_bst_joint_depths(int n) {
  if (n < 1 || n > 8) throw std::length_error("exact_bst_joint_depths: n must lie in [1,8]");
  BstDepthLaws out;
  std::vector<int> parent(static_cast<std::size_t>(n), -1), slot(static_cast<std::size_t>(n), 0),
      dep(static_cast<std::size_t>(n), 0), ldep(static_cast<std::size_t>(n), 0);
  std::vector<std::pair<int, int>> free_slots{{0, 0}, {0, 1}};
  auto lca = [&](int u, int v) {
    while (dep[static_cast<std::size_t>(u)] > dep[static_cast<std::size_t>(v)]) u = parent[static_cast<std::size_t>(u)];
    while (dep[static_cast<std::size_t>(v)] > dep[static_cast<std::size_t>(u)]) v = parent[static_cast<std::size_t>(v)];
    while (u != v) {
      u = parent[static_cast<std::size_t>(u)];
      v = parent[static_cast<std::size_t>(v)];
    }
    return u;
  };
  std::function<void(int, double)> rec = [&](int k, double p) {
    if (k == n) {
      double w = p / (static_cast<double>(n) * n);
      for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
          int a = lca(u, v);
          out.depths.add({static_cast<double>(dep[static_cast<std::size_t>(u)]),
                          static_cast<double>(dep[static_cast<std::size_t>(v)]),
                          static_cast<double>(dep[static_cast<std::size_t>(a)])},
                         w);
          out.left_depths.add({static_cast<double>(ldep[static_cast<std::size_t>(u)]),
                               static_cast<double>(ldep[static_cast<std::size_t>(v)]),
                               static_cast<double>(ldep[static_cast<std::size_t>(a)])},
                              w);
        }
      return;
    }
    std::size_t count = free_slots.size();
    for (std::size_t i = 0; i < count; ++i) {
      auto [par, sl] = free_slots[i];
      parent[static_cast<std::size_t>(k)] = par;
      slot[static_cast<std::size_t>(k)] = sl;
      dep[static_cast<std::size_t>(k)] = dep[static_cast<std::size_t>(par)] + 1;
      ldep[static_cast<std::size_t>(k)] = ldep[static_cast<std::size_t>(par)] + (sl == 0 ? 1 : 0);
      auto saved = free_slots;
      free_slots.erase(free_slots.begin() + static_cast<std::ptrdiff_t>(i));
      free_slots.emplace_back(k, 0);
      free_slots.emplace_back(k, 1);
      rec(k + 1, p / static_cast<double>(count));
      free_slots = std::move(saved);
    }
  };
  rec(1, 1.0);
  return out;
}

ExactLaw exact_kary_subtree_law(int n, int kappa) {
  if (kappa < 2) throw std::invalid_argument("exact_kary_subtree_law: kappa must be at least 2");
  if (n < 1) throw std::invalid_argument("exact_kary_subtree_law: n must be at least 1");
  if (n * (kappa - 1) > 12) throw std::length_error("exact_kary_subtree_law: budget n(kappa-1) <= 12 exceeded");
  // After the root splits, step through leaf choices grouped by root subtree.
  std::map<std::vector<int>, double> layer{{std::vector<int>(static_cast<std::size_t>(kappa), 0), 1.0}};
  for (int step = 1; step < n; ++step) {
    std::map<std::vector<int>, double> next;
    double leaves = 1.0 + step * (kappa - 1.0);
    for (const auto& [sizes, p] : layer)
      for (int j = 0; j < kappa; ++j) {
        double lj = 1.0 + sizes[static_cast<std::size_t>(j)] * (kappa - 1.0);
        auto s = sizes;
        ++s[static_cast<std::size_t>(j)];
        next[s] += p * lj / leaves;
      }
    layer = std::move(next);
  }
  ExactLaw law;
  for (const auto& [sizes, p] : layer) law.add(Outcome(sizes.begin(), sizes.end()), p);
  return law;
}

ExactLaw closed_form_kary(int n, int kappa) {
  if (kappa < 2 || n < 1) throw std::invalid_argument("closed_form_kary: need kappa >= 2 and n >= 1");
  auto h = [&](int m) {
    double r = 1.0;
    for (int i = 0; i < m; ++i) r *= 1.0 + i * (kappa - 1.0);
    return r;
  };
  ExactLaw law;
  double hn = h(n);
  for_each_composition(n - 1, kappa, [&](const std::vector<int>& parts) {
    double p = multinomial(n - 1, parts) / hn;
    for (int v : parts) p *= h(v);
    law.add(Outcome(parts.begin(), parts.end()), p);
  });
  return law;
}

ExactLaw dirichlet_form_kary(int n, int kappa) {
  if (kappa < 2 || n < 1) throw std::invalid_argument("dirichlet_form_kary: need kappa >= 2 and n >= 1");
  const double a = 1.0 / (kappa - 1.0);
  ExactLaw law;
  for_each_composition(n - 1, kappa, [&](const std::vector<int>& parts) {
    double lp = std::log(multinomial(n - 1, parts)) + std::lgamma(kappa * a) - kappa * std::lgamma(a) -
                std::lgamma(n - 1 + kappa * a);
    for (int v : parts) lp += std::lgamma(v + a);
    law.add(Outcome(parts.begin(), parts.end()), std::exp(lp));
  });
  return law;
}

ExactLaw shape_count_form_kary(int n, int kappa) {
  if (kappa < 2 || n < 1) throw std::invalid_argument("shape_count_form_kary: need kappa >= 2 and n >= 1");
  ExactLaw law;
  for_each_composition(n - 1, kappa, [&](const std::vector<int>& parts) {
    double lp = std::log(multinomial(n - 1, parts)) - std::lgamma(1.0 + n * (kappa - 1.0));
    for (int v : parts) lp += std::lgamma(kappa * v + 1.0) - std::lgamma(v + 1.0) - std::lgamma((kappa - 1.0) * v + 2.0);
    law.add(Outcome(parts.begin(), parts.end()), std::exp(lp));
  });
  return law;
}

double kary_tree_count(int m, int kappa) {
  if (m < 0 || kappa < 2) throw std::invalid_argument("kary_tree_count: need m >= 0 and kappa >= 2");
  return std::exp(std::lgamma(kappa * m + 1.0) - std::lgamma(m + 1.0) - std::lgamma((kappa - 1.0) * m + 1.0)) /
         ((kappa - 1.0) * m + 1.0);
}

std::int64_t enumerate_kary_tree_count(int m, int kappa) {
  if (m < 0 || kappa < 2) throw std::invalid_argument("enumerate_kary_tree_count: need m >= 0 and kappa >= 2");
  std::vector<std::int64_t> count(static_cast<std::size_t>(m) + 1, 0);
  count[0] = 1;
  for (int size = 1; size <= m; ++size) {
    std::int64_t total = 0;
    for_each_composition(size - 1, kappa, [&](const std::vector<int>& parts) {
      std::int64_t prod = 1;
      for (int v : parts) prod *= count[static_cast<std::size_t>(v)];
      total += prod;
    });
    count[static_cast<std::size_t>(size)] = total;
  }
  return count[static_cast<std::size_t>(m)];
}

CouplingLaws exact_coupling_law(const AtomicMeasure& m0, const kernel::DColour& k, int n) {
  if (n < 0 || n > 3) throw std::length_error("exact_coupling_law: n must lie in [0,3]");
  validate_kernel(k);
  if (k.rows.size() != 2) throw std::invalid_argument("exact_coupling_law: needs a 2-colour kernel");
  if (std::abs(m0.total_mass() - 1.0) > 1e-12) throw std::invalid_argument("exact_coupling_law: m0 must have mass 1");
  CouplingLaws out;
  out.direct = exact_urn_law(m0, k, n);
  std::vector<double> base(2, 0.0);
  for (const auto& a : m0.atoms()) base[static_cast<std::size_t>(colour_key(a.colour))] += a.weight;
  auto composition = [&](const std::vector<int>& colours) {
    std::vector<double> c = base;
    for (int x : colours)
      for (std::size_t j = 0; j < 2; ++j) c[j] += k.rows[static_cast<std::size_t>(x)][j];
    return c;
  };
  // Law of a fresh label: m0 for children of the source, R_x otherwise. x = -1 marks the source.
  auto fresh = [&](int x) { return x < 0 ? base : k.rows[static_cast<std::size_t>(x)]; };

  // RRT coupling: node 0 is the source root; labels[i] for i >= 1.
  std::function<void(std::vector<int>&, double)> rrt = [&](std::vector<int>& labels, double p) {
    int nodes = static_cast<int>(labels.size());
    if (nodes == n + 1) {
      out.rrt.add(composition(std::vector<int>(labels.begin() + 1, labels.end())), p);
      return;
    }
    for (int par = 0; par < nodes; ++par) {
      auto dist = fresh(labels[static_cast<std::size_t>(par)]);
      for (int c = 0; c < 2; ++c) {
        if (dist[static_cast<std::size_t>(c)] <= 0.0) continue;
        labels.push_back(c);
        rrt(labels, p / nodes * dist[static_cast<std::size_t>(c)]);
        labels.pop_back();
      }
    }
  };
  std::vector<int> labels{-1};
  rrt(labels, 1.0);

  // BST coupling: leaves of the complete binary tree; -1 marks the source leaf.
  std::function<void(std::vector<int>&, double, int)> bst = [&](std::vector<int>& leaves, double p, int left) {
    if (left == 0) {
      std::vector<int> colours;
      for (int x : leaves)
        if (x >= 0) colours.push_back(x);
      out.bst.add(composition(colours), p);
      return;
    }
    double pick = p / static_cast<double>(leaves.size());
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      int x = leaves[i];
      auto dist = fresh(x);
      for (int coin = 0; coin < 2; ++coin)
        for (int c = 0; c < 2; ++c) {
          if (dist[static_cast<std::size_t>(c)] <= 0.0) continue;
          std::vector<int> next = leaves;
          next.erase(next.begin() + static_cast<std::ptrdiff_t>(i));
          // The coin only decides which slot copies the parent; the leaf multiset is the same.
          if (coin == 0) {
            next.push_back(x);
            next.push_back(c);
          } else {
            next.push_back(c);
            next.push_back(x);
          }
          bst(next, pick * 0.5 * dist[static_cast<std::size_t>(c)], left - 1);
        }
    }
  };
  std::vector<int> leaves{-1};
  bst(leaves, 1.0, n);
  return out;
}

}  // namespace mvpp
