#include "mvpp/process.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>

namespace mvpp {

namespace {

void require_positive_mass(const AtomicMeasure& m0) {
  if (!(m0.total_mass() > 0.0)) throw std::invalid_argument("initial measure must have positive mass");
}

void require_unit_mass(const AtomicMeasure& m0) {
  require_positive_mass(m0);
  if (std::abs(m0.total_mass() - 1.0) > 1e-12)
    throw std::invalid_argument("initial measure must have mass 1, got " + std::to_string(m0.total_mass()) +
                                "; use mvpp_forest for other masses");
}

// Atoms of R_x for kernels whose replacement measures are finitely atomic.
std::vector<Atom> replacement_atoms(const ReplacementKernel& k, const Colour& x) {
  if (const auto* d = std::get_if<kernel::DColour>(&k)) {
    const auto* f = std::get_if<FiniteIndex>(&x);
    if (!f || f->index < 0 || f->index >= static_cast<int>(d->rows.size()))
      throw std::invalid_argument("dcolour kernel cannot act on colour " + colour_to_string(x));
    std::vector<Atom> out;
    const auto& row = d->rows[static_cast<std::size_t>(f->index)];
    for (std::size_t j = 0; j < row.size(); ++j)
      if (row[j] > 0.0) out.push_back({FiniteIndex{static_cast<int>(j)}, row[j]});
    return out;
  }
  if (const auto* w = std::get_if<kernel::RandomWalk>(&k)) {
    if (!w->lattice) throw std::invalid_argument("urn_measure: non-atomic random walk kernel");
    auto v = std::get<std::int64_t>(x);
    if (const auto* c = std::get_if<increment::Constant>(&w->delta))
      return {{Colour{v + static_cast<std::int64_t>(c->value[0])}, 1.0}};
    const auto& t = std::get<increment::Table>(w->delta);
    std::vector<Atom> out;
    for (std::size_t i = 0; i < t.probs.size(); ++i)
      if (t.probs[i] > 0.0) out.push_back({Colour{v + static_cast<std::int64_t>(t.values[i][0])}, t.probs[i]});
    return out;
  }
  if (const auto* q = std::get_if<kernel::MMInfQueue>(&k)) {
    auto v = std::get<std::int64_t>(x);
    double up = q->lambda / (q->lambda + static_cast<double>(v) * q->mu);
    std::vector<Atom> out{{Colour{v + 1}, up}};
    if (up < 1.0) out.push_back({Colour{v - 1}, 1.0 - up});
    return out;
  }
  if (std::holds_alternative<kernel::KDiscrete>(k)) return kernel_atoms(k, x).atoms();
  throw std::invalid_argument("urn_measure: kernel " + kernel_name(k) + " has no atomic replacement measures");
}

AtomicMeasure accumulate(const AtomicMeasure& base, const std::vector<Colour>& colours, const ReplacementKernel& k) {
  std::map<Colour, double, ColourLess> acc;
  for (const auto& a : base.atoms()) acc[a.colour] += a.weight;
  for (const auto& c : colours)
    for (const auto& a : replacement_atoms(k, c)) acc[a.colour] += a.weight;
  std::vector<Atom> atoms;
  atoms.reserve(acc.size());
  for (const auto& [c, w] : acc) atoms.push_back({c, w});
  return AtomicMeasure(atoms);
}

}  // namespace

std::int64_t LabelledTree::steps() const {
  auto sz = static_cast<std::int64_t>(tree.size());
  auto roots = static_cast<std::int64_t>(tree.roots().size());
  switch (encoding) {
    case TreeEncoding::NodeReplacement:
    case TreeEncoding::NodeLabels:
      return sz - roots;
    case TreeEncoding::LeafReplacement:
      return (sz - roots) / 2;
    case TreeEncoding::LeafAtoms:
      return (sz - roots) / tree.kappa();
  }
  return 0;
}

UrnTrace mvpp_direct(const AtomicMeasure& m0, const ReplacementKernel& k, std::int64_t n, RngStream& s) {
  require_positive_mass(m0);
  if (n < 0) throw std::invalid_argument("mvpp_direct: n must be non-negative");
  validate_kernel(k);
  UrnTrace t{m0, k, {}, {}};
  t.drawn.reserve(static_cast<std::size_t>(n));
  t.source.reserve(static_cast<std::size_t>(n));
  AtomSampler initial(m0);
  const double m = m0.total_mass();
  for (std::int64_t step = 0; step < n; ++step) {
    // Scheme (b'): the initial measure with probability m/(m+step), else a uniform earlier draw.
    if (step == 0 || s.next_uniform() * (m + static_cast<double>(step)) < m) {
      t.drawn.push_back(initial.sample(s));
      t.source.push_back(0);
    } else {
      auto i = static_cast<std::int64_t>(s.next_below(static_cast<std::uint64_t>(step)));
      t.drawn.push_back(kernel_sample(k, t.drawn[static_cast<std::size_t>(i)], s));
      t.source.push_back(i + 1);
    }
  }
  return t;
}

LabelledTree mvpp_via_rrt(const AtomicMeasure& m0, const ReplacementKernel& k, std::int64_t n, RngStream& s) {
  require_unit_mass(m0);
  if (n < 0) throw std::invalid_argument("mvpp_via_rrt: n must be non-negative");
  validate_kernel(k);
  LabelledTree lt;
  lt.tree = GrowingTree(TreeKind::Recursive);
  lt.encoding = TreeEncoding::NodeReplacement;
  lt.m0 = m0;
  lt.kernel = k;
  lt.source_weight = 1.0;
  AtomSampler initial(m0);
  NodeId root = lt.tree.add_root();
  lt.labels.push_back(Colour{FiniteIndex{-1}});
  lt.source.push_back(1);
  for (std::int64_t step = 1; step <= n; ++step) {
    auto p = static_cast<NodeId>(s.next_below(static_cast<std::uint64_t>(step)));
    NodeId c = lt.tree.add_child(p);
    // Children of the source root are first draws from Nor(M_0).
    lt.labels.push_back(p == root ? initial.sample(s) : kernel_sample(k, lt.labels[static_cast<std::size_t>(p)], s));
    lt.source.push_back(0);
    (void)c;
  }
  return lt;
}

LabelledTree mvpp_via_bst(const AtomicMeasure& m0, const ReplacementKernel& k, std::int64_t n, RngStream& s) {
  require_unit_mass(m0);
  if (n < 0) throw std::invalid_argument("mvpp_via_bst: n must be non-negative");
  validate_kernel(k);
  LabelledTree lt;
  lt.tree = GrowingTree(TreeKind::KaryComplete, 2);
  lt.encoding = TreeEncoding::LeafReplacement;
  lt.m0 = m0;
  lt.kernel = k;
  lt.source_weight = 1.0;
  AtomSampler initial(m0);
  lt.tree.add_root();
  lt.labels.push_back(Colour{FiniteIndex{-1}});
  lt.source.push_back(1);
  for (std::int64_t step = 0; step < n; ++step) {
    NodeId u = sample_uniform_leaf(lt.tree, s);
    Colour x = lt.labels[static_cast<std::size_t>(u)];
    bool src = lt.source[static_cast<std::size_t>(u)] != 0;
    Colour fresh = src ? initial.sample(s) : kernel_sample(k, x, s);
    // Tails: slot 0 keeps the parent's value; heads: slot 1 keeps it.
    int keep = s.next_bernoulli(0.5) ? 1 : 0;
    lt.tree.expand_leaf(u);
    for (int j = 0; j < 2; ++j) {
      if (j == keep) {
        lt.labels.push_back(x);
        lt.source.push_back(src ? 1 : 0);
      } else {
        lt.labels.push_back(fresh);
        lt.source.push_back(0);
      }
    }
  }
  return lt;
}

std::vector<LabelledTree> mvpp_forest(const AtomicMeasure& m0, const ReplacementKernel& k, std::int64_t n,
                                      RngStream& s) {
  require_positive_mass(m0);
  if (n < 0) throw std::invalid_argument("mvpp_forest: n must be non-negative");
  validate_kernel(k);
  const double m = m0.total_mass();
  std::vector<double> weights(static_cast<std::size_t>(std::floor(m)), 1.0);
  double frac = m - std::floor(m);
  if (frac > 1e-12) weights.push_back(frac);
  if (weights.empty()) weights.push_back(m);
  std::vector<LabelledTree> forest(weights.size());
  std::vector<AtomSampler> samplers;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    auto& lt = forest[i];
    lt.tree = GrowingTree(TreeKind::Recursive);
    lt.encoding = TreeEncoding::NodeReplacement;
    lt.m0 = m0.scaled(weights[i] / m);
    lt.kernel = k;
    lt.source_weight = weights[i];
    lt.tree.add_root();
    lt.labels.push_back(Colour{FiniteIndex{-1}});
    lt.source.push_back(1);
    samplers.emplace_back(lt.m0);
  }
  std::vector<double> cumulative(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) cumulative[i] = acc += weights[i];
  // Weight-one nodes in creation order across the forest.
  std::vector<std::pair<std::size_t, NodeId>> unit_nodes;
  unit_nodes.reserve(static_cast<std::size_t>(n));
  for (std::int64_t step = 0; step < n; ++step) {
    double u = s.next_uniform() * (m + static_cast<double>(step));
    std::size_t tree_index;
    NodeId parent;
    if (u < m) {
      tree_index = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
      tree_index = std::min(tree_index, weights.size() - 1);
      parent = 0;
    } else {
      auto i = static_cast<std::size_t>(s.next_below(static_cast<std::uint64_t>(step)));
      std::tie(tree_index, parent) = unit_nodes[i];
    }
    auto& lt = forest[tree_index];
    NodeId c = lt.tree.add_child(parent);
    lt.labels.push_back(parent == 0 ? samplers[tree_index].sample(s)
                                    : kernel_sample(k, lt.labels[static_cast<std::size_t>(parent)], s));
    lt.source.push_back(0);
    unit_nodes.emplace_back(tree_index, c);
  }
  return forest;
}

std::vector<std::int64_t> forest_sizes(const std::vector<LabelledTree>& forest) {
  std::vector<std::int64_t> out;
  for (const auto& t : forest) out.push_back(static_cast<std::int64_t>(t.tree.size()) - 1);
  return out;
}

LabelledTree mvpp_kdiscrete(const AtomicMeasure& m0, const kernel::KDiscrete& k, std::int64_t n, RngStream& s) {
  require_positive_mass(m0);
  if (n < 0) throw std::invalid_argument("mvpp_kdiscrete: n must be non-negative");
  validate_kernel(k);
  if (k.kappa < 2) throw std::invalid_argument("mvpp_kdiscrete: kappa must be at least 2");
  LabelledTree lt;
  lt.tree = GrowingTree(TreeKind::KaryComplete, k.kappa);
  lt.encoding = TreeEncoding::LeafAtoms;
  lt.m0 = m0;
  lt.kernel = k;
  for (const auto& a : m0.atoms()) {
    double balls = a.weight * k.kappa;
    double r = std::round(balls);
    if (std::abs(balls - r) > 1e-9 || r < 1.0)
      throw std::invalid_argument("mvpp_kdiscrete: atom weight " + std::to_string(a.weight) +
                                  " is not a positive multiple of 1/kappa");
    for (int b = 0; b < static_cast<int>(r); ++b) {
      lt.tree.add_root();
      lt.labels.push_back(a.colour);
      lt.source.push_back(0);
    }
  }
  for (std::int64_t step = 0; step < n; ++step) {
    NodeId u = sample_uniform_leaf(lt.tree, s);
    auto kids = sym_shuffle(kdiscrete_tuple(k, lt.labels[static_cast<std::size_t>(u)]), s);
    lt.tree.expand_leaf(u);
    for (auto& c : kids) {
      lt.labels.push_back(std::move(c));
      lt.source.push_back(0);
    }
  }
  return lt;
}

LabelledTree sbmc_on_rrt(const AtomicMeasure& m0, const ReplacementKernel& k, std::int64_t n, RngStream& s) {
  require_unit_mass(m0);
  if (n < 0) throw std::invalid_argument("sbmc_on_rrt: n must be non-negative");
  validate_kernel(k);
  LabelledTree lt;
  lt.tree = GrowingTree(TreeKind::Recursive);
  lt.encoding = TreeEncoding::NodeLabels;
  lt.m0 = m0;
  lt.kernel = k;
  lt.tree.add_root();
  lt.labels.push_back(sample_atom(m0, s));
  lt.source.push_back(0);
  for (std::int64_t step = 1; step <= n; ++step) {
    auto p = static_cast<NodeId>(s.next_below(static_cast<std::uint64_t>(step)));
    lt.tree.add_child(p);
    lt.labels.push_back(kernel_sample(k, lt.labels[static_cast<std::size_t>(p)], s));
    lt.source.push_back(0);
  }
  return lt;
}

AtomicMeasure urn_measure(const UrnTrace& t, std::int64_t n) {
  if (n < 0 || n > t.n()) throw std::invalid_argument("urn_measure: prefix length out of range");
  std::vector<Colour> prefix(t.drawn.begin(), t.drawn.begin() + n);
  return accumulate(t.m0, prefix, t.kernel);
}

AtomicMeasure urn_measure(const UrnTrace& t) { return urn_measure(t, t.n()); }

AtomicMeasure urn_measure(const LabelledTree& t) {
  switch (t.encoding) {
    case TreeEncoding::NodeReplacement:
    case TreeEncoding::LeafReplacement: {
      bool leaves_only = t.encoding == TreeEncoding::LeafReplacement;
      std::vector<Colour> colours;
      bool has_source = false;
      for (std::size_t i = 0; i < t.tree.size(); ++i) {
        if (leaves_only && !t.tree.is_leaf(static_cast<NodeId>(i))) continue;
        if (t.source[i]) {
          has_source = true;
          continue;
        }
        colours.push_back(t.labels[i]);
      }
      return accumulate(has_source ? t.m0 : AtomicMeasure(), colours, t.kernel);
    }
    case TreeEncoding::LeafAtoms: {
      std::map<Colour, double, ColourLess> acc;
      for (NodeId u : t.tree.leaf_list()) acc[t.labels[static_cast<std::size_t>(u)]] += 1.0 / t.tree.kappa();
      std::vector<Atom> atoms;
      for (const auto& [c, w] : acc) atoms.push_back({c, w});
      return AtomicMeasure(atoms);
    }
    case TreeEncoding::NodeLabels: {
      std::vector<Atom> atoms;
      for (const auto& c : t.labels) atoms.push_back({c, 1.0});
      return AtomicMeasure(atoms);
    }
  }
  return {};
}

Colour sample_urn(const UrnTrace& t, std::int64_t n, RngStream& s) {
  if (n < 0 || n > t.n()) throw std::invalid_argument("sample_urn: prefix length out of range");
  const double m = t.m0.total_mass();
  if (n == 0 || s.next_uniform() * (m + static_cast<double>(n)) < m) return sample_atom(t.m0, s);
  auto i = static_cast<std::size_t>(s.next_below(static_cast<std::uint64_t>(n)));
  return kernel_sample(t.kernel, t.drawn[i], s);
}

Colour sample_urn(const LabelledTree& t, RngStream& s) {
  switch (t.encoding) {
    case TreeEncoding::NodeReplacement: {
      // Source roots weigh source_weight, every other node weighs 1.
      double total = t.source_weight + static_cast<double>(t.tree.size() - 1);
      double u = s.next_uniform() * total;
      if (u < t.source_weight || t.tree.size() == 1) return sample_atom(t.m0, s);
      auto i = 1 + static_cast<std::size_t>(s.next_below(t.tree.size() - 1));
      return kernel_sample(t.kernel, t.labels[i], s);
    }
    case TreeEncoding::LeafReplacement: {
      NodeId u = sample_uniform_leaf(t.tree, s);
      if (t.source[static_cast<std::size_t>(u)]) return sample_atom(t.m0, s);
      return kernel_sample(t.kernel, t.labels[static_cast<std::size_t>(u)], s);
    }
    case TreeEncoding::LeafAtoms:
      return t.labels[static_cast<std::size_t>(sample_uniform_leaf(t.tree, s))];
    case TreeEncoding::NodeLabels:
      return t.labels[static_cast<std::size_t>(sample_uniform_node(t.tree, s))];
  }
  throw std::logic_error("sample_urn: unknown encoding");
}

std::pair<Colour, Colour> sample_pair(const UrnTrace& t, std::int64_t n, RngStream& s) {
  if (n < 1) throw std::invalid_argument("sample_pair: needs n >= 1");
  Colour a = sample_urn(t, n, s);
  Colour b = sample_urn(t, n, s);
  return {a, b};
}

std::pair<Colour, Colour> sample_pair(const UrnTrace& t, RngStream& s) { return sample_pair(t, t.n(), s); }

std::pair<Colour, Colour> sample_pair(const LabelledTree& t, RngStream& s) {
  if (t.steps() < 1) throw std::invalid_argument("sample_pair: needs n >= 1");
  Colour a = sample_urn(t, s);
  Colour b = sample_urn(t, s);
  return {a, b};
}

std::size_t worker_count() {
  if (const char* env = std::getenv("MVPP_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (!failed) {
        std::size_t i = next.fetch_add(1);
        if (i >= count) break;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

TheoremReport verify_main_theorem(const ReplacementKernel& k, const RenormalisationPlan& plan, const AtomicMeasure& m0,
                                  const TheoremCheckOptions& opt) {
  if (opt.n_grid.empty()) throw std::invalid_argument("verify_main_theorem: empty n grid");
  for (std::size_t i = 1; i < opt.n_grid.size(); ++i)
    if (opt.n_grid[i] <= opt.n_grid[i - 1]) throw std::invalid_argument("verify_main_theorem: n grid must increase");
  if (opt.replicas == 0 || opt.pairs_per_replica == 0) throw std::invalid_argument("verify_main_theorem: empty workload");
  const std::size_t g = opt.n_grid.size();
  const std::size_t per = opt.pairs_per_replica;
  // values[r][grid][2*pair + coord]
  std::vector<std::vector<std::vector<double>>> values(opt.replicas);
  const auto* kd = std::get_if<kernel::KDiscrete>(&k);
  parallel_for(opt.replicas, [&](std::size_t r) {
    RngStream s = derive_stream(opt.root_seed, opt.stream_offset + r);
    auto& out = values[r];
    out.assign(g, std::vector<double>(2 * per));
    auto record = [&](std::size_t gi, const std::pair<Colour, Colour>& p, std::size_t j) {
      Rescaling rs = plan_rescaling(plan, opt.n_grid[gi]);
      out[gi][2 * j] = (colour_dot(p.first, opt.direction) - rs.b[0]) / rs.a;
      out[gi][2 * j + 1] = (colour_dot(p.second, opt.direction) - rs.b[0]) / rs.a;
    };
    if (kd) {
      for (std::size_t gi = 0; gi < g; ++gi) {
        LabelledTree lt = mvpp_kdiscrete(m0, *kd, opt.n_grid[gi], s);
        for (std::size_t j = 0; j < per; ++j) record(gi, sample_pair(lt, s), j);
      }
    } else {
      UrnTrace t = mvpp_direct(m0, k, opt.n_grid.back(), s);
      for (std::size_t gi = 0; gi < g; ++gi)
        for (std::size_t j = 0; j < per; ++j) record(gi, sample_pair(t, opt.n_grid[gi], s), j);
    }
  });
  std::vector<double> reference;
  if (!plan.has_limit_law) {
    RngStream s = derive_stream(opt.root_seed, 0xfeed0000ULL + opt.stream_offset);
    reference.resize(opt.reference_draws);
    for (double& v : reference) v = simulate_reference(plan, s);
  }
  TheoremReport rep;
  for (std::size_t gi = 0; gi < g; ++gi) {
    std::vector<double> pooled, a, b;
    for (std::size_t r = 0; r < opt.replicas; ++r)
      for (std::size_t j = 0; j < per; ++j) {
        double x = values[r][gi][2 * j], y = values[r][gi][2 * j + 1];
        pooled.push_back(x);
        pooled.push_back(y);
        a.push_back(normal_cdf(x));
        b.push_back(normal_cdf(y));
      }
    TheoremPoint pt;
    pt.n = opt.n_grid[gi];
    pt.samples = pooled.size();
    pt.ks = plan.has_limit_law ? ks_statistic(pooled, plan.limit_law) : ks_two_sample(pooled, reference);
    pt.decorrelation = correlation(a, b);
    pt.mean = mean(pooled);
    pt.variance = sample_variance(pooled);
    rep.points.push_back(pt);
    std::sort(pooled.begin(), pooled.end());
    rep.samples_per_n.push_back(std::move(pooled));
  }
  rep.rescaled_samples = rep.samples_per_n.back();
  return rep;
}

}  // namespace mvpp
