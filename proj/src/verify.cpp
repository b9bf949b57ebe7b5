#include "mvpp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>
#include <json.hpp>

#include "mvpp/kernels.hpp"
#include "mvpp/measures.hpp"
#include "mvpp/oracle.hpp"
#include "mvpp/process.hpp"
#include "mvpp/random.hpp"
#include "mvpp/series.hpp"
#include "mvpp/stats.hpp"
#include "mvpp/trees.hpp"

namespace mvpp {

namespace {

using Json = nlohmann::ordered_json;

SubCheck check(const std::string& name, double statistic, double threshold, const std::string& cmp = "<=") {
  SubCheck c{name, statistic, threshold, cmp, false};
  if (cmp == "<=")
    c.pass = statistic <= threshold;
  else if (cmp == ">=")
    c.pass = statistic >= threshold;
  else if (cmp == ">")
    c.pass = statistic > threshold;
  else
    c.pass = statistic == threshold;
  return c;
}

// Stream ids: criterion in the top bits, experiment part in the middle, replica at the bottom.
std::uint64_t stream_base(int criterion, int part) {
  return (static_cast<std::uint64_t>(criterion) << 40) | (static_cast<std::uint64_t>(part) << 24);
}

RngStream stream(const VerifyOptions& opt, int criterion, int part, std::uint64_t r = 0) {
  return derive_stream(opt.seed, stream_base(criterion, part) + r);
}

double log_n(std::int64_t n) { return std::log(static_cast<double>(n)); }

std::map<std::int64_t, double> empirical_pmf(const std::vector<std::int64_t>& v) {
  std::map<std::int64_t, double> p;
  for (auto x : v) p[x] += 1.0 / static_cast<double>(v.size());
  return p;
}

std::map<std::int64_t, double> exact_pmf(const ExactLaw& marginal) {
  std::map<std::int64_t, double> p;
  for (const auto& [o, q] : marginal.table()) p[static_cast<std::int64_t>(std::llround(o[0]))] += q;
  return p;
}

// 0.5 * sum_k sd of the k-th empirical frequency.
double tv_standard_error(const std::map<std::int64_t, double>& p, std::size_t n) {
  double s = 0.0;
  for (const auto& [k, q] : p) s += std::sqrt(q * (1.0 - q) / static_cast<double>(n));
  return 0.5 * s;
}

std::map<std::int64_t, double> law_pmf(const ReferenceLaw& l, std::int64_t kmax) {
  std::map<std::int64_t, double> p;
  for (std::int64_t k = 0; k <= kmax; ++k) p[k] = reference_pmf(l, k);
  return p;
}

// ---------------------------------------------------------------------------------------------

CriterionResult rotation_transport(const VerifyOptions&) {
  CriterionResult res{1, "rotation bijection and depth transport", {}, {}, {}};
  std::int64_t roundtrip_fail = 0, bijection_fail = 0, depth_fail = 0, incomparable_fail = 0, corrected_fail = 0;
  std::int64_t literal_fail = 0, pairs = 0, trees = 0;
  for (int nodes = 2; nodes <= 8; ++nodes) {
    auto planar = enumerate_planar_trees(nodes);
    auto binary = enumerate_binary_trees(nodes - 1);
    std::set<std::string> codes;
    for (const auto& t : planar) {
      ++trees;
      RotationResult rot = rotation(t);
      RotationResult inv = rotation_inverse(rot.tree);
      codes.insert(shape_code(rot.tree));
      if (shape_code(inv.tree) != shape_code(t)) ++roundtrip_fail;
      const NodeId root = t.roots()[0];
      for (NodeId u = 0; u < static_cast<NodeId>(t.size()); ++u) {
        if (u == root) continue;
        NodeId bu = rot.image[static_cast<std::size_t>(u)];
        if (word(inv.tree, inv.image[static_cast<std::size_t>(bu)]) != word(t, u)) ++roundtrip_fail;
        if (depth(t, u) != left_depth(rot.tree, bu) + 1) ++depth_fail;
        for (NodeId v = 0; v < static_cast<NodeId>(t.size()); ++v) {
          if (v == root) continue;
          NodeId bv = rot.image[static_cast<std::size_t>(v)];
          NodeId w = lca(t, u, v);
          bool comparable = w == u || w == v;
          int l = left_depth(rot.tree, lca(rot.tree, bu, bv));
          int d = depth(t, w);
          ++pairs;
          if (d != l) {
            ++literal_fail;
            if (!comparable) ++incomparable_fail;
          }
          if (d != l + (comparable ? 1 : 0)) ++corrected_fail;
        }
      }
    }
    if (codes.size() != planar.size() || codes.size() != binary.size()) ++bijection_fail;
    for (const auto& b : binary)
      if (shape_code(rotation(rotation_inverse(b).tree).tree) != shape_code(b)) ++roundtrip_fail;
  }
  res.checks.push_back(check("inverse_roundtrip_mismatches", static_cast<double>(roundtrip_fail), 0.0, "=="));
  res.checks.push_back(check("bijection_count_mismatches", static_cast<double>(bijection_fail), 0.0, "=="));
  res.checks.push_back(check("depth_transport_mismatches", static_cast<double>(depth_fail), 0.0, "=="));
  res.checks.push_back(check("lca_transport_incomparable_mismatches", static_cast<double>(incomparable_fail), 0.0, "=="));
  res.checks.push_back(check("lca_transport_corrected_mismatches", static_cast<double>(corrected_fail), 0.0, "=="));
  res.diagnostics.push_back({"planar_trees_checked", static_cast<double>(trees)});
  res.diagnostics.push_back({"node_pairs_checked", static_cast<double>(pairs)});
  res.diagnostics.push_back({"lca_literal_all_pairs_mismatches", static_cast<double>(literal_fail)});
  return res;
}

// ---------------------------------------------------------------------------------------------

CriterionResult coupling_equivalence(const VerifyOptions& opt) {
  CriterionResult res{2, "coupling equivalence", {}, {}, {}};
  kernel::DColour r{{{0.5, 0.5}, {0.25, 0.75}}};
  AtomicMeasure half({{FiniteIndex{0}, 0.5}, {FiniteIndex{1}, 0.5}});
  AtomicMeasure skewed({{FiniteIndex{0}, 0.3}, {FiniteIndex{1}, 0.7}});
  double rrt_diff = 0.0, bst_diff = 0.0, mass_err = 0.0;
  for (const auto* m0 : {&half, &skewed})
    for (int n = 0; n <= 3; ++n) {
      CouplingLaws laws = exact_coupling_law(*m0, r, n);
      rrt_diff = std::max(rrt_diff, max_abs_diff(laws.direct, laws.rrt));
      bst_diff = std::max(bst_diff, max_abs_diff(laws.direct, laws.bst));
      for (const auto* l : {&laws.direct, &laws.rrt, &laws.bst}) mass_err = std::max(mass_err, std::abs(l->total() - 1.0));
    }
  res.checks.push_back(check("exact_direct_vs_rrt_max_abs_diff", rrt_diff, 1e-12));
  res.checks.push_back(check("exact_direct_vs_bst_max_abs_diff", bst_diff, 1e-12));
  res.diagnostics.push_back({"exact_law_total_mass_error", mass_err});

  const std::int64_t n = 1000;
  const std::size_t reps = 10000;
  ReplacementKernel walk = lattice_table_walk({-1, 1}, {0.5, 0.5});
  AtomicMeasure m0 = AtomicMeasure::dirac(Colour{std::int64_t{0}});
  std::vector<double> direct(reps), rrt(reps), bst(reps);
  parallel_for(reps, [&](std::size_t i) {
    RngStream s1 = stream(opt, 2, 1, i), s2 = stream(opt, 2, 2, i), s3 = stream(opt, 2, 3, i);
    UrnTrace t = mvpp_direct(m0, walk, n, s1);
    direct[i] = colour_dot(sample_urn(t, n, s1), {1.0});
    rrt[i] = colour_dot(sample_urn(mvpp_via_rrt(m0, walk, n, s2), s2), {1.0});
    bst[i] = colour_dot(sample_urn(mvpp_via_bst(m0, walk, n, s3), s3), {1.0});
  });
  double crit = ks_critical_two_sample(reps, reps, 0.01);
  res.checks.push_back(check("ks_direct_vs_rrt", ks_two_sample(direct, rrt), crit));
  res.checks.push_back(check("ks_direct_vs_bst", ks_two_sample(direct, bst), crit));
  res.checks.push_back(check("ks_rrt_vs_bst", ks_two_sample(rrt, bst), crit));
  return res;
}

// ---------------------------------------------------------------------------------------------

CriterionResult rrt_profile(const VerifyOptions& opt) {
  CriterionResult res{3, "rrt profile", {}, {}, {}};
  const std::vector<std::int64_t> grid{1000, 10000, 100000};
  const int seeds = 20;
  const double shift = opt.inject_fault ? 1.0 : 0.0;
  std::vector<std::vector<double>> ks(grid.size(), std::vector<double>(seeds));
  parallel_for(seeds, [&](std::size_t i) {
    RngStream s = stream(opt, 3, 1, i);
    GrowingTree t = grow_rrt(grid.back(), s);
    std::vector<std::int64_t> counts;
    std::size_t next = 0;
    // Prefixes of an RRT are RRTs, so one tree serves the whole grid.
    for (std::int64_t u = 0; u <= grid.back(); ++u) {
      auto d = static_cast<std::size_t>(t.depth(static_cast<NodeId>(u)));
      if (counts.size() <= d) counts.resize(d + 1, 0);
      ++counts[d];
      if (u == grid[next]) {
        double ln = log_n(grid[next]);
        WeightedSample sample;
        for (std::size_t k = 0; k < counts.size(); ++k)
          if (counts[k] > 0)
            sample.push_back({(static_cast<double>(k) - ln - shift) / std::sqrt(ln),
                              static_cast<double>(counts[k]) / static_cast<double>(grid[next])});
        ks[next][i] = ks_statistic(sample, law::StdNormal{});
        ++next;
      }
    }
  });
  int passing = 0;
  for (double v : ks.back())
    if (v <= 0.12) ++passing;
  res.checks.push_back(check("seeds_with_ks_at_most_0.12_at_n_1e5", passing, 18, ">="));
  std::vector<double> med;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    med.push_back(median(ks[g]));
    res.diagnostics.push_back({"median_ks_n_" + std::to_string(grid[g]), med.back()});
  }
  res.checks.push_back(check("median_ks_max_increase", std::max(med[1] - med[0], med[2] - med[1]), 0.0));
  res.diagnostics.push_back({"max_ks_n_100000", *std::max_element(ks.back().begin(), ks.back().end())});
  return res;
}

// ---------------------------------------------------------------------------------------------

CriterionResult depth_clts(const VerifyOptions& opt) {
  CriterionResult res{4, "depth central limit theorems", {}, {}, {}};
  const std::int64_t n = 100000;
  const std::size_t reps = 100, draws = 100;
  const double shift = opt.inject_fault ? 1.0 : 0.0;
  const double ln = log_n(n);
  std::vector<std::vector<double>> rrt_z(reps), bst_z(reps);
  std::vector<std::vector<std::int64_t>> rrt_lca(reps), bst_lca(reps);
  parallel_for(reps, [&](std::size_t r) {
    RngStream s = stream(opt, 4, 1, r);
    GrowingTree t = grow_rrt(n, s);
    for (std::size_t j = 0; j < draws; ++j) {
      rrt_z[r].push_back((t.depth(sample_uniform_node(t, s)) - ln - shift) / std::sqrt(ln));
      NodeId u = sample_uniform_node(t, s), v = sample_uniform_node(t, s);
      rrt_lca[r].push_back(t.depth(lca(t, u, v)));
    }
    RngStream sb = stream(opt, 4, 2, r);
    GrowingTree b = grow_bst_leaf(n, sb);
    for (std::size_t j = 0; j < draws; ++j) {
      bst_z[r].push_back((b.depth(sample_uniform_node(b, sb)) - 2.0 * ln - shift) / std::sqrt(2.0 * ln));
      NodeId u = sample_uniform_node(b, sb), v = sample_uniform_node(b, sb);
      bst_lca[r].push_back(b.depth(lca(b, u, v)));
    }
  });
  auto flatten = [](const auto& nested) {
    std::vector<typename std::decay_t<decltype(nested)>::value_type::value_type> out;
    for (const auto& v : nested) out.insert(out.end(), v.begin(), v.end());
    return out;
  };
  res.checks.push_back(check("rrt_depth_ks_n_1e5", ks_statistic(flatten(rrt_z), law::StdNormal{}), 0.1));
  res.checks.push_back(check("bst_depth_ks_n_1e5", ks_statistic(flatten(bst_z), law::StdNormal{}), 0.1));

  auto rrt_pmf = empirical_pmf(flatten(rrt_lca)), bst_pmf = empirical_pmf(flatten(bst_lca));
  for (int start : {0, 1}) {
    res.diagnostics.push_back({"rrt_lca_tv_geometric_half_start_" + std::to_string(start),
                               total_variation(rrt_pmf, law_pmf(law::Geometric{0.5, start}, 60))});
    res.diagnostics.push_back({"bst_lca_tv_geometric_third_start_" + std::to_string(start),
                               total_variation(bst_pmf, law_pmf(law::Geometric{1.0 / 3.0, start}, 80))});
  }

  // Small trees against the exhaustive oracle.
  const int small = 8;
  const std::size_t mc = 100000;
  std::vector<std::int64_t> rrt_small(mc), bst_small(mc);
  parallel_for(mc / 1000, [&](std::size_t block) {
    RngStream s = stream(opt, 4, 3, block);
    for (std::size_t i = block * 1000; i < (block + 1) * 1000; ++i) {
      GrowingTree t = grow_rrt(small, s);
      rrt_small[i] = t.depth(lca(t, sample_uniform_node(t, s), sample_uniform_node(t, s)));
      GrowingTree b = grow_bst_leaf(small, s);
      bst_small[i] = b.depth(lca(b, sample_uniform_node(b, s), sample_uniform_node(b, s)));
    }
  });
  auto rrt_exact = exact_pmf(exact_rrt_joint_depths(small).marginal(2));
  auto bst_exact = exact_pmf(exact_bst_joint_depths(small).depths.marginal(2));
  res.checks.push_back(check("rrt_lca_pmf_tv_n_8", total_variation(empirical_pmf(rrt_small), rrt_exact),
                             3.0 * tv_standard_error(rrt_exact, mc)));
  res.checks.push_back(check("bst_lca_pmf_tv_n_8", total_variation(empirical_pmf(bst_small), bst_exact),
                             3.0 * tv_standard_error(bst_exact, mc)));
  return res;
}

// ---------------------------------------------------------------------------------------------

CriterionResult dcolour_limit(const VerifyOptions& opt) {
  CriterionResult res{5, "d-colour limit", {}, {}, {}};
  Matrix r{{0.6, 0.4}, {0.3, 0.7}};
  Eigenpair e = leading_eigenpair(r);
  res.checks.push_back(check("eigenvector_vs_derived_l1", std::abs(e.v1[0] - 3.0 / 7.0) + std::abs(e.v1[1] - 4.0 / 7.0), 1e-9));
  const std::int64_t n = 100000;
  RngStream s = stream(opt, 5, 1);
  UrnTrace t = mvpp_direct(AtomicMeasure::dirac(FiniteIndex{0}), kernel::DColour{r}, n, s);
  AtomicMeasure m = urn_measure(t);
  double l1 = 0.0;
  for (int i = 0; i < 2; ++i) l1 += std::abs(m.weight_of(FiniteIndex{i}) / static_cast<double>(n) - e.v1[static_cast<std::size_t>(i)]);
  res.checks.push_back(check("composition_l1_to_v1_n_1e5", l1, 0.05));
  res.diagnostics.push_back({"lambda1", e.lambda1});
  return res;
}

// ---------------------------------------------------------------------------------------------

TheoremCheckOptions theorem_options(const VerifyOptions& opt, int criterion, int part, std::vector<std::int64_t> grid,
                                    std::size_t replicas, std::size_t pairs) {
  TheoremCheckOptions o;
  o.n_grid = std::move(grid);
  o.replicas = replicas;
  o.pairs_per_replica = pairs;
  o.root_seed = opt.seed;
  o.stream_offset = stream_base(criterion, part);
  return o;
}

CriterionResult brw_theorem(const VerifyOptions& opt) {
  CriterionResult res{6, "branching random walk theorem", {}, {}, {}};
  const std::int64_t n = 100000;
  AtomicMeasure origin = AtomicMeasure::dirac(make_real({0.0}));

  auto gauss = verify_main_theorem(gaussian_walk({0.0}, {{1.0}}), presets::brw(0.0, 1.0), origin,
                                   theorem_options(opt, 6, 1, {1000, 10000, n}, 250, 40));
  res.checks.push_back(check("gaussian_step_ks_n_1e5", gauss.points.back().ks, 0.05));
  for (const auto& p : gauss.points)
    res.diagnostics.push_back({"gaussian_step_ks_n_" + std::to_string(p.n), p.ks});
  res.diagnostics.push_back({"gaussian_step_decorrelation", gauss.points.back().decorrelation});

  auto coin = verify_main_theorem(lattice_table_walk({-1, 1}, {0.5, 0.5}), presets::brw(0.0, 1.0),
                                  AtomicMeasure::dirac(Colour{std::int64_t{0}}),
                                  theorem_options(opt, 6, 2, {1000, 10000, n}, 250, 40));
  res.checks.push_back(check("coin_step_ks_n_1e5", coin.points.back().ks, 0.05));
  res.diagnostics.push_back({"coin_step_decorrelation", coin.points.back().decorrelation});

  // Pathwise proxy: empirical law of the drawn colours along nested prefixes of one run.
  const std::vector<std::int64_t> grid{1000, 10000, 100000, 1000000};
  const int seeds = 20;
  std::vector<int> drops(seeds, 0);
  ReplacementKernel step = gaussian_walk({0.0}, {{1.0}});
  parallel_for(seeds, [&](std::size_t i) {
    RngStream s = stream(opt, 6, 3, i);
    UrnTrace t = mvpp_direct(origin, step, grid.back(), s);
    std::vector<double> ks;
    for (auto m : grid) {
      double a = std::sqrt(log_n(m));
      std::vector<double> x;
      x.reserve(static_cast<std::size_t>(m));
      for (std::int64_t j = 0; j < m; ++j) x.push_back(colour_dot(t.drawn[static_cast<std::size_t>(j)], {1.0}) / a);
      ks.push_back(ks_statistic(x, law::StdNormal{}));
    }
    for (std::size_t j = 1; j < ks.size(); ++j)
      if (ks[j] <= ks[j - 1]) ++drops[i];
  });
  int monotone = static_cast<int>(std::count_if(drops.begin(), drops.end(), [](int d) { return d >= 2; }));
  res.checks.push_back(check("pathwise_monotone_seeds", monotone, 18, ">="));

  Matrix cov{{1.0, 0.5}, {0.5, 2.0}};
  ReplacementKernel plane = gaussian_walk({0.0, 0.0}, cov);
  AtomicMeasure origin2 = AtomicMeasure::dirac(make_real({0.0, 0.0}));
  const std::vector<std::vector<double>> dirs{{1.0, 0.0}, {0.6, 0.8}};
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    const auto& u = dirs[d];
    double var = u[0] * u[0] * cov[0][0] + 2.0 * u[0] * u[1] * cov[0][1] + u[1] * u[1] * cov[1][1];
    auto o = theorem_options(opt, 6, 4 + static_cast<int>(d), {n}, 250, 40);
    o.direction = u;
    auto rep = verify_main_theorem(plane, presets::brw(0.0, var), origin2, o);
    res.checks.push_back(check("plane_projection_" + std::to_string(d + 1) + "_ks_n_1e5", rep.points.back().ks, 0.05));
  }
  return res;
}

// ---------------------------------------------------------------------------------------------

CriterionResult martingales(const VerifyOptions& opt) {
  CriterionResult res{7, "martingale machinery", {}, {}, {}};
  const double m = 0.5;
  ReplacementKernel k = gaussian_walk({m}, {{1.0}});
  AtomicMeasure origin = AtomicMeasure::dirac(make_real({0.0}));
  CharFn phi = [m](cplx z) { return std::exp(cplx(0.0, 1.0) * z * m - 0.5 * z * z); };

  for (std::int64_t n : {10, 100, 1000}) {
    const std::size_t reps = 10000;
    const double theta = 0.3 / std::sqrt(log_n(n));
    std::vector<double> re(reps), im(reps);
    parallel_for(reps / 100, [&](std::size_t block) {
      RngStream s = stream(opt, 7, 1, static_cast<std::uint64_t>(n) * 1000 + block);
      for (std::size_t i = block * 100; i < (block + 1) * 100; ++i) {
        LabelledTree lt = sbmc_on_rrt(origin, k, n, s);
        cplx t = t_n(project_labels(lt.labels, {1.0}), theta, m, phi);
        re[i] = t.real();
        im[i] = t.imag();
      }
    });
    double se_re = std::sqrt(sample_variance(re) / reps), se_im = std::sqrt(sample_variance(im) / reps);
    double z = std::max(std::abs(mean(re) - 1.0) / se_re, std::abs(mean(im)) / se_im);
    res.checks.push_back(check("mean_t_n_z_score_n_" + std::to_string(n), z, 3.0));
  }

  {
    const std::int64_t n = 100;
    const std::size_t reps = 100000;
    const cplx z1(0.3, 0.0), z2(0.0, 0.2);
    std::vector<double> re(reps), im(reps);
    parallel_for(reps / 1000, [&](std::size_t block) {
      RngStream s = stream(opt, 7, 2, block);
      for (std::size_t i = block * 1000; i < (block + 1) * 1000; ++i) {
        auto x = project_labels(sbmc_on_rrt(origin, k, n, s).labels, {1.0});
        cplx p = fbar_n(x, z1) * fbar_n(x, z2);
        re[i] = p.real();
        im[i] = p.imag();
      }
    });
    cplx exact = pbar_recursion(n, z1, z2, phi, [](cplx) { return cplx(1.0, 0.0); });
    double se_re = std::sqrt(sample_variance(re) / reps), se_im = std::sqrt(sample_variance(im) / reps);
    double z = std::max(std::abs(mean(re) - exact.real()) / se_re, std::abs(mean(im) - exact.imag()) / se_im);
    res.checks.push_back(check("pbar_recursion_z_score_n_100", z, 3.0));
    res.diagnostics.push_back({"pbar_exact_re", exact.real()});
    res.diagnostics.push_back({"pbar_exact_im", exact.imag()});
  }

  double ident = 0.0;
  for (std::int64_t n = 1; n <= 1000000; n *= 10) {
    ident = std::max(ident, std::abs(z_n(n, 1.0) - 1.0));
    ident = std::max(ident, std::abs(z_n(n, 2.0) / static_cast<double>(n + 1) - 1.0));
  }
  res.checks.push_back(check("z_n_identities_relative_error", ident, 1e-10));

  double ratio = 0.0;
  const std::int64_t n = 100000;
  for (double x : {0.5, 1.5, 2.0, 2.5, 3.0}) {
    double asym = std::pow(static_cast<double>(n), x - 1.0) / boost::math::tgamma(x);
    ratio = std::max(ratio, std::abs(z_n(n, x).real() / asym - 1.0));
  }
  res.checks.push_back(check("z_n_asymptotic_ratio_n_1e5", ratio, 1e-3));
  return res;
}

// ---------------------------------------------------------------------------------------------

CriterionResult kdiscrete_checks(const VerifyOptions& opt) {
  CriterionResult res{8, "kappa-discrete urns", {}, {}, {}};
  std::int64_t leaf_fail = 0;
  for (int kappa : {2, 3, 5}) {
    kernel::KDiscrete k{kappa, std::vector<std::int64_t>(static_cast<std::size_t>(kappa), 1), {}};
    AtomicMeasure m0 = AtomicMeasure::dirac(Colour{std::int64_t{0}}, 1.0 / kappa);
    for (std::int64_t n : {0, 1, 10, 1000}) {
      RngStream s = stream(opt, 8, 1, static_cast<std::uint64_t>(kappa) * 10000 + static_cast<std::uint64_t>(n));
      LabelledTree lt = mvpp_kdiscrete(m0, k, n, s);
      auto leaves = static_cast<std::int64_t>(lt.tree.leaf_list().size());
      if (leaves != 1 + n * (kappa - 1)) ++leaf_fail;
      if (std::abs(urn_measure(lt).total_mass() * kappa - static_cast<double>(leaves)) > 1e-9) ++leaf_fail;
    }
  }
  res.checks.push_back(check("leaf_count_mismatches", static_cast<double>(leaf_fail), 0.0, "=="));

  double closed = 0.0, dirichlet = 0.0;
  for (int kappa : {2, 3, 4})
    for (int n = 1; n * (kappa - 1) <= 12; ++n) {
      ExactLaw e = exact_kary_subtree_law(n, kappa);
      closed = std::max(closed, max_abs_diff(e, closed_form_kary(n, kappa)));
      dirichlet = std::max(dirichlet, max_abs_diff(e, dirichlet_form_kary(n, kappa)));
    }
  res.checks.push_back(check("subtree_law_enumerated_vs_closed_form", closed, 1e-10));
  res.checks.push_back(check("subtree_law_enumerated_vs_dirichlet_form", dirichlet, 1e-10));
  res.diagnostics.push_back({"shape_count_form_diff_n4_k2", max_abs_diff(exact_kary_subtree_law(4, 2), shape_count_form_kary(4, 2))});
  res.diagnostics.push_back({"shape_count_form_diff_n3_k3", max_abs_diff(exact_kary_subtree_law(3, 3), shape_count_form_kary(3, 3))});

  double count_err = 0.0;
  for (int kappa : {2, 3, 4})
    for (int m = 0; m <= 8; ++m) {
      double e = static_cast<double>(enumerate_kary_tree_count(m, kappa));
      count_err = std::max(count_err, std::abs(kary_tree_count(m, kappa) - e) / e);
    }
  res.checks.push_back(check("tree_count_relative_error", count_err, 1e-10));

  {
    kernel::KDiscrete k{2, {0, 1}, {}};
    AtomicMeasure m0 = AtomicMeasure::dirac(Colour{std::int64_t{0}}, 0.5);
    double d = 0.0;
    for (int n = 0; n <= 4; ++n)
      d = std::max(d, max_abs_diff(exact_urn_law(m0, k, n, UrnDynamics::WithoutReplacement), exact_kdiscrete_tree_law(m0, k, n)));
    res.checks.push_back(check("urn_vs_tree_exact_law", d, 1e-12));
  }

  const std::int64_t n = 100000;
  kernel::KDiscrete shift{3, {1, 1, 1}, {}};
  AtomicMeasure m0 = AtomicMeasure::dirac(Colour{std::int64_t{0}}, 1.0 / 3.0);
  const std::size_t reps = 10;
  std::vector<double> ratios(reps);
  parallel_for(reps, [&](std::size_t r) {
    RngStream s = stream(opt, 8, 2, r);
    LabelledTree lt = mvpp_kdiscrete(m0, shift, n, s);
    double sum = 0.0;
    for (NodeId u : lt.tree.leaf_list()) sum += colour_dot(lt.labels[static_cast<std::size_t>(u)], {1.0});
    ratios[r] = sum / static_cast<double>(lt.tree.leaf_list().size()) / log_n(n);
  });
  double ratio = mean(ratios);
  res.checks.push_back(check("mean_depth_over_log_n_deviation", std::abs(ratio - 1.5), 0.1));
  res.diagnostics.push_back({"mean_depth_over_log_n", ratio});

  auto rep = verify_main_theorem(shift, presets::kdiscrete(3, 1.0, 0.0), m0, theorem_options(opt, 8, 3, {n}, 100, 50));
  res.checks.push_back(check("rescaled_leaf_label_ks_n_1e5", rep.points.back().ks, 0.12));
  return res;
}

// ---------------------------------------------------------------------------------------------

CriterionResult general_m0(const VerifyOptions& opt) {
  CriterionResult res{9, "general initial measure", {}, {}, {}};
  ReplacementKernel k = constant_walk(1);
  {
    const std::int64_t n = 1000;
    const std::size_t reps = 2000;
    AtomicMeasure m0 = AtomicMeasure::dirac(Colour{std::int64_t{0}}, 2.0);
    std::vector<double> frac(reps);
    std::vector<int> sum_ok(reps, 1);
    parallel_for(reps, [&](std::size_t r) {
      RngStream s = stream(opt, 9, 1, r);
      auto sizes = forest_sizes(mvpp_forest(m0, k, n, s));
      frac[r] = static_cast<double>(sizes[0]) / static_cast<double>(n);
      std::int64_t total = 0;
      for (auto v : sizes) total += v;
      sum_ok[r] = sizes.size() == 2 && total == n;
    });
    res.checks.push_back(check("mass_2_first_fraction_ks_uniform", ks_statistic(frac, law::Uniform01{}), 0.05));
    res.checks.push_back(check("mass_2_size_bookkeeping_failures",
                               static_cast<double>(std::count(sum_ok.begin(), sum_ok.end(), 0)), 0.0, "=="));
  }
  {
    const std::int64_t n = 10000;
    const std::size_t reps = 50;
    AtomicMeasure m0 = AtomicMeasure::dirac(Colour{std::int64_t{0}}, 2.5);
    std::vector<std::vector<double>> frac(reps);
    parallel_for(reps, [&](std::size_t r) {
      RngStream s = stream(opt, 9, 2, r);
      for (auto v : forest_sizes(mvpp_forest(m0, k, n, s))) frac[r].push_back(static_cast<double>(v) / static_cast<double>(n));
    });
    double lowest = 1.0, third = 0.0;
    std::size_t trees_ok = 0, all_positive = 0;
    for (const auto& f : frac) {
      if (f.size() == 3) ++trees_ok;
      double lo = *std::min_element(f.begin(), f.end());
      lowest = std::min(lowest, lo);
      if (lo > 0.001) ++all_positive;
      third += f.back() / static_cast<double>(reps);
    }
    res.checks.push_back(check("mass_2.5_tree_count_ok", static_cast<double>(trees_ok), static_cast<double>(reps), "=="));
    res.checks.push_back(check("mass_2.5_min_fraction", lowest, 0.001, ">"));
    res.diagnostics.push_back({"mass_2.5_replicas_all_above_0.001", static_cast<double>(all_positive)});
    res.diagnostics.push_back({"mass_2.5_mean_fractional_tree_share", third});
  }
  return res;
}

// ---------------------------------------------------------------------------------------------

CriterionResult mminf(const VerifyOptions& opt) {
  CriterionResult res{10, "m/m/infinity example", {}, {}, {}};
  const std::int64_t n = 100000;
  RngStream s = stream(opt, 10, 1);
  UrnTrace t = mvpp_direct(AtomicMeasure::dirac(Colour{std::int64_t{0}}), kernel::MMInfQueue{1.0, 1.0}, n, s);
  AtomicMeasure m = normalize(urn_measure(t));
  std::map<std::int64_t, double> urn;
  for (const auto& a : m.atoms()) urn[std::get<std::int64_t>(a.colour)] += a.weight;
  auto poisson = law_pmf(law::Poisson{1.0}, 40);
  auto pi = mminf_jump_stationary(1.0, 1.0, 40);
  std::map<std::int64_t, double> jump;
  for (std::size_t i = 0; i < pi.size(); ++i) jump[static_cast<std::int64_t>(i)] = pi[i];
  res.checks.push_back(check("tv_urn_vs_poisson_n_1e5", total_variation(urn, poisson), 0.05));
  res.diagnostics.push_back({"tv_urn_vs_jump_chain_stationary", total_variation(urn, jump)});
  res.diagnostics.push_back({"tv_poisson_vs_jump_chain_stationary", total_variation(poisson, jump)});
  return res;
}

// ---------------------------------------------------------------------------------------------

CriterionResult stable_tail(const VerifyOptions& opt) {
  CriterionResult res{11, "stable example tail sanity", {}, {}, {}};
  const double alpha = 1.5;
  auto plan = presets::stable(alpha, 1.0, 0.0, 0.0);
  auto o = theorem_options(opt, 11, 1, {100000}, 250, 40);
  o.reference_draws = 20000;
  auto rep = verify_main_theorem(kernel::StableWalk{alpha, 1.0, 0.0}, plan, AtomicMeasure::dirac(make_real({0.0})), o);
  const auto& x = rep.rescaled_samples;
  double hill = hill_estimator(x, x.size() / 100);
  res.checks.push_back(check("hill_tail_index_lower", hill, alpha - 0.4, ">="));
  res.checks.push_back(check("hill_tail_index_upper", hill, alpha + 0.4, "<="));
  res.diagnostics.push_back({"hill_tail_index", hill});
  res.diagnostics.push_back({"ks_vs_simulated_reference", rep.points.back().ks});
  RngStream s = stream(opt, 11, 2);
  std::vector<double> ref(20000);
  for (double& v : ref) v = simulate_reference(plan, s);
  std::sort(ref.begin(), ref.end());
  for (int q = 1; q < 20; ++q) {
    double p = q / 20.0;
    auto at = [p](const std::vector<double>& v) { return v[static_cast<std::size_t>(p * static_cast<double>(v.size() - 1))]; };
    res.qq.emplace_back(at(x), at(ref));
  }
  return res;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

bool CriterionResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const SubCheck& c) { return c.pass; });
}

bool VerifyReport::pass() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.pass(); });
}

CriterionResult run_criterion(int id, const VerifyOptions& opt) {
  switch (id) {
    case 1: return rotation_transport(opt);
    case 2: return coupling_equivalence(opt);
    case 3: return rrt_profile(opt);
    case 4: return depth_clts(opt);
    case 5: return dcolour_limit(opt);
    case 6: return brw_theorem(opt);
    case 7: return martingales(opt);
    case 8: return kdiscrete_checks(opt);
    case 9: return general_m0(opt);
    case 10: return mminf(opt);
    case 11: return stable_tail(opt);
    default: throw std::invalid_argument("unknown criterion " + std::to_string(id));
  }
}

std::vector<std::string> suite_names() { return {"trees", "coupling", "martingale", "mvpp", "kdiscrete", "all"}; }

std::vector<int> suite_criteria(const std::string& suite) {
  if (suite == "trees") return {1, 3, 4};
  if (suite == "coupling") return {2, 9};
  if (suite == "martingale") return {7};
  if (suite == "mvpp") return {5, 6, 10, 11};
  if (suite == "kdiscrete") return {8};
  if (suite == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  throw std::invalid_argument("unknown suite '" + suite + "'");
}

VerifyReport run_verify_suite(const std::string& suite, const VerifyOptions& opt) {
  VerifyReport r;
  r.suite = suite;
  r.seed = opt.seed;
  r.fault_injected = opt.inject_fault;
  for (int id : suite_criteria(suite)) r.criteria.push_back(run_criterion(id, opt));
  return r;
}

std::string report_json(const VerifyReport& r) {
  Json j;
  j["suite"] = r.suite;
  j["seed"] = r.seed;
  j["fault_injected"] = r.fault_injected;
  j["pass"] = r.pass();
  Json crit = Json::array();
  for (const auto& c : r.criteria) {
    Json jc;
    jc["id"] = c.id;
    jc["name"] = c.name;
    jc["pass"] = c.pass();
    Json checks = Json::array();
    for (const auto& s : c.checks) {
      Json js;
      js["test_name"] = s.test_name;
      js["statistic"] = s.statistic;
      js["threshold"] = s.threshold;
      js["comparator"] = s.comparator;
      js["pass"] = s.pass;
      checks.push_back(js);
    }
    jc["checks"] = checks;
    Json diag = Json::object();
    for (const auto& d : c.diagnostics) diag[d.name] = d.value;
    jc["diagnostics"] = diag;
    if (!c.qq.empty()) {
      Json qq = Json::array();
      for (const auto& [a, b] : c.qq) qq.push_back(Json::array({a, b}));
      jc["qq"] = qq;
    }
    crit.push_back(jc);
  }
  j["criteria"] = crit;
  return j.dump(2) + "\n";
}

std::string report_text(const VerifyReport& r) {
  std::ostringstream os;
  for (const auto& c : r.criteria) {
    os << "criterion " << c.id << " (" << c.name << "): " << (c.pass() ? "PASS" : "FAIL") << "\n";
    for (const auto& s : c.checks)
      os << "  " << (s.pass ? "ok   " : "FAIL ") << s.test_name << " = " << fmt(s.statistic) << " " << s.comparator << " "
         << fmt(s.threshold) << "\n";
    for (const auto& d : c.diagnostics) os << "  diag " << d.name << " = " << fmt(d.value) << "\n";
  }
  return os.str();
}

}  // namespace mvpp
