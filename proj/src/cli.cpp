#include "mvpp/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mvpp/oracle.hpp"
#include "mvpp/process.hpp"
#include "mvpp/stats.hpp"
#include "mvpp/trees.hpp"
#include "mvpp/verify.hpp"

namespace mvpp {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

void write_file(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path().empty() ? fs::path(".") : p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double discrete_tv(const std::vector<double>& values, const ReferenceLaw& l) {
  std::map<std::int64_t, double> emp, ref;
  for (double v : values) emp[std::llround(v)] += 1.0 / static_cast<double>(values.size());
  std::int64_t hi = emp.empty() ? 0 : emp.rbegin()->first;
  for (std::int64_t k = std::min<std::int64_t>(0, emp.empty() ? 0 : emp.begin()->first); k <= hi + 50; ++k) {
    double p = reference_pmf(l, k);
    if (p > 0.0) ref[k] = p;
  }
  return total_variation(emp, ref);
}

std::string theorem_csv(const std::vector<double>& values) {
  std::string s = "value\n";
  for (double v : values) s += num(v) + "\n";
  return s;
}

}  // namespace

int run_simulate(const ExperimentConfig& c, std::ostream& log) {
  auto t0 = std::chrono::steady_clock::now();
  fs::path out(c.out_dir);
  Json summary;
  summary["experiment"] = c.name;
  summary["kind"] = c.kind == ExperimentKind::Profile ? "profile" : "theorem";
  summary["kernel"] = kernel_name(c.kernel);
  summary["plan"] = c.plan.name;
  summary["seed"] = c.seed;
  summary["replicas"] = c.replicas;
  Json points = Json::array();

  if (c.kind == ExperimentKind::Profile) {
    for (std::size_t gi = 0; gi < c.n_grid.size(); ++gi) {
      const std::int64_t n = c.n_grid[gi];
      RngStream s = derive_stream(c.seed, gi);
      LabelledTree lt = sbmc_on_rrt(c.m0, c.kernel, n, s);
      Rescaling rs = plan_rescaling(c.plan, n);
      std::string csv = "node_id,label,rescaled,weight\n";
      WeightedSample sample;
      std::vector<double> values, weights;
      const double w = 1.0 / static_cast<double>(n);
      for (std::size_t u = 0; u < lt.labels.size(); ++u) {
        double x = colour_dot(lt.labels[u], c.direction);
        double z = (x - rs.b[0]) / rs.a;
        csv += std::to_string(u) + "," + num(x) + "," + num(z) + "," + num(w) + "\n";
        sample.push_back({z, w});
        values.push_back(z);
        weights.push_back(w);
      }
      std::string stem = c.name + "_n" + std::to_string(n);
      write_file(out / (stem + ".csv"), csv);
      Json p;
      p["n"] = n;
      p["nodes"] = lt.labels.size();
      p["weighted_ks"] = c.plan.has_limit_law ? Json(ks_statistic(sample, c.plan.limit_law)) : Json(nullptr);
      points.push_back(p);
      if (c.emit_svg)
        write_file(out / (stem + ".svg"), histogram_svg(values, weights, c.name + ", n = " + std::to_string(n),
                                                        "rescaled label", true));
    }
  } else {
    TheoremCheckOptions o;
    o.n_grid = c.n_grid;
    o.replicas = c.replicas;
    o.pairs_per_replica = c.pairs;
    o.direction = c.direction;
    o.root_seed = c.seed;
    TheoremReport rep = verify_main_theorem(c.kernel, c.plan, c.m0, o);
    for (std::size_t gi = 0; gi < rep.points.size(); ++gi) {
      const auto& pt = rep.points[gi];
      const auto& values = rep.samples_per_n[gi];
      std::string stem = c.name + "_n" + std::to_string(pt.n);
      write_file(out / (stem + ".csv"), theorem_csv(values));
      Json p;
      p["n"] = pt.n;
      p["samples"] = pt.samples;
      p["ks"] = pt.ks;
      bool discrete = c.plan.has_limit_law && is_discrete(c.plan.limit_law);
      p["tv"] = discrete ? Json(discrete_tv(values, c.plan.limit_law)) : Json(nullptr);
      p["decorrelation"] = pt.decorrelation;
      p["mean"] = pt.mean;
      p["variance"] = pt.variance;
      points.push_back(p);
      if (c.emit_svg)
        write_file(out / (stem + ".svg"),
                   histogram_svg(values, std::vector<double>(values.size(), 1.0),
                                 c.name + ", n = " + std::to_string(pt.n), "rescaled colour",
                                 c.plan.has_limit_law && !discrete));
    }
  }
  summary["points"] = points;
  write_file(out / (c.name + "_summary.json"), summary.dump(2) + "\n");
  log << "simulate " << c.name << ": " << c.n_grid.size() << " grid points written to " << out.string() << "\n";
  std::fprintf(stderr, "runtime %.2fs\n", elapsed(t0));
  return kExitOk;
}

int run_verify(const std::string& suite, std::uint64_t seed, const std::string& out_dir, bool inject_fault,
               std::ostream& log) {
  auto t0 = std::chrono::steady_clock::now();
  VerifyOptions opt;
  opt.seed = seed;
  opt.inject_fault = inject_fault;
  VerifyReport r = run_verify_suite(suite, opt);
  write_file(fs::path(out_dir) / ("verify_" + suite + ".json"), report_json(r));
  log << report_text(r);
  log << "suite " << suite << ": " << (r.pass() ? "PASS" : "FAIL") << "\n";
  std::fprintf(stderr, "runtime %.2fs\n", elapsed(t0));
  return r.pass() ? kExitOk : kExitFailed;
}

std::vector<std::string> oracle_names() {
  return {"exact_urn_law",     "rrt_joint_depths",  "bst_joint_depths", "kary_subtree_law",
          "closed_form_kary",  "dirichlet_form_kary", "coupling_law"};
}

int run_oracle(const OracleRequest& r, std::ostream& out) {
  auto dcolour = [&]() {
    if (r.kernel == "identity") return kernel::DColour{{{1.0, 0.0}, {0.0, 1.0}}};
    if (r.kernel == "mixing") return kernel::DColour{{{0.5, 0.5}, {0.25, 0.75}}};
    throw std::invalid_argument("unknown oracle kernel '" + r.kernel + "' (identity or mixing)");
  };
  auto m0 = [&]() {
    AtomicMeasure m;
    for (std::size_t i = 0; i < r.m0_weights.size(); ++i)
      if (r.m0_weights[i] > 0.0) m.add(FiniteIndex{static_cast<int>(i)}, r.m0_weights[i]);
    return m;
  };
  ExactLaw law;
  if (r.name == "exact_urn_law") {
    law = exact_urn_law(m0(), dcolour(), r.n);
  } else if (r.name == "rrt_joint_depths") {
    law = exact_rrt_joint_depths(r.n);
  } else if (r.name == "bst_joint_depths") {
    auto b = exact_bst_joint_depths(r.n);
    law = r.variant == "left" ? b.left_depths : b.depths;
  } else if (r.name == "kary_subtree_law") {
    law = exact_kary_subtree_law(r.n, r.kappa);
  } else if (r.name == "closed_form_kary") {
    law = closed_form_kary(r.n, r.kappa);
  } else if (r.name == "dirichlet_form_kary") {
    law = dirichlet_form_kary(r.n, r.kappa);
  } else if (r.name == "coupling_law") {
    // Couplings are defined for probability measures, so the weights are rescaled.
    auto c = exact_coupling_law(normalize(m0()), dcolour(), r.n);
    law = r.variant == "rrt" ? c.rrt : r.variant == "bst" ? c.bst : c.direct;
  } else {
    throw std::invalid_argument("unknown oracle '" + r.name + "'");
  }
  law.write_csv(out);
  return kExitOk;
}

int run_profile(std::int64_t n, std::uint64_t seed, const std::string& out_dir, bool emit_svg, std::ostream& log) {
  if (n < 1) throw std::invalid_argument("profile: n must be at least 1");
  RngStream s = derive_stream(seed, 0);
  GrowingTree t = grow_rrt(n, s);
  fs::path out(out_dir);
  std::string stem = "profile_n" + std::to_string(n);
  std::string csv = "node_id,parent_id,depth\n";
  for (std::size_t u = 0; u < t.size(); ++u)
    csv += std::to_string(u) + "," + std::to_string(t.parent(static_cast<NodeId>(u))) + "," +
           std::to_string(t.depth(static_cast<NodeId>(u))) + "\n";
  write_file(out / (stem + ".csv"), csv);
  std::ostringstream measure;
  profile(t).write_csv(measure);
  write_file(out / (stem + "_measure.csv"), measure.str());
  if (emit_svg && n >= 3) {
    double ln = std::log(static_cast<double>(n));
    std::vector<double> values, weights;
    for (std::size_t u = 0; u < t.size(); ++u) {
      values.push_back((t.depth(static_cast<NodeId>(u)) - ln) / std::sqrt(ln));
      weights.push_back(1.0 / static_cast<double>(n));
    }
    write_file(out / (stem + ".svg"), histogram_svg(values, weights, "RRT profile, n = " + std::to_string(n),
                                                    "(depth - log n) / sqrt(log n)", true));
  }
  log << "profile n=" << n << ": " << t.size() << " nodes written to " << (out / (stem + ".csv")).string() << "\n";
  return kExitOk;
}

std::string histogram_svg(const std::vector<double>& values, const std::vector<double>& weights, const std::string& title,
                          const std::string& x_label, bool normal_overlay) {
  if (values.empty() || values.size() != weights.size()) throw std::invalid_argument("histogram_svg: bad input");
  const double width = 640, height = 400, left = 60, right = 20, top = 40, bottom = 50;
  const double pw = width - left - right, ph = height - top - bottom;
  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  if (normal_overlay) {
    lo = std::min(lo, -3.5);
    hi = std::max(hi, 3.5);
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const int bins = 40;
  const double bw = (hi - lo) / bins;
  std::vector<double> mass(bins, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    int b = std::min(bins - 1, static_cast<int>((values[i] - lo) / bw));
    mass[static_cast<std::size_t>(b)] += weights[i];
    total += weights[i];
  }
  std::vector<double> dens(bins);
  double ymax = 0.0;
  for (int b = 0; b < bins; ++b) {
    dens[static_cast<std::size_t>(b)] = mass[static_cast<std::size_t>(b)] / (total * bw);
    ymax = std::max(ymax, dens[static_cast<std::size_t>(b)]);
  }
  const double phi0 = 1.0 / std::sqrt(2.0 * M_PI);
  if (normal_overlay) ymax = std::max(ymax, phi0);
  ymax *= 1.1;
  auto sx = [&](double x) { return left + (x - lo) / (hi - lo) * pw; };
  auto sy = [&](double y) { return top + ph - y / ymax * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  for (int b = 0; b < bins; ++b) {
    double x0 = sx(lo + b * bw), y = sy(dens[static_cast<std::size_t>(b)]);
    os << "<rect x=\"" << short_num(x0) << "\" y=\"" << short_num(y) << "\" width=\"" << short_num(pw / bins)
       << "\" height=\"" << short_num(top + ph - y) << "\" fill=\"#8fb3d9\" stroke=\"#3b6ea5\" stroke-width=\"0.5\"/>\n";
  }
  if (normal_overlay) {
    os << "<path d=\"";
    for (int i = 0; i <= 200; ++i) {
      double x = lo + (hi - lo) * i / 200.0;
      os << (i ? " L" : "M") << short_num(sx(x)) << " " << short_num(sy(phi0 * std::exp(-0.5 * x * x)));
    }
    os << "\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << width - right - 5 << "\" y=\"" << top + 15
       << "\" text-anchor=\"end\" fill=\"#c0392b\">standard normal density</text>\n";
  }
  // Axes with five ticks each.
  os << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    double x = lo + (hi - lo) * i / 4.0, y = ymax * i / 4.0;
    os << "<line x1=\"" << short_num(sx(x)) << "\" y1=\"" << top + ph << "\" x2=\"" << short_num(sx(x)) << "\" y2=\""
       << top + ph + 5 << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << short_num(sx(x)) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << short_num(x)
       << "</text>\n";
    os << "<line x1=\"" << left - 5 << "\" y1=\"" << short_num(sy(y)) << "\" x2=\"" << left << "\" y2=\""
       << short_num(sy(y)) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << left - 8 << "\" y=\"" << short_num(sy(y) + 4) << "\" text-anchor=\"end\">" << short_num(y)
       << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
  os << "<text x=\"15\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 " << top + ph / 2
     << ")\">density</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace mvpp
