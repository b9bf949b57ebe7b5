#include "mvpp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mvpp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void space_mismatch(const std::string& kernel, const Colour& x) {
  throw std::invalid_argument("kernel " + kernel + " cannot act on colour " + colour_to_string(x));
}

std::int64_t as_lattice(const std::string& kernel, const Colour& x) {
  if (const auto* v = std::get_if<std::int64_t>(&x)) return *v;
  space_mismatch(kernel, x);
}

std::vector<double> draw_increment(const Increment& inc, RngStream& s) {
  return std::visit(overloaded{
                        [](const increment::Constant& c) { return c.value; },
                        [&](const increment::Gaussian& g) {
                          std::size_t d = g.mean.size();
                          std::vector<double> z(d), out = g.mean;
                          for (auto& v : z) v = s.next_standard_normal();
                          for (std::size_t i = 0; i < d; ++i)
                            for (std::size_t j = 0; j <= i; ++j) out[i] += g.chol[i][j] * z[j];
                          return out;
                        },
                        [&](const increment::Table& t) {
                          double u = s.next_uniform(), acc = 0.0;
                          for (std::size_t i = 0; i < t.probs.size(); ++i) {
                            acc += t.probs[i];
                            if (u < acc) return t.values[i];
                          }
                          return t.values.back();
                        },
                    },
                    inc);
}

std::size_t increment_dim(const Increment& inc) {
  return std::visit(overloaded{
                        [](const increment::Constant& c) { return c.value.size(); },
                        [](const increment::Gaussian& g) { return g.mean.size(); },
                        [](const increment::Table& t) { return t.values.empty() ? 0 : t.values[0].size(); },
                    },
                    inc);
}

Matrix cholesky(const Matrix& a) {
  std::size_t d = a.size();
  Matrix l(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      if (i == j) {
        if (s < -1e-12) throw std::invalid_argument("covariance is not positive semi-definite");
        l[i][i] = std::sqrt(std::max(0.0, s));
      } else {
        l[i][j] = l[j][j] > 0.0 ? s / l[j][j] : 0.0;
      }
    }
  return l;
}

}  // namespace

std::string kernel_name(const ReplacementKernel& k) {
  static const char* names[] = {"dcolour", "random_walk", "stable_walk", "mminf_queue", "kdiscrete"};
  return names[k.index()];
}

void validate_kernel(const ReplacementKernel& k) {
  auto bad = [&](const std::string& m) { throw std::invalid_argument("invalid " + kernel_name(k) + " kernel: " + m); };
  std::visit(overloaded{
                 [&](const kernel::DColour& d) {
                   if (d.rows.empty()) bad("empty matrix");
                   for (const auto& row : d.rows) {
                     if (row.size() != d.rows.size()) bad("matrix must be square");
                     double s = 0.0;
                     for (double v : row) {
                       if (v < 0.0) bad("negative entry");
                       s += v;
                     }
                     if (std::abs(s - 1.0) > 1e-12) bad("rows must sum to 1");
                   }
                 },
                 [&](const kernel::RandomWalk& w) {
                   std::size_t d = increment_dim(w.delta);
                   if (d == 0 || d > static_cast<std::size_t>(kMaxDim)) bad("increment dimension out of range");
                   if (w.mean.size() != d || w.cov.size() != d) bad("declared moments have the wrong dimension");
                   if (w.lattice && d != 1) bad("lattice walks are one-dimensional");
                   if (const auto* t = std::get_if<increment::Table>(&w.delta)) {
                     if (t->values.size() != t->probs.size() || t->values.empty()) bad("increment table shape");
                     double s = 0.0;
                     for (double p : t->probs) s += p;
                     if (std::abs(s - 1.0) > 1e-12) bad("increment probabilities must sum to 1");
                   }
                   if (w.lattice) {
                     auto integral = [](double v) { return std::floor(v) == v; };
                     if (const auto* c = std::get_if<increment::Constant>(&w.delta)) {
                       if (!integral(c->value[0])) bad("lattice increments must be integers");
                     } else if (const auto* t = std::get_if<increment::Table>(&w.delta)) {
                       for (const auto& v : t->values)
                         if (!integral(v[0])) bad("lattice increments must be integers");
                     } else {
                       bad("gaussian increments need a real colour space");
                     }
                   }
                 },
                 [&](const kernel::StableWalk& w) {
                   if (!(w.alpha > 0.0 && w.alpha <= 2.0)) bad("alpha must lie in (0,2]");
                   if (!(w.scale > 0.0)) bad("scale must be positive");
                   if (!(w.skew >= -1.0 && w.skew <= 1.0)) bad("skew must lie in [-1,1]");
                 },
                 [&](const kernel::MMInfQueue& q) {
                   if (!(q.lambda > 0.0 && q.mu > 0.0)) bad("rates must be positive");
                 },
                 [&](const kernel::KDiscrete& kd) {
                   if (kd.kappa < 1) bad("kappa must be positive");
                   if (kd.shifts.empty() == kd.index_table.empty()) bad("give exactly one of shifts or index_table");
                   if (!kd.shifts.empty() && kd.shifts.size() != static_cast<std::size_t>(kd.kappa))
                     bad("shift table must have kappa entries");
                   for (const auto& row : kd.index_table) {
                     if (row.size() != static_cast<std::size_t>(kd.kappa)) bad("index table rows must have kappa entries");
                     for (int v : row)
                       if (v < 0 || v >= static_cast<int>(kd.index_table.size())) bad("index table entry out of range");
                   }
                 },
             },
             k);
}

kernel::RandomWalk gaussian_walk(const std::vector<double>& mean, const Matrix& cov) {
  kernel::RandomWalk w;
  w.delta = increment::Gaussian{mean, cholesky(cov)};
  w.lattice = false;
  w.mean = mean;
  w.cov = cov;
  return w;
}

kernel::RandomWalk constant_walk(std::int64_t step) {
  kernel::RandomWalk w;
  w.delta = increment::Constant{{static_cast<double>(step)}};
  w.lattice = true;
  w.mean = {static_cast<double>(step)};
  w.cov = {{0.0}};
  return w;
}

kernel::RandomWalk lattice_table_walk(const std::vector<std::int64_t>& values, const std::vector<double>& probs) {
  increment::Table t;
  double m = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    t.values.push_back({static_cast<double>(values[i])});
    m += probs[i] * static_cast<double>(values[i]);
    m2 += probs[i] * static_cast<double>(values[i]) * static_cast<double>(values[i]);
  }
  t.probs = probs;
  kernel::RandomWalk w;
  w.delta = t;
  w.lattice = true;
  w.mean = {m};
  w.cov = {{m2 - m * m}};
  return w;
}

std::vector<Colour> kdiscrete_tuple(const kernel::KDiscrete& k, const Colour& x) {
  std::vector<Colour> out;
  out.reserve(static_cast<std::size_t>(k.kappa));
  if (!k.shifts.empty()) {
    std::int64_t v = as_lattice("kdiscrete", x);
    for (std::int64_t sh : k.shifts) out.emplace_back(v + sh);
  } else {
    const auto* f = std::get_if<FiniteIndex>(&x);
    if (!f || f->index < 0 || f->index >= static_cast<int>(k.index_table.size())) space_mismatch("kdiscrete", x);
    for (int v : k.index_table[static_cast<std::size_t>(f->index)]) out.emplace_back(FiniteIndex{v});
  }
  return out;
}

Colour kernel_sample(const ReplacementKernel& k, const Colour& x, RngStream& s) {
  return std::visit(
      overloaded{
          [&](const kernel::DColour& d) -> Colour {
            const auto* f = std::get_if<FiniteIndex>(&x);
            if (!f || f->index < 0 || f->index >= static_cast<int>(d.rows.size())) space_mismatch("dcolour", x);
            const auto& row = d.rows[static_cast<std::size_t>(f->index)];
            double u = s.next_uniform(), acc = 0.0;
            int last = 0;
            for (std::size_t j = 0; j < row.size(); ++j) {
              if (row[j] <= 0.0) continue;
              acc += row[j];
              last = static_cast<int>(j);
              if (u < acc) return FiniteIndex{static_cast<int>(j)};
            }
            return FiniteIndex{last};
          },
          [&](const kernel::RandomWalk& w) -> Colour {
            auto inc = draw_increment(w.delta, s);
            if (w.lattice) return as_lattice("random_walk", x) + static_cast<std::int64_t>(inc[0]);
            const auto* p = std::get_if<RealPoint>(&x);
            if (!p || p->dim != static_cast<int>(inc.size())) space_mismatch("random_walk", x);
            RealPoint out = *p;
            for (int i = 0; i < out.dim; ++i) out.x[static_cast<std::size_t>(i)] += inc[static_cast<std::size_t>(i)];
            return out;
          },
          [&](const kernel::StableWalk& w) -> Colour {
            const auto* p = std::get_if<RealPoint>(&x);
            if (!p || p->dim != 1) space_mismatch("stable_walk", x);
            RealPoint out = *p;
            out.x[0] += w.scale * s.next_stable(w.alpha, w.skew);
            return out;
          },
          [&](const kernel::MMInfQueue& q) -> Colour {
            std::int64_t v = as_lattice("mminf_queue", x);
            if (v < 0) throw std::invalid_argument("mminf_queue: negative state " + std::to_string(v));
            double up = q.lambda / (q.lambda + static_cast<double>(v) * q.mu);
            return s.next_uniform() < up ? v + 1 : v - 1;
          },
          [&](const kernel::KDiscrete& kd) -> Colour {
            auto t = kdiscrete_tuple(kd, x);
            return t[static_cast<std::size_t>(s.next_below(t.size()))];
          },
      },
      k);
}

AtomicMeasure kernel_atoms(const ReplacementKernel& k, const Colour& x) {
  const auto* kd = std::get_if<kernel::KDiscrete>(&k);
  if (!kd) throw std::invalid_argument("kernel_atoms needs a kdiscrete kernel, got " + kernel_name(k));
  std::vector<Atom> atoms;
  for (const auto& c : kdiscrete_tuple(*kd, x)) atoms.push_back({c, 1.0 / kd->kappa});
  return AtomicMeasure(atoms);
}

std::vector<Colour> companion_chain(const ReplacementKernel& k, const Colour& x0, std::int64_t n, RngStream& s) {
  if (n < 0) throw std::invalid_argument("companion_chain: n must be non-negative");
  std::vector<Colour> w;
  w.reserve(static_cast<std::size_t>(n) + 1);
  w.push_back(x0);
  for (std::int64_t i = 0; i < n; ++i) w.push_back(kernel_sample(k, w.back(), s));
  return w;
}

std::vector<Colour> sym_shuffle(std::vector<Colour> atoms, RngStream& s) {
  for (std::size_t i = atoms.size(); i > 1; --i) {
    auto j = static_cast<std::size_t>(s.next_below(i));
    std::swap(atoms[i - 1], atoms[j]);
  }
  return atoms;
}

bool is_irreducible(const Matrix& r) {
  std::size_t d = r.size();
  for (std::size_t start = 0; start < d; ++start) {
    std::vector<bool> seen(d, false);
    std::vector<std::size_t> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
      std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < d; ++j)
        if (r[i][j] > 0.0 && !seen[j]) {
          seen[j] = true;
          stack.push_back(j);
        }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) return false;
  }
  return true;
}

Eigenpair leading_eigenpair(const Matrix& r, double tol, int max_iter) {
  std::size_t d = r.size();
  if (d == 0) throw std::invalid_argument("leading_eigenpair: empty matrix");
  for (const auto& row : r) {
    if (row.size() != d) throw std::invalid_argument("leading_eigenpair: matrix must be square");
    for (double v : row)
      if (v < 0.0) throw std::invalid_argument("leading_eigenpair: matrix must be non-negative");
  }
  if (!is_irreducible(r)) throw std::runtime_error("leading_eigenpair: matrix is reducible");
  // Non-uniform start so that periodic matrices cannot converge by accident.
  std::vector<double> v(d);
  for (std::size_t i = 0; i < d; ++i) v[i] = static_cast<double>(i + 1);
  double s0 = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= s0;
  Eigenpair e;
  for (int it = 1; it <= max_iter; ++it) {
    std::vector<double> w(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) w[j] += r[i][j] * v[i];
    double lam = std::accumulate(w.begin(), w.end(), 0.0);
    if (!(lam > 0.0)) throw std::runtime_error("leading_eigenpair: iteration collapsed to zero");
    double diff = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      w[j] /= lam;
      diff += std::abs(w[j] - v[j]);
    }
    v = std::move(w);
    if (diff < tol) {
      e.lambda1 = lam;
      e.v1 = v;
      e.iterations = it;
      return e;
    }
  }
  throw std::runtime_error("leading_eigenpair: no convergence after " + std::to_string(max_iter) +
                           " iterations (periodic matrix?)");
}

MomentCheck validate_declared_moments(const kernel::RandomWalk& w, RngStream& s, std::int64_t draws) {
  validate_kernel(w);
  std::size_t d = w.mean.size();
  std::vector<double> sum(d, 0.0), sum2(d, 0.0), sum4(d, 0.0);
  std::vector<std::vector<double>> raw;
  for (std::int64_t i = 0; i < draws; ++i) {
    auto x = draw_increment(w.delta, s);
    for (std::size_t j = 0; j < d; ++j) {
      double c = x[j] - w.mean[j];
      sum[j] += c;
      sum2[j] += c * c;
      sum4[j] += c * c * c * c;
    }
  }
  MomentCheck r;
  double n = static_cast<double>(draws);
  std::ostringstream msg;
  for (std::size_t j = 0; j < d; ++j) {
    double m = sum[j] / n;
    double v = sum2[j] / n - m * m;
    r.sample_mean.push_back(w.mean[j] + m);
    r.sample_var.push_back(v);
    double sd_mean = std::sqrt(w.cov[j][j] / n);
    double var_of_sq = sum4[j] / n - (sum2[j] / n) * (sum2[j] / n);
    double sd_var = std::sqrt(std::max(0.0, var_of_sq) / n);
    bool ok_m = std::abs(m) <= 3.0 * sd_mean + 1e-12;
    // Second moment about the declared mean is unbiased for the declared variance.
    bool ok_v = std::abs(sum2[j] / n - w.cov[j][j]) <= 3.0 * sd_var + 1e-12;
    if (!ok_m) msg << "component " << j << " mean off by " << m << "; ";
    if (!ok_v) msg << "component " << j << " variance " << v << " vs declared " << w.cov[j][j] << "; ";
    r.ok = r.ok && ok_m && ok_v;
  }
  r.message = msg.str();
  return r;
}

std::vector<double> mminf_jump_stationary(double lambda, double mu, std::size_t kmax) {
  double rho = lambda / mu;
  std::vector<double> p(kmax + 1);
  double total = 0.0;
  for (std::size_t x = 0; x <= kmax; ++x) {
    double pois = std::exp(static_cast<double>(x) * std::log(rho) - rho - std::lgamma(static_cast<double>(x) + 1.0));
    p[x] = pois * (lambda + static_cast<double>(x) * mu);
    total += p[x];
  }
  for (double& v : p) v /= total;
  return p;
}

Rescaling plan_rescaling(const RenormalisationPlan& p, std::int64_t n) {
  if (n < 2) throw std::invalid_argument("plan_rescaling: n must be at least 2");
  double t = p.time_factor * std::log(static_cast<double>(n));
  double a = p.a(t);
  if (!(a > 0.0)) throw std::invalid_argument("plan " + p.name + " gives a non-positive a(n)");
  return Rescaling{a, {p.b(t)}};
}

namespace presets {

RenormalisationPlan brw(double m, double sigma2) {
  RenormalisationPlan p;
  p.name = "brw";
  p.a = [](double t) { return std::sqrt(t); };
  p.b = [m](double t) { return m * t; };
  p.f = [m](double x) { return m * x; };
  p.g = [](double) { return 1.0; };
  p.gamma_reference = law::Normal{0.0, sigma2};
  p.has_limit_law = true;
  p.limit_law = law::Normal{0.0, sigma2 + m * m};
  return p;
}

RenormalisationPlan ergodic(const ReferenceLaw& gamma) {
  RenormalisationPlan p;
  p.name = "ergodic";
  p.a = [](double) { return 1.0; };
  p.b = [](double) { return 0.0; };
  p.f = [](double) { return 0.0; };
  p.g = [](double) { return 1.0; };
  p.gamma_reference = gamma;
  p.has_limit_law = has_cdf(gamma);
  p.limit_law = gamma;
  return p;
}

RenormalisationPlan stable(double alpha, double scale, double skew, double m) {
  RenormalisationPlan p;
  p.name = "stable";
  p.a = [alpha](double t) { return std::pow(t, 1.0 / alpha); };
  double drift = alpha < 1.0 ? 0.0 : m;
  p.b = [drift](double t) { return drift * t; };
  p.f = [](double) { return 0.0; };
  p.g = [](double) { return 1.0; };
  p.gamma_reference = law::Stable{alpha, skew, scale};
  p.has_limit_law = false;
  return p;
}

RenormalisationPlan kdiscrete(int kappa, double m, double sigma2) {
  if (kappa < 2) throw std::invalid_argument("kdiscrete preset needs kappa >= 2");
  RenormalisationPlan p = brw(m, sigma2);
  p.name = "kdiscrete";
  p.time_factor = 1.0 + 1.0 / (kappa - 1);
  return p;
}

}  // namespace presets

double simulate_reference(const RenormalisationPlan& plan, RngStream& s) {
  return simulate_reference(plan.gamma_reference, plan.f, plan.g, s);
}

}  // namespace mvpp
