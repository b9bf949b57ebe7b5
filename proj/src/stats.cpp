#include "mvpp/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace mvpp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double poisson_cdf(double rate, double x) {
  if (x < 0.0) return 0.0;
  double k = std::floor(x);
  return boost::math::gamma_q(k + 1.0, rate);
}

double poisson_pmf(double rate, std::int64_t k) {
  if (k < 0) return 0.0;
  return std::exp(static_cast<double>(k) * std::log(rate) - rate - std::lgamma(static_cast<double>(k) + 1.0));
}

double discrete_cdf(const law::Discrete& d, double x) {
  double s = 0.0;
  for (std::size_t i = 0; i < d.probs.size(); ++i) {
    if (static_cast<double>(d.offset + static_cast<std::int64_t>(i)) <= x) s += d.probs[i];
  }
  return std::min(1.0, s);
}

}  // namespace

WeightedSample unit_weights(const std::vector<double>& values) {
  WeightedSample w;
  w.reserve(values.size());
  for (double v : values) w.push_back({v, 1.0});
  return w;
}

std::string law_name(const ReferenceLaw& l) {
  return std::visit(overloaded{
                        [](const law::StdNormal&) { return std::string("StdNormal"); },
                        [](const law::Normal&) { return std::string("Normal"); },
                        [](const law::Poisson&) { return std::string("Poisson"); },
                        [](const law::Geometric&) { return std::string("Geometric"); },
                        [](const law::DirichletFlat&) { return std::string("DirichletFlat"); },
                        [](const law::Beta&) { return std::string("Beta"); },
                        [](const law::Uniform01&) { return std::string("Uniform01"); },
                        [](const law::NormalMulti&) { return std::string("NormalMulti"); },
                        [](const law::Discrete&) { return std::string("Discrete"); },
                        [](const law::Stable&) { return std::string("Stable"); },
                    },
                    l);
}

void validate_law(const ReferenceLaw& l) {
  auto bad = [](const std::string& m) { throw std::invalid_argument("invalid reference law: " + m); };
  std::visit(overloaded{
                 [](const law::StdNormal&) {},
                 [&](const law::Normal& n) {
                   if (!(n.var >= 0.0)) bad("normal variance must be non-negative");
                 },
                 [&](const law::Poisson& p) {
                   if (!(p.rate > 0.0)) bad("poisson rate must be positive");
                 },
                 [&](const law::Geometric& g) {
                   if (!(g.p > 0.0 && g.p <= 1.0)) bad("geometric p must lie in (0,1]");
                   if (g.start != 0 && g.start != 1) bad("geometric support must start at 0 or 1");
                 },
                 [&](const law::DirichletFlat& d) {
                   if (d.m < 2) bad("dirichlet needs m >= 2");
                 },
                 [&](const law::Beta& b) {
                   if (!(b.a > 0.0 && b.b > 0.0)) bad("beta parameters must be positive");
                 },
                 [](const law::Uniform01&) {},
                 [&](const law::NormalMulti& n) {
                   if (n.mean.empty() || n.cov.size() != n.mean.size()) bad("normal covariance shape");
                   for (const auto& row : n.cov)
                     if (row.size() != n.mean.size()) bad("normal covariance shape");
                 },
                 [&](const law::Discrete& d) {
                   double s = 0.0;
                   for (double p : d.probs) {
                     if (p < 0.0) bad("negative probability");
                     s += p;
                   }
                   if (std::abs(s - 1.0) > 1e-9) bad("discrete probabilities must sum to 1");
                 },
                 [&](const law::Stable& st) {
                   if (!(st.alpha > 0.0 && st.alpha <= 2.0)) bad("stable alpha must lie in (0,2]");
                   if (!(st.skew >= -1.0 && st.skew <= 1.0)) bad("stable skew must lie in [-1,1]");
                   if (!(st.scale > 0.0)) bad("stable scale must be positive");
                 },
             },
             l);
}

bool is_discrete(const ReferenceLaw& l) {
  return std::holds_alternative<law::Poisson>(l) || std::holds_alternative<law::Geometric>(l) ||
         std::holds_alternative<law::Discrete>(l);
}

bool has_cdf(const ReferenceLaw& l) {
  return !std::holds_alternative<law::Stable>(l) && !std::holds_alternative<law::NormalMulti>(l);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double reference_cdf(const ReferenceLaw& l, double x) {
  validate_law(l);
  return std::visit(
      overloaded{
          [&](const law::StdNormal&) { return normal_cdf(x); },
          [&](const law::Normal& n) {
            if (n.var == 0.0) return x >= n.mean ? 1.0 : 0.0;
            return normal_cdf((x - n.mean) / std::sqrt(n.var));
          },
          [&](const law::Poisson& p) { return poisson_cdf(p.rate, x); },
          [&](const law::Geometric& g) {
            double k = std::floor(x) - g.start;
            if (k < 0.0) return 0.0;
            return 1.0 - std::pow(1.0 - g.p, k + 1.0);
          },
          [&](const law::DirichletFlat& d) {
            if (x <= 0.0) return 0.0;
            if (x >= 1.0) return 1.0;
            return 1.0 - std::pow(1.0 - x, d.m - 1);
          },
          [&](const law::Beta& b) {
            if (x <= 0.0) return 0.0;
            if (x >= 1.0) return 1.0;
            return boost::math::ibeta(b.a, b.b, x);
          },
          [&](const law::Uniform01&) { return std::clamp(x, 0.0, 1.0); },
          [&](const law::NormalMulti&) -> double {
            throw std::invalid_argument("multivariate normal has no scalar CDF; project it first");
          },
          [&](const law::Discrete& d) { return discrete_cdf(d, x); },
          [&](const law::Stable&) -> double {
            throw std::invalid_argument("stable reference is simulation-only");
          },
      },
      l);
}

double reference_cdf_left(const ReferenceLaw& l, double x) {
  if (const auto* n = std::get_if<law::Normal>(&l); n && n->var == 0.0) return x > n->mean ? 1.0 : 0.0;
  if (!is_discrete(l)) return reference_cdf(l, x);
  double f = std::floor(x);
  if (f == x) return reference_cdf(l, x - 1.0);
  return reference_cdf(l, x);
}

double reference_pmf(const ReferenceLaw& l, std::int64_t k) {
  validate_law(l);
  return std::visit(overloaded{
                        [&](const law::Poisson& p) { return poisson_pmf(p.rate, k); },
                        [&](const law::Geometric& g) {
                          if (k < g.start) return 0.0;
                          return g.p * std::pow(1.0 - g.p, static_cast<double>(k - g.start));
                        },
                        [&](const law::Discrete& d) {
                          std::int64_t i = k - d.offset;
                          if (i < 0 || i >= static_cast<std::int64_t>(d.probs.size())) return 0.0;
                          return d.probs[static_cast<std::size_t>(i)];
                        },
                        [&](const auto&) -> double {
                          throw std::invalid_argument("reference_pmf: law " + law_name(l) + " is not discrete");
                        },
                    },
                    l);
}

law::Normal project(const law::NormalMulti& l, const std::vector<double>& u) {
  validate_law(l);
  if (u.size() != l.mean.size()) throw std::invalid_argument("project: dimension mismatch");
  law::Normal out{0.0, 0.0};
  for (std::size_t i = 0; i < u.size(); ++i) {
    out.mean += u[i] * l.mean[i];
    for (std::size_t j = 0; j < u.size(); ++j) out.var += u[i] * l.cov[i][j] * u[j];
  }
  return out;
}

double sample_reference(const ReferenceLaw& l, RngStream& s) {
  validate_law(l);
  return std::visit(
      overloaded{
          [&](const law::StdNormal&) { return s.next_standard_normal(); },
          [&](const law::Normal& n) { return n.mean + std::sqrt(n.var) * s.next_standard_normal(); },
          [&](const law::Poisson& p) {
            // Inversion; rates used here are small.
            double u = s.next_uniform();
            std::int64_t k = 0;
            double pk = std::exp(-p.rate), cdf = pk;
            while (u >= cdf && k < 100000) {
              ++k;
              pk *= p.rate / static_cast<double>(k);
              cdf += pk;
              if (pk == 0.0) break;
            }
            return static_cast<double>(k);
          },
          [&](const law::Geometric& g) {
            if (g.p == 1.0) return static_cast<double>(g.start);
            double u = s.next_uniform();
            return g.start + std::floor(std::log1p(-u) / std::log1p(-g.p));
          },
          [&](const law::DirichletFlat& d) {
            std::vector<double> a(static_cast<std::size_t>(d.m), 1.0);
            return s.next_dirichlet(a)[0];
          },
          [&](const law::Beta& b) { return s.next_beta(b.a, b.b); },
          [&](const law::Uniform01&) { return s.next_uniform(); },
          [&](const law::NormalMulti&) -> double {
            throw std::invalid_argument("sample_reference: project the multivariate normal first");
          },
          [&](const law::Discrete& d) {
            double u = s.next_uniform(), acc = 0.0;
            for (std::size_t i = 0; i < d.probs.size(); ++i) {
              acc += d.probs[i];
              if (u < acc) return static_cast<double>(d.offset + static_cast<std::int64_t>(i));
            }
            return static_cast<double>(d.offset + static_cast<std::int64_t>(d.probs.size()) - 1);
          },
          [&](const law::Stable& st) { return st.scale * s.next_stable(st.alpha, st.skew); },
      },
      l);
}

double simulate_reference(const ReferenceLaw& gamma, const std::function<double(double)>& f,
                          const std::function<double(double)>& g, RngStream& s) {
  double big_gamma = sample_reference(gamma, s);
  double lambda = s.next_standard_normal();
  return big_gamma * g(lambda) + f(lambda);
}

double ks_statistic(const WeightedSample& sample, const ReferenceLaw& l) {
  if (sample.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  validate_law(l);
  WeightedSample s = sample;
  double total = 0.0;
  for (const auto& p : s) {
    if (!(p.weight > 0.0)) throw std::invalid_argument("ks_statistic: weights must be positive");
    total += p.weight;
  }
  if (!(total > 0.0)) throw std::invalid_argument("ks_statistic: zero total weight");
  std::sort(s.begin(), s.end(), [](const WeightedPoint& a, const WeightedPoint& b) { return a.value < b.value; });
  double d = 0.0, acc = 0.0;
  std::size_t i = 0;
  while (i < s.size()) {
    double x = s[i].value;
    double before = acc / total;
    while (i < s.size() && s[i].value == x) acc += s[i++].weight;
    double after = std::min(1.0, acc / total);
    d = std::max(d, std::abs(after - reference_cdf(l, x)));
    d = std::max(d, std::abs(before - reference_cdf_left(l, x)));
  }
  return d;
}

double ks_statistic(const std::vector<double>& sample, const ReferenceLaw& l) {
  return ks_statistic(unit_weights(sample), l);
}

double ks_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty input");
  std::vector<double> x = a, y = b;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() || j < y.size()) {
    double v;
    if (j == y.size() || (i < x.size() && x[i] <= y[j]))
      v = x[i];
    else
      v = y[j];
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

ChiSquareResult chi_square(const std::vector<double>& counts, const std::vector<double>& pmf) {
  if (counts.empty()) throw std::invalid_argument("chi_square: empty input");
  if (counts.size() != pmf.size()) throw std::invalid_argument("chi_square: misaligned supports");
  double n = std::accumulate(counts.begin(), counts.end(), 0.0);
  double psum = std::accumulate(pmf.begin(), pmf.end(), 0.0);
  if (!(n > 0.0) || !(psum > 0.0)) throw std::invalid_argument("chi_square: empty input");
  std::vector<double> obs, exp;
  double o = 0.0, e = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    o += counts[i];
    e += n * pmf[i] / psum;
    if (e >= 5.0) {
      obs.push_back(o);
      exp.push_back(e);
      o = e = 0.0;
    }
  }
  if (e > 0.0 || o > 0.0) {
    if (exp.empty()) {
      obs.push_back(o);
      exp.push_back(e);
    } else {
      obs.back() += o;
      exp.back() += e;
    }
  }
  ChiSquareResult r;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (exp[i] == 0.0) {
      if (obs[i] > 0.0) r.statistic = INFINITY;
      continue;
    }
    r.statistic += (obs[i] - exp[i]) * (obs[i] - exp[i]) / exp[i];
  }
  r.dof = static_cast<int>(obs.size()) - 1;
  r.p_value = r.dof > 0 ? chi_square_p_value(r.statistic, r.dof) : 1.0;
  return r;
}

ChiSquareResult chi_square_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || a.size() != b.size()) throw std::invalid_argument("chi_square_two_sample: misaligned supports");
  double na = std::accumulate(a.begin(), a.end(), 0.0);
  double nb = std::accumulate(b.begin(), b.end(), 0.0);
  if (!(na > 0.0) || !(nb > 0.0)) throw std::invalid_argument("chi_square_two_sample: empty input");
  const double n = na + nb;
  // Pool bins in order until both expected counts reach 5.
  std::vector<std::pair<double, double>> bins;
  double ca = 0.0, cb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ca += a[i];
    cb += b[i];
    double tot = ca + cb;
    if (tot * na / n >= 5.0 && tot * nb / n >= 5.0) {
      bins.emplace_back(ca, cb);
      ca = cb = 0.0;
    }
  }
  if (ca + cb > 0.0) {
    if (bins.empty())
      bins.emplace_back(ca, cb);
    else {
      bins.back().first += ca;
      bins.back().second += cb;
    }
  }
  ChiSquareResult r;
  for (const auto& [x, y] : bins) {
    double tot = x + y;
    double ex = tot * na / n, ey = tot * nb / n;
    r.statistic += (x - ex) * (x - ex) / ex + (y - ey) * (y - ey) / ey;
  }
  r.dof = static_cast<int>(bins.size()) - 1;
  r.p_value = r.dof > 0 ? chi_square_p_value(r.statistic, r.dof) : 1.0;
  return r;
}

double chi_square_p_value(double statistic, int dof) {
  if (dof <= 0) throw std::invalid_argument("chi_square_p_value: dof must be positive");
  if (!std::isfinite(statistic)) return 0.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

double chi_square_quantile(double p, int dof) {
  boost::math::chi_squared_distribution<double> d(dof);
  return boost::math::quantile(d, p);
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("total_variation: misaligned supports");
  if (p.empty()) throw std::invalid_argument("total_variation: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

double total_variation(const std::map<std::int64_t, double>& p, const std::map<std::int64_t, double>& q) {
  if (p.empty() || q.empty()) throw std::invalid_argument("total_variation: empty input");
  double s = 0.0;
  for (const auto& [k, v] : p) {
    auto it = q.find(k);
    s += std::abs(v - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : q)
    if (!p.count(k)) s += std::abs(v);
  return 0.5 * s;
}

double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

double kolmogorov_critical_value(double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("kolmogorov_critical_value: level in (0,1)");
  double lo = 0.2, hi = 5.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (kolmogorov_q(mid) > level)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double ks_critical_one_sample(std::size_t n, double level) {
  return kolmogorov_critical_value(level) / std::sqrt(static_cast<double>(n));
}

double ks_critical_two_sample(std::size_t n, std::size_t m, double level) {
  double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return kolmogorov_critical_value(level) * std::sqrt((nn + mm) / (nn * mm));
}

double hill_estimator(std::vector<double> x, std::size_t k) {
  if (k < 1 || k + 1 > x.size()) throw std::invalid_argument("hill_estimator: need 1 <= k < sample size");
  for (double& v : x) v = std::abs(v);
  std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(k), x.end(), std::greater<double>());
  double threshold = x[k];
  if (!(threshold > 0.0)) throw std::invalid_argument("hill_estimator: threshold order statistic is zero");
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += std::log(x[i] / threshold);
  return static_cast<double>(k) / s;
}

double mean(const std::vector<double>& x) {
  if (x.empty()) throw std::invalid_argument("mean: empty input");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_variance(const std::vector<double>& x) {
  if (x.size() < 2) throw std::invalid_argument("sample_variance: need two values");
  double m = mean(x), s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double correlation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("correlation: bad sizes");
  double mx = mean(x), my = mean(y), sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double median(std::vector<double> x) {
  if (x.empty()) throw std::invalid_argument("median: empty input");
  std::sort(x.begin(), x.end());
  std::size_t n = x.size();
  return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

}  // namespace mvpp
