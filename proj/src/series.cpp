#include "mvpp/series.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mvpp {

namespace {

struct Neumaier {
  double sum = 0.0, comp = 0.0;
  void add(double v) {
    double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

}  // namespace

cplx z_n(std::int64_t n, cplx x) {
  if (n < 0) throw std::invalid_argument("z_n: n must be non-negative");
  Neumaier re, im;
  for (std::int64_t j = 1; j <= n; ++j) {
    cplx factor = (static_cast<double>(j - 1) + x) / static_cast<double>(j);
    if (factor == cplx(0.0, 0.0)) return 0.0;
    cplx l = std::log(factor);
    re.add(l.real());
    im.add(l.imag());
  }
  return std::exp(cplx(re.value(), im.value()));
}

std::vector<double> project_labels(const std::vector<Colour>& labels, const std::vector<double>& u) {
  std::vector<double> x;
  x.reserve(labels.size());
  for (const auto& c : labels) x.push_back(colour_dot(c, u));
  return x;
}

cplx fbar_n(const std::vector<double>& x, cplx z) {
  cplx s = 0.0;
  const cplx iz = cplx(0.0, 1.0) * z;
  for (double v : x) s += std::exp(iz * v);
  return s;
}

cplx empirical_f_n(const std::vector<double>& x, cplx t, double m_u) {
  if (x.empty()) throw std::invalid_argument("empirical_f_n: labels must be nonempty");
  auto n = static_cast<std::int64_t>(x.size()) - 1;
  cplx z = z_n(n, std::exp(cplx(0.0, -1.0) * t * m_u));
  return z * fbar_n(x, t) / static_cast<double>(n + 1);
}

cplx empirical_f_n(const std::vector<Colour>& labels, const std::vector<double>& theta, const std::vector<double>& m) {
  if (labels.empty()) throw std::invalid_argument("empirical_f_n: labels must be nonempty");
  if (theta.size() != m.size()) throw std::invalid_argument("empirical_f_n: theta and m dimensions differ");
  double mt = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) mt += m[i] * theta[i];
  // theta . X_k with t = 1 and m_u = m . theta.
  return empirical_f_n(project_labels(labels, theta), 1.0, mt);
}

cplx expected_f_n(std::int64_t n, cplx t, double m_u, const CharFn& phi, cplx cf_m0_at_t) {
  if (n < 0) throw std::invalid_argument("expected_f_n: n must be non-negative");
  cplx a = z_n(n, std::exp(cplx(0.0, -1.0) * t * m_u));
  cplx b = z_n(n, phi(t) + 1.0);
  return cf_m0_at_t * a * b / static_cast<double>(n + 1);
}

cplx t_n(const std::vector<double>& x, cplx t, double m_u, const CharFn& phi, cplx cf_m0_at_t) {
  auto n = static_cast<std::int64_t>(x.size()) - 1;
  cplx den = expected_f_n(n, t, m_u, phi, cf_m0_at_t);
  if (std::abs(den) == 0.0) {
    std::ostringstream os;
    os << "t_n: E[F_n] vanishes at n=" << n << ", t=" << t;
    throw std::domain_error(os.str());
  }
  return empirical_f_n(x, t, m_u) / den;
}

cplx pbar_recursion(std::int64_t n, cplx z1, cplx z2, const CharFn& phi, const CharFn& cf_m0) {
  if (n < 0) throw std::invalid_argument("pbar_recursion: n must be non-negative");
  const cplx s = z1 + z2;
  const cplx cf_s = cf_m0 ? cf_m0(s) : cplx(1.0);
  const cplx phi_sum = phi(z1) + phi(z2);
  const cplx phi_s = phi(s);
  cplx p = cf_s;
  // E[fbar_j(s)] = cf_m0(s) prod_{k<j} (1 + phi(s)/(k+1)), tracked incrementally.
  cplx ef = cf_s;
  for (std::int64_t j = 0; j < n; ++j) {
    double jp1 = static_cast<double>(j + 1);
    cplx alpha = 1.0 + phi_sum / jp1;
    cplx beta = ef / jp1 * phi_s;
    p = p * alpha + beta;
    ef *= 1.0 + phi_s / jp1;
  }
  return p;
}

void MartingaleSeries::write_csv(std::ostream& os) const {
  os << "n,theta,re_F,im_F,re_T,im_T\n";
  char buf[256];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%.17g,%.17g,%.17g\n", static_cast<long long>(p.n), p.theta,
                  p.f.real(), p.f.imag(), p.t.real(), p.t.imag());
    os << buf;
  }
}

std::vector<double> default_theta_grid(std::int64_t n) {
  double scale = n >= 3 ? 1.0 / std::sqrt(std::log(static_cast<double>(n))) : 1.0;
  std::vector<double> g;
  for (int i = 0; i < 21; ++i) g.push_back((-3.0 + 0.3 * i) * scale);
  return g;
}

}  // namespace mvpp
