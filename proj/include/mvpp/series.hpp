#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "mvpp/measures.hpp"

namespace mvpp {

using cplx = std::complex<double>;
// Characteristic function of an increment along a fixed direction, complex argument.
using CharFn = std::function<cplx(cplx)>;

// Z_n(x) = prod_{j=1}^n (j-1+x)/j, via accumulated principal logarithms.
cplx z_n(std::int64_t n, cplx x);

// Labels X_1..X_{n+1} projected onto direction u.
std::vector<double> project_labels(const std::vector<Colour>& labels, const std::vector<double>& u);

// fbar_n(z) = sum_k exp(i z x_k).
cplx fbar_n(const std::vector<double>& x, cplx z);

// F_n(t) = Z_n(exp(-i t m_u)) * (1/(n+1)) sum_k exp(i t x_k), n = x.size()-1.
cplx empirical_f_n(const std::vector<double>& x, cplx t, double m_u);
cplx empirical_f_n(const std::vector<Colour>& labels, const std::vector<double>& theta, const std::vector<double>& m);

// E[F_n(t)] = cf_m0(t) * Z_n(exp(-i t m_u)) * Z_n(phi(t)+1) / (n+1).
cplx expected_f_n(std::int64_t n, cplx t, double m_u, const CharFn& phi, cplx cf_m0_at_t = 1.0);

// T_n = F_n / E[F_n]; throws when the denominator vanishes.
cplx t_n(const std::vector<double>& x, cplx t, double m_u, const CharFn& phi, cplx cf_m0_at_t = 1.0);

// E[fbar_n(z1) fbar_n(z2)] by the linear recursion, starting from cf_m0(z1+z2).
cplx pbar_recursion(std::int64_t n, cplx z1, cplx z2, const CharFn& phi, const CharFn& cf_m0 = nullptr);

struct SeriesPoint {
  std::int64_t n = 0;
  double theta = 0.0;
  cplx f;
  cplx t;
};

struct MartingaleSeries {
  std::vector<SeriesPoint> points;
  void write_csv(std::ostream& os) const;
};

// Default evaluation grid: 21 points on [-3,3] scaled by 1/sqrt(log n).
std::vector<double> default_theta_grid(std::int64_t n);

}  // namespace mvpp
