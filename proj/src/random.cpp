#include "mvpp/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mvpp {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t root_seed, std::uint64_t stream_id) {
  return splitmix64(splitmix64(root_seed) ^ splitmix64(stream_id + 0x632be59bd9b4e019ULL));
}

RngStream::RngStream(std::uint64_t root_seed, std::uint64_t stream_id)
    : root_seed_(root_seed), stream_id_(stream_id) {
  // Fill the full engine state from a counter-hash sequence.
  std::uint64_t key = mix_seed(root_seed, stream_id);
  std::vector<std::uint32_t> words(16);
  for (std::size_t i = 0; i < words.size(); i += 2) {
    std::uint64_t h = splitmix64(key + i);
    words[i] = static_cast<std::uint32_t>(h);
    words[i + 1] = static_cast<std::uint32_t>(h >> 32);
  }
  std::seed_seq seq(words.begin(), words.end());
  engine_.seed(seq);
}

RngStream derive_stream(std::uint64_t root_seed, std::uint64_t stream_id) {
  return RngStream(root_seed, stream_id);
}

double RngStream::next_uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::next_below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("next_below: n must be positive");
  // Lemire's multiply-shift with rejection.
  unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(engine_()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

bool RngStream::next_bernoulli(double p) { return next_uniform() < p; }

double RngStream::next_standard_normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * next_uniform() - 1.0;
    v = 2.0 * next_uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * f;
  has_spare_normal_ = true;
  return u * f;
}

double RngStream::next_exponential() { return -std::log1p(-next_uniform()); }

double RngStream::next_gamma(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape))
    throw std::invalid_argument("next_gamma: shape must be positive, got " + std::to_string(shape));
  if (shape < 1.0) {
    double u;
    do {
      u = next_uniform();
    } while (u == 0.0);
    return next_gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia-Tsang.
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x, v;
    do {
      x = next_standard_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    double u = next_uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RngStream::next_beta(double a, double b) {
  double x = next_gamma(a);
  double y = next_gamma(b);
  return x / (x + y);
}

std::vector<double> RngStream::next_dirichlet(const std::vector<double>& alpha) {
  if (alpha.empty()) throw std::invalid_argument("next_dirichlet: empty parameter vector");
  std::vector<double> g(alpha.size());
  double total = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    g[i] = next_gamma(alpha[i]);
    total += g[i];
  }
  for (double& x : g) x /= total;
  return g;
}

double RngStream::next_stable(double alpha, double skew) {
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw std::invalid_argument("next_stable: alpha must lie in (0,2], got " + std::to_string(alpha));
  if (!(skew >= -1.0 && skew <= 1.0))
    throw std::invalid_argument("next_stable: skew must lie in [-1,1], got " + std::to_string(skew));
  constexpr double pi = std::numbers::pi;
  double v = pi * (next_uniform() - 0.5);
  double w;
  do {
    w = next_exponential();
  } while (w == 0.0);
  if (alpha == 1.0) {
    double t = pi / 2.0 + skew * v;
    return (2.0 / pi) * (t * std::tan(v) - skew * std::log((pi / 2.0) * w * std::cos(v) / t));
  }
  double zeta = -skew * std::tan(pi * alpha / 2.0);
  double xi = std::atan(-zeta) / alpha;
  double lead = std::pow(1.0 + zeta * zeta, 1.0 / (2.0 * alpha));
  double s1 = std::sin(alpha * (v + xi)) / std::pow(std::cos(v), 1.0 / alpha);
  double s2 = std::pow(std::cos(v - alpha * (v + xi)) / w, (1.0 - alpha) / alpha);
  return lead * s1 * s2;
}

}  // namespace mvpp
