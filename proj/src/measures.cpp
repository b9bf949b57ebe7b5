#include "mvpp/measures.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mvpp {

ColourKind colour_kind(const Colour& c) { return static_cast<ColourKind>(c.index()); }

int colour_dim(const Colour& c) {
  if (const auto* p = std::get_if<RealPoint>(&c)) return p->dim;
  return 1;
}

std::vector<double> colour_components(const Colour& c) {
  switch (colour_kind(c)) {
    case ColourKind::Finite:
      return {static_cast<double>(std::get<FiniteIndex>(c).index)};
    case ColourKind::Lattice:
      return {static_cast<double>(std::get<std::int64_t>(c))};
    case ColourKind::Real: {
      const auto& p = std::get<RealPoint>(c);
      return std::vector<double>(p.x.begin(), p.x.begin() + p.dim);
    }
  }
  return {};
}

RealPoint make_real(const std::vector<double>& v) {
  if (v.empty() || v.size() > static_cast<std::size_t>(kMaxDim))
    throw std::invalid_argument("real colour dimension must lie in [1," + std::to_string(kMaxDim) + "]");
  RealPoint p;
  p.dim = static_cast<int>(v.size());
  std::copy(v.begin(), v.end(), p.x.begin());
  return p;
}

double colour_dot(const Colour& c, const std::vector<double>& u) {
  switch (colour_kind(c)) {
    case ColourKind::Finite:
      throw std::invalid_argument("colour_dot: finite colours carry no linear structure");
    case ColourKind::Lattice:
      if (u.size() != 1) throw std::invalid_argument("colour_dot: dimension mismatch");
      return u[0] * static_cast<double>(std::get<std::int64_t>(c));
    case ColourKind::Real: {
      const auto& p = std::get<RealPoint>(c);
      if (u.size() != static_cast<std::size_t>(p.dim)) throw std::invalid_argument("colour_dot: dimension mismatch");
      double s = 0.0;
      for (int i = 0; i < p.dim; ++i) s += u[i] * p.x[i];
      return s;
    }
  }
  return 0.0;
}

std::string colour_to_string(const Colour& c) {
  std::ostringstream os;
  switch (colour_kind(c)) {
    case ColourKind::Finite:
      os << std::get<FiniteIndex>(c).index;
      break;
    case ColourKind::Lattice:
      os << std::get<std::int64_t>(c);
      break;
    case ColourKind::Real: {
      const auto& p = std::get<RealPoint>(c);
      char buf[32];
      for (int i = 0; i < p.dim; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", p.x[i]);
        os << (i ? "," : "") << buf;
      }
      break;
    }
  }
  return os.str();
}

bool ColourLess::operator()(const Colour& a, const Colour& b) const {
  if (a.index() != b.index()) return a.index() < b.index();
  switch (colour_kind(a)) {
    case ColourKind::Finite:
      return std::get<FiniteIndex>(a).index < std::get<FiniteIndex>(b).index;
    case ColourKind::Lattice:
      return std::get<std::int64_t>(a) < std::get<std::int64_t>(b);
    case ColourKind::Real: {
      const auto& p = std::get<RealPoint>(a);
      const auto& q = std::get<RealPoint>(b);
      if (p.dim != q.dim) return p.dim < q.dim;
      for (int i = 0; i < p.dim; ++i) {
        // Order by value, falling back to bits so that -0.0 and 0.0 stay distinct.
        if (p.x[i] < q.x[i]) return true;
        if (q.x[i] < p.x[i]) return false;
        auto bp = std::bit_cast<std::uint64_t>(p.x[i]);
        auto bq = std::bit_cast<std::uint64_t>(q.x[i]);
        if (bp != bq) return bp < bq;
      }
      return false;
    }
  }
  return false;
}

bool colour_identical(const Colour& a, const Colour& b) {
  ColourLess less;
  return !less(a, b) && !less(b, a);
}

AtomicMeasure::AtomicMeasure(const std::vector<Atom>& atoms) {
  std::map<Colour, double, ColourLess> merged;
  for (const auto& a : atoms) {
    if (!(a.weight > 0.0) || !std::isfinite(a.weight))
      throw std::invalid_argument("atom weights must be positive and finite");
    merged[a.colour] += a.weight;
  }
  atoms_.reserve(merged.size());
  for (const auto& [c, w] : merged) atoms_.push_back({c, w});
  recompute_total();
}

AtomicMeasure AtomicMeasure::dirac(const Colour& c, double weight) { return AtomicMeasure({{c, weight}}); }

void AtomicMeasure::add(const Colour& c, double weight) {
  if (!(weight > 0.0) || !std::isfinite(weight))
    throw std::invalid_argument("atom weights must be positive and finite");
  ColourLess less;
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), c,
                             [&](const Atom& a, const Colour& x) { return less(a.colour, x); });
  if (it != atoms_.end() && !less(c, it->colour)) {
    it->weight += weight;
  } else {
    atoms_.insert(it, Atom{c, weight});
  }
  recompute_total();
}

double AtomicMeasure::weight_of(const Colour& c) const {
  ColourLess less;
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), c,
                             [&](const Atom& a, const Colour& x) { return less(a.colour, x); });
  if (it != atoms_.end() && !less(c, it->colour)) return it->weight;
  return 0.0;
}

AtomicMeasure AtomicMeasure::scaled(double factor) const {
  if (!(factor > 0.0)) throw std::invalid_argument("scale factor must be positive");
  AtomicMeasure out = *this;
  for (auto& a : out.atoms_) a.weight *= factor;
  out.recompute_total();
  return out;
}

void AtomicMeasure::recompute_total() {
  // Neumaier summation keeps the cached mass within 1e-12 relative.
  double sum = 0.0, comp = 0.0;
  for (const auto& a : atoms_) {
    double t = sum + a.weight;
    if (std::abs(sum) >= std::abs(a.weight))
      comp += (sum - t) + a.weight;
    else
      comp += (a.weight - t) + sum;
    sum = t;
  }
  total_mass_ = sum + comp;
}

void AtomicMeasure::write_csv(std::ostream& os) const {
  int d = atoms_.empty() ? 1 : colour_dim(atoms_.front().colour);
  for (int i = 1; i <= d; ++i) os << "c" << i << ",";
  os << "weight\n";
  char buf[32];
  for (const auto& a : atoms_) {
    std::snprintf(buf, sizeof buf, "%.17g", a.weight);
    os << colour_to_string(a.colour) << "," << buf << "\n";
  }
}

AtomicMeasure normalize(const AtomicMeasure& mu) {
  if (!(mu.total_mass() > 0.0)) throw std::invalid_argument("cannot normalize null measure");
  return mu.scaled(1.0 / mu.total_mass());
}

Colour sample_atom(const AtomicMeasure& mu, RngStream& s) { return AtomSampler(mu).sample(s); }

AtomSampler::AtomSampler(const AtomicMeasure& mu) {
  if (!(mu.total_mass() > 0.0)) throw std::invalid_argument("cannot sample from null measure");
  double acc = 0.0;
  for (const auto& a : mu.atoms()) {
    acc += a.weight;
    colours_.push_back(a.colour);
    cumulative_.push_back(acc);
  }
}

const Colour& AtomSampler::sample(RngStream& s) const {
  double u = s.next_uniform() * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  std::size_t i = std::min<std::size_t>(it - cumulative_.begin(), colours_.size() - 1);
  return colours_[i];
}

std::vector<WeightedColour> theta_rescale(const std::vector<WeightedColour>& samples, const Rescaling& r) {
  if (!(r.a > 0.0)) throw std::invalid_argument("rescaling requires a > 0");
  bool trivial = r.a == 1.0 && std::all_of(r.b.begin(), r.b.end(), [](double x) { return x == 0.0; });
  if (trivial) return samples;
  std::vector<WeightedColour> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    if (colour_kind(s.colour) == ColourKind::Finite)
      throw std::invalid_argument("finite colour space supports only the trivial rescaling a=1, b=0");
    auto x = colour_components(s.colour);
    if (r.b.size() != x.size())
      throw std::invalid_argument("rescaling dimension " + std::to_string(r.b.size()) +
                                  " does not match colour dimension " + std::to_string(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = (x[i] - r.b[i]) / r.a;
    out.push_back({make_real(x), s.weight});
  }
  return out;
}

Rescaling compose(const Rescaling& r1, const Rescaling& r2) {
  if (r1.b.size() != r2.b.size()) throw std::invalid_argument("compose: dimension mismatch");
  Rescaling r{r1.a * r2.a, r1.b};
  for (std::size_t i = 0; i < r.b.size(); ++i) r.b[i] += r1.a * r2.b[i];
  return r;
}

}  // namespace mvpp
