#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "mvpp/random.hpp"

namespace mvpp {

inline constexpr int kMaxDim = 4;

struct FiniteIndex {
  int index = 0;
};

struct RealPoint {
  std::array<double, kMaxDim> x{};
  int dim = 1;
};

// A point of the colour space: finite set, the integers, or R^d (d <= kMaxDim).
using Colour = std::variant<FiniteIndex, std::int64_t, RealPoint>;

enum class ColourKind { Finite = 0, Lattice = 1, Real = 2 };

ColourKind colour_kind(const Colour& c);
int colour_dim(const Colour& c);
std::vector<double> colour_components(const Colour& c);
RealPoint make_real(const std::vector<double>& v);
// Value along direction u (must have the colour's dimension).
double colour_dot(const Colour& c, const std::vector<double>& u);
std::string colour_to_string(const Colour& c);

// Strict weak order on bit patterns; equality under it is bit-identical equality.
struct ColourLess {
  bool operator()(const Colour& a, const Colour& b) const;
};
bool colour_identical(const Colour& a, const Colour& b);

struct Atom {
  Colour colour;
  double weight = 0.0;
};

// Finite non-negative measure stored as merged, sorted atoms.
class AtomicMeasure {
 public:
  AtomicMeasure() = default;
  explicit AtomicMeasure(const std::vector<Atom>& atoms);

  static AtomicMeasure dirac(const Colour& c, double weight = 1.0);

  void add(const Colour& c, double weight);
  const std::vector<Atom>& atoms() const { return atoms_; }
  double total_mass() const { return total_mass_; }
  bool empty() const { return atoms_.empty(); }
  double weight_of(const Colour& c) const;
  AtomicMeasure scaled(double factor) const;

  void write_csv(std::ostream& os) const;

 private:
  void recompute_total();

  std::vector<Atom> atoms_;
  double total_mass_ = 0.0;
};

AtomicMeasure normalize(const AtomicMeasure& mu);
Colour sample_atom(const AtomicMeasure& mu, RngStream& s);

// Precomputed cumulative table for repeated sampling from one measure.
class AtomSampler {
 public:
  explicit AtomSampler(const AtomicMeasure& mu);
  const Colour& sample(RngStream& s) const;

 private:
  std::vector<Colour> colours_;
  std::vector<double> cumulative_;
};

struct Rescaling {
  double a = 1.0;
  std::vector<double> b{0.0};
};

struct WeightedColour {
  Colour colour;
  double weight = 1.0;
};

// Pushforward under x -> (x - b)/a. Lattice colours map into RealPoint.
std::vector<WeightedColour> theta_rescale(const std::vector<WeightedColour>& samples, const Rescaling& r);

// Composition rule: rescale by r1 then r2 equals rescale by compose(r1, r2).
Rescaling compose(const Rescaling& r1, const Rescaling& r2);

}  // namespace mvpp
