#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "mvpp/random.hpp"

namespace mvpp {

struct WeightedPoint {
  double value = 0.0;
  double weight = 1.0;
};
using WeightedSample = std::vector<WeightedPoint>;

WeightedSample unit_weights(const std::vector<double>& values);

namespace law {
struct StdNormal {};
struct Normal {
  double mean = 0.0;
  double var = 1.0;
};
struct Poisson {
  double rate = 1.0;
};
// P(k) = p (1-p)^(k - start) on {start, start+1, ...}; start is 0 or 1.
struct Geometric {
  double p = 0.5;
  int start = 0;
};
// First coordinate of a flat Dirichlet on the (m-1)-simplex, i.e. Beta(1, m-1).
struct DirichletFlat {
  int m = 2;
};
struct Beta {
  double a = 1.0;
  double b = 1.0;
};
struct Uniform01 {};
// Multivariate normal; CDF queries go through project().
struct NormalMulti {
  std::vector<double> mean;
  std::vector<std::vector<double>> cov;
};
// Integer-supported table: P(offset + i) = probs[i].
struct Discrete {
  std::int64_t offset = 0;
  std::vector<double> probs;
};
// Strictly stable law with the S1 parameterisation; simulation only.
struct Stable {
  double alpha = 2.0;
  double skew = 0.0;
  double scale = 1.0;
};
}  // namespace law

using ReferenceLaw = std::variant<law::StdNormal, law::Normal, law::Poisson, law::Geometric, law::DirichletFlat,
                                  law::Beta, law::Uniform01, law::NormalMulti, law::Discrete, law::Stable>;

std::string law_name(const ReferenceLaw& l);
void validate_law(const ReferenceLaw& l);
bool is_discrete(const ReferenceLaw& l);
bool has_cdf(const ReferenceLaw& l);

double normal_cdf(double x);
double reference_cdf(const ReferenceLaw& l, double x);
// Left limit F(x-).
double reference_cdf_left(const ReferenceLaw& l, double x);
double reference_pmf(const ReferenceLaw& l, std::int64_t k);
double sample_reference(const ReferenceLaw& l, RngStream& s);
// Multivariate normal along direction u.
law::Normal project(const law::NormalMulti& l, const std::vector<double>& u);

// Draws Gamma * g(Lambda) + f(Lambda) with Gamma ~ gamma, Lambda ~ N(0,1) independent.
double simulate_reference(const ReferenceLaw& gamma, const std::function<double(double)>& f,
                          const std::function<double(double)>& g, RngStream& s);

double ks_statistic(const WeightedSample& sample, const ReferenceLaw& l);
double ks_statistic(const std::vector<double>& sample, const ReferenceLaw& l);
double ks_two_sample(const std::vector<double>& a, const std::vector<double>& b);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

// Goodness of fit; adjacent bins are pooled until every expected count is >= 5.
ChiSquareResult chi_square(const std::vector<double>& counts, const std::vector<double>& pmf);
// Homogeneity test of two count vectors over the same bins.
ChiSquareResult chi_square_two_sample(const std::vector<double>& a, const std::vector<double>& b);
double chi_square_p_value(double statistic, int dof);
double chi_square_quantile(double p, int dof);

double total_variation(const std::vector<double>& p, const std::vector<double>& q);
double total_variation(const std::map<std::int64_t, double>& p, const std::map<std::int64_t, double>& q);

// Asymptotic Kolmogorov distribution.
double kolmogorov_q(double lambda);
double kolmogorov_critical_value(double level);
double ks_critical_one_sample(std::size_t n, double level);
double ks_critical_two_sample(std::size_t n, std::size_t m, double level);

// Hill estimator of the tail index from the k largest values of |x|.
double hill_estimator(std::vector<double> x, std::size_t k);

double mean(const std::vector<double>& x);
double sample_variance(const std::vector<double>& x);
double correlation(const std::vector<double>& x, const std::vector<double>& y);
double median(std::vector<double> x);

}  // namespace mvpp
