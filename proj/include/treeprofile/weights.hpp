#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace treeprofile {

/// Raised for numerical or feasibility failures (criticalization, span, moments).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class WeightKind { rooted_phi, unrooted_w };

/// Base coefficient shapes. A weight sequence is scale * ratio^k * base_k.
enum class Family {
  table,             // explicit finite coefficients
  geometric,         // base_k = 1,      sum = 1/(1-s)
  poisson,           // base_k = 1/k!,   sum = e^s
  linear,            // base_k = k+1,    sum = 1/(1-s)^2
  logarithmic,       // base_k = 1/k (k>=1), sum = -log(1-s)
  factorial,         // base_k = k!,     radius 0
  shifted_factorial  // base_k = (k-1)! (k>=1), radius 0
};

class WeightSequence {
 public:
  WeightSequence(WeightKind kind, Family family, double scale, double ratio,
                 std::vector<double> table = {});

  static WeightSequence from_table(std::vector<double> coeffs,
                                   WeightKind kind = WeightKind::rooted_phi);
  static WeightSequence geometric(double q, double scale = 1.0);
  static WeightSequence poisson(double lambda);
  static WeightSequence binary(double q);
  /// Unrooted weights w_k = k! (uniform non-crossing trees).
  static WeightSequence factorial_unrooted();

  /// Parses {"kind": ..., "params": {...}, "coeffs": [...]}.
  static WeightSequence from_json(const nlohmann::json& spec);
  nlohmann::json to_json() const;

  WeightKind kind() const { return kind_; }
  Family family() const { return family_; }
  double scale() const { return scale_; }
  double ratio() const { return ratio_; }
  const std::vector<double>& table() const { return table_; }

  double coefficient(std::size_t k) const;
  /// Largest index with a possibly nonzero coefficient; SIZE_MAX for infinite support.
  std::size_t max_index() const;
  /// Radius of convergence of sum_k coefficient(k) s^k (+inf for tables).
  double radius() const;

  /// j-th derivative of the generating function at real s (|s| below radius).
  double gf_derivative(int j, double s) const;

  /// gcd of {k : coefficient(k) > 0} shifted by the smallest such k.
  std::size_t span() const;

  /// Coefficients up to the first index where the normalized tail drops below tail_tol.
  std::vector<double> truncated(double tail_tol = 1e-20) const;

 private:
  double base_gf_derivative(int j, double s) const;

  WeightKind kind_;
  Family family_;
  double scale_;
  double ratio_;
  std::vector<double> table_;
};

/// Probability sequence with cached moments and a dense truncated table.
class OffspringDistribution {
 public:
  explicit OffspringDistribution(WeightSequence weights);

  const WeightSequence& weights() const { return weights_; }
  double mean() const { return mean_; }
  double variance() const { return variance_; }
  double sigma() const;
  std::size_t span() const { return span_; }
  /// p_k for k < size(); zero beyond (tail mass below 1e-20).
  std::span<const double> probabilities() const { return probs_; }
  double probability(std::size_t k) const {
    return k < probs_.size() ? probs_[k] : 0.0;
  }
  double fourth_moment() const;

 private:
  WeightSequence weights_;
  std::vector<double> probs_;
  double mean_ = 0.0;
  double variance_ = 0.0;
  std::size_t span_ = 1;
};

struct MeanVariance {
  double mean;
  double variance;
};

/// Mean and variance of the normalized sequence.
MeanVariance mean_variance(const WeightSequence& ws);
MeanVariance mean_variance(const OffspringDistribution& p);

/// (a b^k w_k).
WeightSequence tilt(const WeightSequence& ws, double a, double b);

struct CriticalTilt {
  OffspringDistribution distribution;
  double a;
  double b;
};

/// Equivalent probability sequence with mean 1, found by bisection on b.
CriticalTilt criticalize(const WeightSequence& ws);

struct RootedPair {
  WeightSequence phi;        // w_{k+1} / k!
  WeightSequence phi_root;   // w_k / k!
};

RootedPair unrooted_to_rooted(const WeightSequence& w);

/// k p0_k / mean(p0) for k >= 0 (entry 0 is zero).
std::vector<double> root_degree_limit(const OffspringDistribution& p0);

/// The two critical probability laws realizing an unrooted weight sequence
/// through the vertex-marking construction (same tilt ratio for both).
struct UnrootedLaws {
  OffspringDistribution p;
  OffspringDistribution p_root;
};
UnrootedLaws critical_unrooted_laws(const WeightSequence& w);

}  // namespace treeprofile
