#pragma once

// Admissible kernels f : [n]^d -> R stored canonically on strictly increasing
// index tuples (0-based in the C++ API, 1-based in files and on the CLI).
// A stored value is f at every ordering of its tuple; f vanishes on diagonals.
//
// Exact kernels carry integer-primitive rational weights w_t and a common
// rational c2, with f_t = w_t * sqrt(c2). Float kernels carry doubles only.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "chaoskit/exact.hpp"

namespace chaoskit {

using IndexTuple = std::vector<int>;

class Kernel {
 public:
  int n() const { return n_; }
  int degree() const { return d_; }
  std::size_t size() const { return values_.size(); }

  std::span<const int> tuple(std::size_t t) const {
    return {indices_.data() + t * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
  }
  double value(std::size_t t) const { return values_[t]; }

  bool is_exact() const { return c2_.has_value(); }
  const Rational& weight(std::size_t t) const { return weights_.at(t); }
  const Rational& c2() const { return c2_.value(); }
  /// sqrt(c2) as an exact surd.
  const Surd& scale() const { return scale_; }
  Surd exact_value(std::size_t t) const { return scale_ * Surd(weights_.at(t)); }
  /// True when every exact weight equals 1 (all family kernels).
  bool unit_weights() const { return unit_weights_; }

  /// Stored position of a sorted tuple, if present.
  std::optional<std::size_t> find(std::span<const int> sorted) const;
  /// Symmetric extension: f at an arbitrary ordered tuple (0 on diagonals).
  double at(std::span<const int> ordered) const;
  /// Stored tuples that contain index i.
  const std::vector<std::size_t>& containing(int i) const { return by_index_[static_cast<std::size_t>(i)]; }

  friend bool operator==(const Kernel& a, const Kernel& b);

  // Construction goes through the factories below.
  Kernel(int n, int d, std::vector<int> indices, std::vector<double> values);
  Kernel(int n, int d, std::vector<int> indices, std::vector<Rational> weights, Rational c2);

 private:
  void build_index();

  int n_ = 0;
  int d_ = 0;
  std::vector<int> indices_;
  std::vector<double> values_;
  std::vector<Rational> weights_;
  std::optional<Rational> c2_;
  Surd scale_;
  bool unit_weights_ = false;
  std::unordered_map<std::string, std::size_t> lookup_;
  std::vector<std::vector<std::size_t>> by_index_;
};

/// Raw (not necessarily symmetric) coefficients keyed by ordered 0-based tuples.
using RawEntries = std::map<IndexTuple, double>;
using RawExactEntries = std::map<IndexTuple, Rational>;

/// Symmetrize then normalize. Diagonal tuples are ignored.
Kernel make_kernel(int n, int d, const RawEntries& raw);
Kernel make_kernel(int n, int d, const RawExactEntries& raw);

enum class Family { Constant, DisjointPairs, Concentrated, RandomDense };

Family parse_family(std::string_view name);
std::string_view family_name(Family f);

/// Named kernel sequences; random_dense requires a seed.
Kernel family(Family f, int n, int d, std::optional<std::uint64_t> seed = std::nullopt);

struct InfluenceProfile {
  std::vector<Number> per_index;
  Number tau;
};

InfluenceProfile influence_profile(const Kernel& k);

/// d! * <f, g> over ordered tuples, i.e. E[Q(f) Q(g)].
Number covariance(const Kernel& f, const Kernel& g);

/// Q_x(f) = sum over ordered off-diagonal tuples of f * x_{i1} ... x_{id}.
double evaluate_sum(const Kernel& k, std::span<const double> x);

/// Admissibility residual |d! * sum_ordered f^2 - 1| (exactly 0 for exact kernels).
double normalization_residual(const Kernel& k);

}  // namespace chaoskit
