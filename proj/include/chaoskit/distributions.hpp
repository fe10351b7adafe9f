#pragma once

// Laws described by their moment sequences. Classical laws may carry a
// sampler; free laws carry free cumulants instead.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chaoskit/exact.hpp"
#include "chaoskit/rng.hpp"

namespace chaoskit {

enum class Sampler { None, Gaussian, Laplace, Uniform, Rademacher, Hermite };

struct ClassicalDist {
  std::string name;
  std::vector<Surd> moments;  // m_0 .. m_M
  Sampler sampler = Sampler::None;
  int hermite_k = 0;

  int max_order() const { return static_cast<int>(moments.size()) - 1; }
  /// m_j; TooLarge when j exceeds the table.
  const Surd& moment(int j) const;
  bool standardized() const;
  /// Centered, unit variance, vanishing third moment.
  bool assumption1() const;
  /// Every odd moment in the table vanishes.
  bool symmetric() const;
  /// Fails assumption1 or has chi4 < 0.
  bool outside_theorem_class() const;
};

struct FreeDist {
  std::string name;
  std::vector<Surd> moments;     // m_0 .. m_M
  std::vector<Surd> cumulants;   // index 0 unused (zero), kappa_1 .. kappa_M

  int max_order() const { return static_cast<int>(moments.size()) - 1; }
  const Surd& moment(int j) const;
  const Surd& cumulant(int j) const;
  bool standardized() const;
  bool outside_theorem_class() const;
};

/// m_0..m_M -> (0, kappa_1, ..., kappa_M) through m_n = sum over NC(n).
std::vector<Surd> moments_to_free_cumulants(std::span<const Surd> moments);
/// (ignored, kappa_1, ..., kappa_M) -> m_0..m_M.
std::vector<Surd> free_cumulants_to_moments(std::span<const Surd> cumulants);
std::vector<Surd> moments_to_classical_cumulants(std::span<const Surd> moments);
std::vector<Surd> classical_cumulants_to_moments(std::span<const Surd> cumulants);

/// m_4 - 3; NotStandardized unless m_1 = 0 and m_2 = 1.
Surd chi4(const ClassicalDist& d);
/// m_4 - 2; NotStandardized unless kappa_1 = 0 and kappa_2 = 1.
Surd kappa4(const FreeDist& d);

/// E[He_k(N)^m] and phi(U_k(S)^m) as star-pairing counts over k x m.
/// k*m odd gives 0; k <= 4 and m <= 6 otherwise TooLarge.
Integer hermite_moment(int k, int m);
Integer chebyshev_moment(int k, int m);
/// The same values by expanding the polynomial power against the Gaussian
/// moments (2j-1)!! resp. the semicircle moments Catalan(j).
Integer hermite_moment_by_expansion(int k, int m);
Integer chebyshev_moment_by_expansion(int k, int m);

/// (X1 + X2) / sqrt(2) for independent copies, via cumulant additivity.
ClassicalDist convolve_cumulants(const ClassicalDist& a, const ClassicalDist& b);
/// chi4 of X1 * X2 for independent copies: m4(a) * m4(b) - 3.
Surd multiply_kurtosis(const ClassicalDist& a, const ClassicalDist& b);

/// One draw; NoSampler for laws without one.
double draw(const ClassicalDist& d, RandomStream& rng);
/// count i.i.d. draws from RandomStream(seed).
std::vector<double> sample(const ClassicalDist& d, std::size_t count, std::uint64_t seed);

/// Builtin classical laws: gaussian, laplace, uniform, rademacher,
/// hermite:K. order is the largest moment kept (at least 8).
ClassicalDist classical_law(std::string_view name, int order = 8);
/// Builtin free laws: semicircular, freepoisson:L, qgauss:Q, tetilla.
FreeDist free_law(std::string_view name, int order = 12);

ClassicalDist classical_from_moments(std::string name, std::vector<Surd> moments);
FreeDist free_from_moments(std::string name, std::vector<Surd> moments);
FreeDist free_from_cumulants(std::string name, std::vector<Surd> cumulants);

/// Moment m of (S1 S2 + S2 S1)/sqrt(2), by counting label-respecting
/// non-crossing pairings of each of the 2^m words (m <= 12).
Rational tetilla_moment_table(int m);

}  // namespace chaoskit
