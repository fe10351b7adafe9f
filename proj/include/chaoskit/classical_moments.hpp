#pragma once

// Moments of classical homogeneous sums Q_X(f) = d! * sum_t f_t prod_{i in t} X_i
// with i.i.d. entries X_i.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chaoskit/distributions.hpp"
#include "chaoskit/exact.hpp"
#include "chaoskit/kernels.hpp"

namespace chaoskit {

struct MomentResult {
  Number value;
  int order = 0;
  std::string engine;  // bruteforce | partition | montecarlo | nc_partition | nc_pairing
  std::uint64_t work = 0;
  std::optional<double> std_error;  // montecarlo only
};

/// Literal sum over m-tuples of ordered off-diagonal kernel tuples
/// (at most 1e7 words).
MomentResult exact_moment_bruteforce(const Kernel& k, const ClassicalDist& law, int m);

/// Sum over multisets of stored tuples, grouped by the multiplicity profile
/// of the index word. Words with an odd index multiplicity are pruned when
/// the law is symmetric; words with a singleton index when m_1 = 0.
MomentResult exact_moment_partition(const Kernel& k, const ClassicalDist& law, int m, unsigned workers = 1);

/// E[Q(f_{s_1}) ... Q(f_{s_K})] for one kernel per slot (same engine as
/// exact_moment_partition; kernels may repeat and must share n).
MomentResult exact_mixed_moment(std::span<const Kernel* const> slots, const ClassicalDist& law, unsigned workers = 1);

struct McStats {
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double moments[5] = {1.0, 0.0, 0.0, 0.0, 0.0};  // empirical m_0..m_4
  double m4_std_error = 0.0;
  double ks = 0.0;  // sup |F_emp - Phi|
};

/// Empirical moments and KS distance of Q from `samples` draws. Chunk c of
/// 4096 samples uses substream c of the seed, so output does not depend on
/// the worker count.
McStats mc_stats(const Kernel& k, const ClassicalDist& law, std::uint64_t samples, std::uint64_t seed,
                 unsigned workers = 1);

/// Empirical E[Q^m] with its standard error.
MomentResult mc_moment(const Kernel& k, const ClassicalDist& law, int m, std::uint64_t samples, std::uint64_t seed,
                       unsigned workers = 1);

/// The raw values Q(x^(s)) in sample order (same streams as mc_stats).
std::vector<double> mc_values(const Kernel& k, const ClassicalDist& law, std::uint64_t samples, std::uint64_t seed,
                              unsigned workers = 1);

/// Kolmogorov-Smirnov distance of a sample to the standard normal CDF.
double ks_normal(std::vector<double> values);

/// Joint moment E[Z_{w_1} ... Z_{w_K}] of Z ~ N(0, C) (component ids 0-based).
Number gaussian_wick_joint(std::span<const int> word, const std::vector<std::vector<Number>>& C);

}  // namespace chaoskit
