#pragma once

// n-grid scans: fourth-moment criteria, invariance ratios, joint versus
// componentwise moments, and the classical/free transfer.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chaoskit/distributions.hpp"
#include "chaoskit/exact.hpp"
#include "chaoskit/kernels.hpp"

namespace chaoskit {

struct ScanRow {
  int n = 0;
  Number tau;
  std::vector<Number> values;  // one per ScanReport::columns
};

struct Verdict {
  std::string name;
  bool value = false;
  std::string rule;
  std::optional<double> threshold;
};

struct ScanReport {
  std::string kind;  // criterion | invariance | joint | transfer
  // ordered key/value pairs; values are already JSON-encoded
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<ScanRow> rows;
  std::vector<Verdict> verdicts;

  const Verdict& verdict(const std::string& name) const;
  const Number& at(std::size_t row, const std::string& column) const;

  std::string to_json() const;
  /// n, tau, then the data columns in declared order.
  std::string to_csv() const;
};

struct ScanOptions {
  std::vector<int> n_grid;
  int d = 2;
  std::optional<std::uint64_t> seed;  // random_dense only
  unsigned workers = 1;
  bool allow_outside = false;
  std::optional<std::string> timestamp;
};

/// Verdict tolerance for exact-engine monotonicity checks.
inline constexpr double kVerdictTolerance = 1e-9;

/// Columns m4 = E[Q^4] and gap = |m4 - 3|; verdict fourth_moment_converges.
ScanReport criterion_scan(Family family, const ClassicalDist& law, const ScanOptions& opt);
/// Columns m4 = d!^2 phi(Q^4) and gap = |m4 - 2|.
ScanReport criterion_scan(Family family, const FreeDist& law, const ScanOptions& opt);

/// Columns m4_x, m4_gauss, delta = |m4_x - m4_gauss|, ratio = delta / sqrt(tau);
/// verdict ratio_bounded (max ratio <= 2 * median ratio).
ScanReport invariance_ratio(Family family, const ClassicalDist& law, const ScanOptions& opt);

/// Columns gap_classical and gap_free; verdict transfer_consistent.
ScanReport transfer_scan(Family family, const ClassicalDist& law_x, const FreeDist& law_y, const ScanOptions& opt);

struct VectorSpec {
  std::vector<Kernel> kernels;
  std::vector<std::vector<Number>> C;

  explicit VectorSpec(std::vector<Kernel> ks);
  std::size_t size() const { return kernels.size(); }
};

/// Named vector families: disjoint_blocks (C = I, n divisible by 4) and
/// overlap_half (C_12 = 1/2, n divisible by 6). Both use d = 2.
VectorSpec vector_family(const std::string& name, int n);
std::vector<std::string> vector_family_names();

struct JointOptions {
  int order = 4;
  std::optional<double> eps;
  unsigned workers = 1;
  std::optional<std::string> timestamp;
};

/// One row per VectorSpec; columns dev[w] for every mixed word of length 2..order
/// (multisets on the classical side, all words on the free side), then
/// m4dev[i] per component. Verdicts joint_componentwise_consistent and,
/// with eps, joint_matches_wick.
ScanReport joint_vs_componentwise(const std::vector<VectorSpec>& specs, const ClassicalDist& law,
                                  const JointOptions& opt);
ScanReport joint_vs_componentwise(const std::vector<VectorSpec>& specs, const FreeDist& law, const JointOptions& opt);

/// Catalog of (family, classical law, free law) triples expected to give
/// transfer_consistent = true.
struct TransferCase {
  Family family;
  std::string classical;
  std::string free;
  std::vector<int> n_grid;
};
std::vector<TransferCase> transfer_catalog();

/// Vector scans expected to give joint_componentwise_consistent = true.
struct JointCase {
  std::string vectors;  // vector family name
  bool free_side = false;
  std::string law;
  std::vector<int> n_grid;
};
std::vector<JointCase> joint_catalog();

}  // namespace chaoskit
