#pragma once

// Set partitions, pairings and the lazily generated classes behind the
// moment formulas. Positions are 0-based; printing is 1-based.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "chaoskit/exact.hpp"

namespace chaoskit {

/// Canonical set partition: sorted blocks ordered by their minimum.
class SetPartition {
 public:
  SetPartition() = default;
  SetPartition(int ground_size, std::vector<std::vector<int>> blocks);
  /// From a block label per position (labels need not be canonical).
  static SetPartition from_labels(std::span<const int> labels);

  int ground_size() const { return ground_; }
  const std::vector<std::vector<int>>& blocks() const { return blocks_; }
  /// Canonical block id of every position.
  std::vector<int> labels() const;
  bool is_pairing() const;
  bool is_noncrossing() const;
  /// "{13|24}" for ground sets below 10, "{1,3|2,4}" otherwise.
  std::string str() const;

  friend bool operator==(const SetPartition&, const SetPartition&) = default;

 private:
  int ground_ = 0;
  std::vector<std::vector<int>> blocks_;
};

/// Perfect matching stored as a partner table.
struct Pairing {
  std::vector<int> partner;

  int ground_size() const { return static_cast<int>(partner.size()); }
  SetPartition to_partition() const;
  static Pairing from_partition(const SetPartition& p);
};

/// Pairs {a<b}, {c<d} cross iff a < c < b < d.
int crossing_count(const Pairing& p);

SetPartition index_kernel(std::span<const int> word);

/// Every block of p lies inside some block of q.
bool refines(const SetPartition& p, const SetPartition& q);

/// Lazy pairing generator in smallest-unpaired-first order.
///
/// Optional restrictions: non-crossing output, and a block size b such that
/// no pair joins two positions of the same interval {jb, ..., jb+b-1}.
class PairingStream {
 public:
  struct Options {
    bool noncrossing = false;
    int forbid_block = 0;   // 0: no interval restriction
    int first_partner = -1; // >= 0 restricts to pairings containing {0, first_partner}
    std::span<const int> labels = {};  // non-empty: pairs must join equal labels
  };

  PairingStream(int k, Options opt);
  /// Advances to the next pairing; false when exhausted.
  bool next();
  const Pairing& current() const { return current_; }

 private:
  bool valid_partner(int a, int b) const;
  int next_partner(int a, int after) const;
  bool descend();

  int k_;
  Options opt_;
  Pairing current_;
  std::vector<std::pair<int, int>> stack_;
  bool started_ = false;
  bool done_ = false;
};

/// Unrestricted pairings of [k]: k even, k <= 20.
PairingStream enumerate_pairings(int k);
/// Non-crossing pairings of [k]: k even, k <= 24.
PairingStream enumerate_nc_pairings(int k);

/// Non-crossing partitions of [k] (k <= 14), generated depth-first with the
/// non-crossing constraint kept by a stack of open blocks. The visitor gets
/// the canonical block id of every position.
void for_each_nc_partition(int k, const std::function<void(std::span<const int>)>& visit);

/// Counts by full enumeration (split by the partner of position 0).
std::uint64_t count_pairings(int k, unsigned workers = 1);
std::uint64_t count_nc_pairings(int k);
std::uint64_t count_nc_partitions(int k);

/// Non-crossing pairings joining only equal labels (|labels| <= 24).
std::uint64_t count_labelled_nc_pairings(std::span<const int> labels);

/// Coefficients c_j = #{pairings of [k] with j crossings}, k even <= 20.
std::vector<Integer> crossing_polynomial(int k);

std::uint64_t double_factorial(int k);
std::uint64_t catalan(int m);

/// |P2*(k x 4)| or |NC2*(k x 4)| by enumeration, 1 <= k <= 5.
Integer count_star_pairings(int k, bool noncrossing);

/// Pairings of [k*m] without a pair inside one of the m intervals of size k.
/// Non-crossing: enumeration, k*m <= 24. Unrestricted: closed-form sum over
/// edge-multiplicity matrices (no size cap here; callers cap).
Integer star_pairing_count(int k, int m, bool noncrossing);

}  // namespace chaoskit
