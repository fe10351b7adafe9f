#include "chaoskit/partitions.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <sstream>

#include "chaoskit/error.hpp"
#include "chaoskit/parallel.hpp"

namespace chaoskit {

namespace {

constexpr int kMaxPairingGround = 20;
constexpr int kMaxNcPairingGround = 24;
constexpr int kMaxNcPartitionGround = 14;

void check_even(int k) {
  if (k < 0 || k % 2 != 0) throw Error(ErrorCode::OddGround, "pairings need an even ground set, got " + std::to_string(k));
}

}  // namespace

SetPartition::SetPartition(int ground_size, std::vector<std::vector<int>> blocks)
    : ground_(ground_size), blocks_(std::move(blocks)) {
  std::vector<int> seen(static_cast<std::size_t>(ground_), 0);
  for (auto& b : blocks_) {
    if (b.empty()) throw Error(ErrorCode::ShapeMismatch, "empty block");
    std::sort(b.begin(), b.end());
    for (int x : b) {
      if (x < 0 || x >= ground_) throw Error(ErrorCode::BadIndex, "block element outside ground set");
      if (seen[static_cast<std::size_t>(x)]++ != 0) throw Error(ErrorCode::ShapeMismatch, "blocks overlap");
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw Error(ErrorCode::ShapeMismatch, "blocks do not cover the ground set");
  }
  std::sort(blocks_.begin(), blocks_.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

SetPartition SetPartition::from_labels(std::span<const int> labels) {
  std::vector<int> canon = index_kernel(labels).labels();
  int nblocks = canon.empty() ? 0 : *std::max_element(canon.begin(), canon.end()) + 1;
  std::vector<std::vector<int>> blocks(static_cast<std::size_t>(nblocks));
  for (std::size_t p = 0; p < canon.size(); ++p) blocks[static_cast<std::size_t>(canon[p])].push_back(static_cast<int>(p));
  return SetPartition(static_cast<int>(labels.size()), std::move(blocks));
}

std::vector<int> SetPartition::labels() const {
  std::vector<int> out(static_cast<std::size_t>(ground_), 0);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    for (int x : blocks_[b]) out[static_cast<std::size_t>(x)] = static_cast<int>(b);
  }
  return out;
}

bool SetPartition::is_pairing() const {
  return std::all_of(blocks_.begin(), blocks_.end(), [](const auto& b) { return b.size() == 2; });
}

bool SetPartition::is_noncrossing() const {
  auto lab = labels();
  const int k = ground_;
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      if (lab[static_cast<std::size_t>(b)] == lab[static_cast<std::size_t>(a)]) continue;
      for (int c = b + 1; c < k; ++c) {
        if (lab[static_cast<std::size_t>(c)] != lab[static_cast<std::size_t>(a)]) continue;
        for (int e = c + 1; e < k; ++e) {
          if (lab[static_cast<std::size_t>(e)] == lab[static_cast<std::size_t>(b)]) return false;
        }
      }
    }
  }
  return true;
}

std::string SetPartition::str() const {
  std::ostringstream os;
  os << '{';
  bool wide = ground_ >= 10;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    if (b > 0) os << '|';
    for (std::size_t i = 0; i < blocks_[b].size(); ++i) {
      if (wide && i > 0) os << ',';
      os << blocks_[b][i] + 1;
    }
  }
  os << '}';
  return os.str();
}

SetPartition Pairing::to_partition() const {
  std::vector<std::vector<int>> blocks;
  for (int a = 0; a < ground_size(); ++a) {
    int b = partner[static_cast<std::size_t>(a)];
    if (a < b) blocks.push_back({a, b});
  }
  return SetPartition(ground_size(), std::move(blocks));
}

Pairing Pairing::from_partition(const SetPartition& p) {
  if (!p.is_pairing()) throw Error(ErrorCode::ShapeMismatch, "partition is not a pairing");
  Pairing out;
  out.partner.assign(static_cast<std::size_t>(p.ground_size()), -1);
  for (const auto& b : p.blocks()) {
    out.partner[static_cast<std::size_t>(b[0])] = b[1];
    out.partner[static_cast<std::size_t>(b[1])] = b[0];
  }
  return out;
}

int crossing_count(const Pairing& p) {
  int count = 0;
  const int k = p.ground_size();
  for (int a = 0; a < k; ++a) {
    int b = p.partner[static_cast<std::size_t>(a)];
    if (b < a) continue;
    for (int c = a + 1; c < b; ++c) {
      int e = p.partner[static_cast<std::size_t>(c)];
      if (e > b) ++count;
    }
  }
  return count;
}

SetPartition index_kernel(std::span<const int> word) {
  std::vector<int> seen;
  std::vector<std::vector<int>> blocks;
  for (std::size_t p = 0; p < word.size(); ++p) {
    auto it = std::find(seen.begin(), seen.end(), word[p]);
    if (it == seen.end()) {
      seen.push_back(word[p]);
      blocks.push_back({static_cast<int>(p)});
    } else {
      blocks[static_cast<std::size_t>(it - seen.begin())].push_back(static_cast<int>(p));
    }
  }
  return SetPartition(static_cast<int>(word.size()), std::move(blocks));
}

bool refines(const SetPartition& p, const SetPartition& q) {
  if (p.ground_size() != q.ground_size()) throw Error(ErrorCode::ShapeMismatch, "partitions of different ground sets");
  auto qlab = q.labels();
  for (const auto& b : p.blocks()) {
    int id = qlab[static_cast<std::size_t>(b.front())];
    for (int x : b) {
      if (qlab[static_cast<std::size_t>(x)] != id) return false;
    }
  }
  return true;
}

PairingStream::PairingStream(int k, Options opt) : k_(k), opt_(opt) {
  current_.partner.assign(static_cast<std::size_t>(k_), -1);
}

bool PairingStream::valid_partner(int a, int b) const {
  if (current_.partner[static_cast<std::size_t>(b)] != -1) return false;
  if (a == 0 && opt_.first_partner >= 0 && b != opt_.first_partner) return false;
  if (opt_.forbid_block > 0 && a / opt_.forbid_block == b / opt_.forbid_block) return false;
  if (!opt_.labels.empty() && opt_.labels[static_cast<std::size_t>(a)] != opt_.labels[static_cast<std::size_t>(b)]) {
    return false;
  }
  if (opt_.noncrossing) {
    if ((b - a - 1) % 2 != 0) return false;
    for (int c = a + 1; c < b; ++c) {
      if (current_.partner[static_cast<std::size_t>(c)] != -1) return false;
    }
  }
  return true;
}

int PairingStream::next_partner(int a, int after) const {
  for (int b = after + 1; b < k_; ++b) {
    if (valid_partner(a, b)) return b;
  }
  return -1;
}

bool PairingStream::descend() {
  int a = stack_.empty() ? 0 : stack_.back().first + 1;
  while (true) {
    while (a < k_ && current_.partner[static_cast<std::size_t>(a)] != -1) ++a;
    if (a >= k_) return true;
    int b = next_partner(a, a);
    if (b < 0) return false;
    current_.partner[static_cast<std::size_t>(a)] = b;
    current_.partner[static_cast<std::size_t>(b)] = a;
    stack_.emplace_back(a, b);
  }
}

bool PairingStream::next() {
  if (done_) return false;
  if (!started_) {
    started_ = true;
    if (descend()) return true;
  }
  while (!stack_.empty()) {
    auto [a, b] = stack_.back();
    stack_.pop_back();
    current_.partner[static_cast<std::size_t>(a)] = -1;
    current_.partner[static_cast<std::size_t>(b)] = -1;
    int b2 = next_partner(a, b);
    if (b2 < 0) continue;
    current_.partner[static_cast<std::size_t>(a)] = b2;
    current_.partner[static_cast<std::size_t>(b2)] = a;
    stack_.emplace_back(a, b2);
    if (descend()) return true;
  }
  done_ = true;
  return false;
}

PairingStream enumerate_pairings(int k) {
  check_even(k);
  if (k > kMaxPairingGround) throw Error(ErrorCode::TooLarge, "pairing enumeration capped at k = 20");
  return PairingStream(k, {});
}

PairingStream enumerate_nc_pairings(int k) {
  check_even(k);
  if (k > kMaxNcPairingGround) throw Error(ErrorCode::TooLarge, "non-crossing pairing enumeration capped at k = 24");
  return PairingStream(k, {.noncrossing = true});
}

namespace {

struct NcPartitionWalker {
  int k;
  const std::function<void(std::span<const int>)>& visit;
  std::vector<int> labels;
  std::vector<int> open;
  int nblocks = 0;

  void run(int p) {
    if (p == k) {
      visit(labels);
      return;
    }
    labels[static_cast<std::size_t>(p)] = nblocks;
    open.push_back(nblocks++);
    run(p + 1);
    open.pop_back();
    --nblocks;
    for (std::size_t j = open.size(); j-- > 0;) {
      labels[static_cast<std::size_t>(p)] = open[j];
      std::vector<int> tail(open.begin() + static_cast<std::ptrdiff_t>(j) + 1, open.end());
      open.resize(j + 1);
      run(p + 1);
      open.insert(open.end(), tail.begin(), tail.end());
    }
  }
};

}  // namespace

void for_each_nc_partition(int k, const std::function<void(std::span<const int>)>& visit) {
  if (k < 0) throw Error(ErrorCode::ShapeMismatch, "negative ground size");
  if (k > kMaxNcPartitionGround) throw Error(ErrorCode::TooLarge, "non-crossing partition enumeration capped at k = 14");
  NcPartitionWalker w{k, visit, std::vector<int>(static_cast<std::size_t>(k), 0), {}};
  w.run(0);
}

std::uint64_t count_pairings(int k, unsigned workers) {
  check_even(k);
  if (k > kMaxPairingGround) throw Error(ErrorCode::TooLarge, "pairing enumeration capped at k = 20");
  if (k == 0) return 1;
  std::vector<std::uint64_t> partial(static_cast<std::size_t>(k - 1), 0);
  parallel_for(partial.size(), workers, [&](std::size_t j) {
    PairingStream s(k, {.first_partner = static_cast<int>(j) + 1});
    std::uint64_t c = 0;
    while (s.next()) ++c;
    partial[j] = c;
  });
  return std::accumulate(partial.begin(), partial.end(), std::uint64_t{0});
}

std::uint64_t count_nc_pairings(int k) {
  auto s = enumerate_nc_pairings(k);
  std::uint64_t c = 0;
  while (s.next()) ++c;
  return c;
}

std::uint64_t count_nc_partitions(int k) {
  std::uint64_t c = 0;
  for_each_nc_partition(k, [&](std::span<const int>) { ++c; });
  return c;
}

std::uint64_t count_labelled_nc_pairings(std::span<const int> labels) {
  const int k = static_cast<int>(labels.size());
  if (k % 2 != 0) return 0;
  if (k > kMaxNcPairingGround) throw Error(ErrorCode::TooLarge, "non-crossing pairing enumeration capped at k = 24");
  PairingStream s(k, {.noncrossing = true, .labels = labels});
  std::uint64_t c = 0;
  while (s.next()) ++c;
  return c;
}

std::vector<Integer> crossing_polynomial(int k) {
  check_even(k);
  if (k > kMaxPairingGround) throw Error(ErrorCode::TooLarge, "pairing enumeration capped at k = 20");
  std::vector<std::uint64_t> coef(static_cast<std::size_t>(k * k / 8 + 1), 0);
  PairingStream s(k, {});
  while (s.next()) ++coef[static_cast<std::size_t>(crossing_count(s.current()))];
  std::vector<Integer> out;
  out.reserve(coef.size());
  for (auto c : coef) out.emplace_back(static_cast<unsigned long>(c));
  while (out.size() > 1 && out.back() == 0) out.pop_back();
  return out;
}

std::uint64_t double_factorial(int k) {
  std::uint64_t r = 1;
  for (int i = k; i > 1; i -= 2) r *= static_cast<std::uint64_t>(i);
  return r;
}

std::uint64_t catalan(int m) {
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), 2UL * static_cast<unsigned long>(m), static_cast<unsigned long>(m));
  r /= (m + 1);
  return r.get_ui();
}

Integer count_star_pairings(int k, bool noncrossing) {
  if (k < 1 || k > 5) throw Error(ErrorCode::TooLarge, "count_star_pairings supports 1 <= k <= 5");
  const int ground = 4 * k;
  std::uint64_t total = 0;
  if (noncrossing) {
    PairingStream s(ground, {.noncrossing = true, .forbid_block = k});
    while (s.next()) ++total;
    return Integer(static_cast<unsigned long>(total));
  }
  // Split by the partner of position 0 (which lies outside block 0).
  std::vector<std::uint64_t> partial(static_cast<std::size_t>(ground), 0);
  for (int b = k; b < ground; ++b) {
    PairingStream s(ground, {.forbid_block = k, .first_partner = b});
    std::uint64_t c = 0;
    while (s.next()) ++c;
    partial[static_cast<std::size_t>(b)] = c;
  }
  for (auto c : partial) total += c;
  return Integer(static_cast<unsigned long>(total));
}

namespace {

struct MultigraphSum {
  int m;
  std::vector<int> residual;
  Rational weight;  // 1 / prod a_ij!
  Rational total = 0;

  void run(int i, int j) {
    if (i == m) {
      total += weight;
      return;
    }
    if (j == m) {
      if (residual[static_cast<std::size_t>(i)] == 0) run(i + 1, i + 2);
      return;
    }
    int& ri = residual[static_cast<std::size_t>(i)];
    int& rj = residual[static_cast<std::size_t>(j)];
    int cap = std::min(ri, rj);
    Rational saved = weight;
    for (int a = 0; a <= cap; ++a) {
      if (a > 0) weight /= a;
      ri -= a;
      rj -= a;
      run(i, j + 1);
      ri += a;
      rj += a;
    }
    weight = saved;
  }
};

}  // namespace

Integer star_pairing_count(int k, int m, bool noncrossing) {
  if (k < 1 || m < 1) throw Error(ErrorCode::ShapeMismatch, "star_pairing_count needs k, m >= 1");
  if ((k * m) % 2 != 0) return Integer(0);
  if (noncrossing) {
    if (k * m > kMaxNcPairingGround) throw Error(ErrorCode::TooLarge, "non-crossing star enumeration capped at k*m = 24");
    PairingStream s(k * m, {.noncrossing = true, .forbid_block = k});
    std::uint64_t c = 0;
    while (s.next()) ++c;
    return Integer(static_cast<unsigned long>(c));
  }
  // Pairings with a_ij pairs between intervals i and j number (k!)^m / prod_{i<j} a_ij!.
  MultigraphSum sum{m, std::vector<int>(static_cast<std::size_t>(m), k), Rational(1)};
  sum.run(0, 1);
  Integer kfact = factorial(static_cast<unsigned>(k)).get_num();
  Integer kfact_m;
  mpz_pow_ui(kfact_m.get_mpz_t(), kfact.get_mpz_t(), static_cast<unsigned long>(m));
  Rational total = sum.total * Rational(kfact_m);
  total.canonicalize();
  return total.get_num();
}

}  // namespace chaoskit
