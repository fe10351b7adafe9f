#include "chaoskit/free_moments.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <map>

#include "chaoskit/error.hpp"
#include "chaoskit/parallel.hpp"
#include "chaoskit/partitions.hpp"

namespace chaoskit {

namespace {

constexpr int kMaxFreeWord = 12;
constexpr int kMaxSlots = 8;
constexpr std::uint64_t kNodeBudget = 2'000'000'000;
constexpr unsigned kPatternBits = 4;

struct Kahan {
  double sum = 0.0;
  double c = 0.0;
  void add(double v) {
    double y = v - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

// Depth-first walk over NC(k) restricted to refinements of ker(word).
class NcRefinementSum {
 public:
  NcRefinementSum(std::span<const int> labels, const FreeDist& law) : labels_(labels), law_(law) {}

  Surd run() {
    walk(0);
    Surd total;
    for (const auto& [sizes, count] : by_sizes_) {
      Surd term(Rational(static_cast<long>(count)));
      for (int s : sizes) term *= law_.cumulant(s);
      total += term;
    }
    return total;
  }

  std::uint64_t nodes() const { return nodes_; }

 private:
  bool closable(int block) const { return !law_.cumulant(size_[static_cast<std::size_t>(block)]).is_zero(); }

  void walk(std::size_t p) {
    ++nodes_;
    if (p == labels_.size()) {
      for (int b : open_) {
        if (!closable(b)) return;
      }
      std::vector<int> sizes = size_;
      std::sort(sizes.begin(), sizes.end());
      ++by_sizes_[sizes];
      return;
    }
    const int label = labels_[p];
    // start a new block
    size_.push_back(1);
    label_.push_back(label);
    open_.push_back(static_cast<int>(size_.size()) - 1);
    walk(p + 1);
    open_.pop_back();
    label_.pop_back();
    size_.pop_back();
    // join an open block; every block above it closes for good
    for (std::size_t j = open_.size(); j-- > 0;) {
      if (j + 1 < open_.size() && !closable(open_[j + 1])) break;
      int b = open_[j];
      if (label_[static_cast<std::size_t>(b)] != label) continue;
      if (size_[static_cast<std::size_t>(b)] + 1 > law_.max_order()) {
        throw Error(ErrorCode::TooLarge, "block larger than the free cumulant table of '" + law_.name + "'");
      }
      std::vector<int> tail(open_.begin() + static_cast<std::ptrdiff_t>(j) + 1, open_.end());
      open_.resize(j + 1);
      ++size_[static_cast<std::size_t>(b)];
      walk(p + 1);
      --size_[static_cast<std::size_t>(b)];
      open_.insert(open_.end(), tail.begin(), tail.end());
    }
  }

  std::span<const int> labels_;
  const FreeDist& law_;
  std::vector<int> size_;
  std::vector<int> label_;
  std::vector<int> open_;
  std::map<std::vector<int>, std::int64_t> by_sizes_;
  std::uint64_t nodes_ = 0;
};

enum class Policy { Unit, Rational, Float };

Policy policy_for(std::span<const Kernel* const> ks) {
  bool exact = std::all_of(ks.begin(), ks.end(), [](const Kernel* k) { return k->is_exact(); });
  if (!exact) return Policy::Float;
  bool unit = std::all_of(ks.begin(), ks.end(), [](const Kernel* k) { return k->unit_weights(); });
  return unit ? Policy::Unit : Policy::Rational;
}

// Every ordering of every stored tuple; orderings of tuple t occupy
// [first[t], first[t+1]).
struct OrderedTuples {
  int d = 0;
  std::vector<int> idx;
  std::vector<std::size_t> origin;
  std::vector<std::size_t> first;

  explicit OrderedTuples(const Kernel& k) : d(k.degree()) {
    for (std::size_t t = 0; t < k.size(); ++t) {
      first.push_back(origin.size());
      std::vector<int> tup(k.tuple(t).begin(), k.tuple(t).end());
      do {
        idx.insert(idx.end(), tup.begin(), tup.end());
        origin.push_back(t);
      } while (std::next_permutation(tup.begin(), tup.end()));
    }
    first.push_back(origin.size());
  }

  std::size_t size() const { return origin.size(); }
  std::span<const int> at(std::size_t o) const {
    return {idx.data() + o * static_cast<std::size_t>(d), static_cast<std::size_t>(d)};
  }
};

struct PatternAcc {
  std::int64_t unit = 0;
  Rational rational = 0;
  Kahan real;
  std::uint64_t words = 0;
};

using PatternMap = std::map<std::uint64_t, PatternAcc>;

class WordWalker {
 public:
  WordWalker(const std::vector<const Kernel*>& kernels, const std::vector<const OrderedTuples*>& ordered, int n,
             bool even_law, bool no_singletons, Policy policy)
      : kernels_(kernels), ordered_(ordered), even_(even_law), no_singletons_(no_singletons), policy_(policy),
        mult_(static_cast<std::size_t>(n), 0), seen_(static_cast<std::size_t>(n), -1), chosen_(kernels.size(), 0),
        capacity_(kernels.size() + 1, 0) {
    for (std::size_t j = kernels.size(); j-- > 0;) capacity_[j] = capacity_[j + 1] + kernels[j]->degree();
  }

  PatternMap run_first(std::size_t o0) {
    out_.clear();
    place(0, o0);
    if (feasible(1)) descend(1);
    remove(0);
    return std::move(out_);
  }

  std::uint64_t nodes() const { return nodes_; }

 private:
  void place(std::size_t j, std::size_t o) {
    chosen_[j] = o;
    for (int i : ordered_[j]->at(o)) {
      int& m = mult_[static_cast<std::size_t>(i)];
      odd_ += (m % 2 == 0) ? 1 : -1;
      if (m == 0) ++singles_;
      if (m == 1) --singles_;
      ++m;
    }
    if (++nodes_ > kNodeBudget) throw Error(ErrorCode::TooLarge, "free engine node budget exceeded");
  }

  void remove(std::size_t j) {
    for (int i : ordered_[j]->at(chosen_[j])) {
      int& m = mult_[static_cast<std::size_t>(i)];
      --m;
      odd_ += (m % 2 == 0) ? -1 : 1;
      if (m == 0) --singles_;
      if (m == 1) ++singles_;
    }
  }

  bool feasible(std::size_t j) const {
    int cap = capacity_[j];
    if (even_ && (odd_ > cap || (cap - odd_) % 2 != 0)) return false;
    if (no_singletons_ && singles_ > cap) return false;
    return true;
  }

  void descend(std::size_t j) {
    if (j == kernels_.size()) {
      leaf();
      return;
    }
    const OrderedTuples& ot = *ordered_[j];
    if (even_ && j + 1 == kernels_.size()) {
      if (odd_ != ot.d) return;
      std::vector<int> odd_set;
      for (std::size_t s = 0; s < j; ++s) {
        for (int i : ordered_[s]->at(chosen_[s])) {
          if (mult_[static_cast<std::size_t>(i)] % 2 == 1) odd_set.push_back(i);
        }
      }
      std::sort(odd_set.begin(), odd_set.end());
      odd_set.erase(std::unique(odd_set.begin(), odd_set.end()), odd_set.end());
      auto t = kernels_[j]->find(odd_set);
      if (!t) return;
      for (std::size_t o = ot.first[*t]; o < ot.first[*t + 1]; ++o) {
        place(j, o);
        leaf();
        remove(j);
      }
      return;
    }
    for (std::size_t o = 0; o < ot.size(); ++o) {
      place(j, o);
      if (feasible(j + 1)) descend(j + 1);
      remove(j);
    }
  }

  void leaf() {
    if (even_ && odd_ != 0) return;
    if (no_singletons_ && singles_ != 0) return;
    std::uint64_t key = 0;
    unsigned pos = 0;
    int next_label = 0;
    touched_.clear();
    for (std::size_t s = 0; s < kernels_.size(); ++s) {
      for (int i : ordered_[s]->at(chosen_[s])) {
        int& lab = seen_[static_cast<std::size_t>(i)];
        if (lab < 0) {
          lab = next_label++;
          touched_.push_back(i);
        }
        key |= static_cast<std::uint64_t>(lab) << (kPatternBits * pos++);
      }
    }
    for (int i : touched_) seen_[static_cast<std::size_t>(i)] = -1;
    PatternAcc& acc = out_[key];
    ++acc.words;
    switch (policy_) {
      case Policy::Unit:
        ++acc.unit;
        break;
      case Policy::Rational: {
        Rational w = 1;
        for (std::size_t s = 0; s < kernels_.size(); ++s) w *= kernels_[s]->weight(ordered_[s]->origin[chosen_[s]]);
        acc.rational += w;
        break;
      }
      case Policy::Float: {
        double w = 1.0;
        for (std::size_t s = 0; s < kernels_.size(); ++s) w *= kernels_[s]->value(ordered_[s]->origin[chosen_[s]]);
        acc.real.add(w);
        break;
      }
    }
  }

  const std::vector<const Kernel*>& kernels_;
  const std::vector<const OrderedTuples*>& ordered_;
  bool even_;
  bool no_singletons_;
  Policy policy_;
  std::vector<int> mult_;
  std::vector<int> seen_;
  std::vector<std::size_t> chosen_;
  std::vector<int> capacity_;
  std::vector<int> touched_;
  int odd_ = 0;
  int singles_ = 0;
  std::uint64_t nodes_ = 0;
  PatternMap out_;
};

std::vector<int> unpack_pattern(std::uint64_t key, int length) {
  std::vector<int> out(static_cast<std::size_t>(length));
  for (int p = 0; p < length; ++p) out[static_cast<std::size_t>(p)] = static_cast<int>((key >> (kPatternBits * static_cast<unsigned>(p))) & 0xFU);
  return out;
}

bool odd_cumulants_vanish(const FreeDist& law) {
  for (int j = 1; j <= law.max_order(); j += 2) {
    if (!law.cumulants[static_cast<std::size_t>(j)].is_zero()) return false;
  }
  return true;
}

void check_slots(std::span<const Kernel* const> slots) {
  if (slots.empty()) throw Error(ErrorCode::ShapeMismatch, "moment order must be positive");
  if (slots.size() > static_cast<std::size_t>(kMaxSlots)) throw Error(ErrorCode::TooLarge, "moment order capped at 8");
  int len = 0;
  for (const Kernel* k : slots) {
    if (k->n() != slots.front()->n()) throw Error(ErrorCode::ShapeMismatch, "kernels in a mixed moment must share n");
    len += k->degree();
  }
  if (len > kMaxFreeWord) throw Error(ErrorCode::TooLarge, "free engines need d*m <= 12");
}

}  // namespace

Surd free_joint_moment(std::span<const int> word, const FreeDist& law, std::uint64_t* nodes) {
  if (word.empty()) throw Error(ErrorCode::ShapeMismatch, "empty word");
  if (word.size() > static_cast<std::size_t>(kMaxFreeWord)) throw Error(ErrorCode::TooLarge, "free joint moments capped at length 12");
  NcRefinementSum sum(word, law);
  Surd value = sum.run();
  if (nodes) *nodes = sum.nodes();
  return value;
}

MomentResult free_mixed_moment(std::span<const Kernel* const> slots, const FreeDist& law, unsigned workers) {
  check_slots(slots);
  const int n = slots.front()->n();
  std::vector<const Kernel*> kernels(slots.begin(), slots.end());
  std::vector<std::unique_ptr<OrderedTuples>> owned;
  std::vector<const OrderedTuples*> ordered;
  for (std::size_t j = 0; j < kernels.size(); ++j) {
    std::size_t prev = 0;
    while (prev < j && kernels[prev] != kernels[j]) ++prev;
    if (prev < j) {
      ordered.push_back(ordered[prev]);
    } else {
      owned.push_back(std::make_unique<OrderedTuples>(*kernels[j]));
      ordered.push_back(owned.back().get());
    }
  }
  const bool even = odd_cumulants_vanish(law);
  const bool no_singletons = law.cumulant(1).is_zero();
  const Policy policy = policy_for(slots);

  const std::size_t jobs = ordered.front()->size();
  std::vector<PatternMap> partial(jobs);
  std::vector<std::uint64_t> walked(jobs, 0);
  parallel_for(jobs, workers, [&](std::size_t o0) {
    WordWalker w(kernels, ordered, n, even, no_singletons, policy);
    partial[o0] = w.run_first(o0);
    walked[o0] = w.nodes();
  });
  PatternMap merged;
  for (const auto& p : partial) {
    for (const auto& [key, acc] : p) {
      PatternAcc& m = merged[key];
      m.unit += acc.unit;
      m.rational += acc.rational;
      m.real.add(acc.real.sum);
      m.words += acc.words;
    }
  }

  int length = 0;
  for (const Kernel* k : kernels) length += k->degree();
  // work: word-search nodes plus, for every surviving word, the nodes of
  // its non-crossing partition search
  std::uint64_t work = 0;
  for (std::uint64_t w : walked) work += w;
  Surd exact_total;
  Kahan float_total;
  for (const auto& [key, acc] : merged) {
    auto pattern = unpack_pattern(key, length);
    std::uint64_t nodes = 0;
    Surd phi = free_joint_moment(pattern, law, &nodes);
    work += nodes * acc.words;
    if (phi.is_zero()) continue;
    switch (policy) {
      case Policy::Unit: exact_total += Surd(Rational(static_cast<long>(acc.unit))) * phi; break;
      case Policy::Rational: exact_total += Surd(acc.rational) * phi; break;
      case Policy::Float: float_total.add(acc.real.sum * phi.to_double()); break;
    }
  }
  MomentResult r;
  if (policy == Policy::Float) {
    r.value = Number::inexact(float_total.sum);
  } else {
    Surd scale(1);
    for (const Kernel* k : kernels) scale *= k->scale();
    r.value = Number(exact_total * scale);
  }
  r.order = static_cast<int>(kernels.size());
  r.engine = "nc_partition";
  r.work = work;
  return r;
}

MomentResult free_sum_moment(const Kernel& k, const FreeDist& law, int m, unsigned workers) {
  if (m < 1) throw Error(ErrorCode::ShapeMismatch, "moment order must be positive");
  std::vector<const Kernel*> slots(static_cast<std::size_t>(m), &k);
  return free_mixed_moment(slots, law, workers);
}

namespace {

class PairingWordWalker {
 public:
  PairingWordWalker(const Kernel& k, const OrderedTuples& ot, int m, Policy policy)
      : k_(k), ot_(ot), d_(k.degree()), m_(m), policy_(policy), label_(static_cast<std::size_t>(k.degree() * m), -1),
        chosen_(static_cast<std::size_t>(m), 0) {}

  void run(const Pairing& p) {
    partner_ = &p.partner;
    ++nodes_;
    slot(0);
  }

  std::int64_t unit = 0;
  Rational rational = 0;
  Kahan real;
  std::uint64_t nodes_ = 0;

 private:
  bool consistent(std::size_t o, int base) const {
    auto tup = ot_.at(o);
    for (int q = 0; q < d_; ++q) {
      int partner = (*partner_)[static_cast<std::size_t>(base + q)];
      if (partner < base && label_[static_cast<std::size_t>(partner)] != tup[static_cast<std::size_t>(q)]) return false;
    }
    return true;
  }

  void assign(int s, std::size_t o) {
    chosen_[static_cast<std::size_t>(s)] = o;
    auto tup = ot_.at(o);
    for (int q = 0; q < d_; ++q) label_[static_cast<std::size_t>(s * d_ + q)] = tup[static_cast<std::size_t>(q)];
    if (++nodes_ > kNodeBudget) throw Error(ErrorCode::TooLarge, "semicircular engine node budget exceeded");
  }

  void slot(int s) {
    if (s == m_) {
      leaf();
      return;
    }
    const int base = s * d_;
    int fixed_pos = -1;
    for (int q = 0; q < d_; ++q) {
      if ((*partner_)[static_cast<std::size_t>(base + q)] < base) {
        fixed_pos = q;
        break;
      }
    }
    if (fixed_pos < 0) {
      for (std::size_t o = 0; o < ot_.size(); ++o) {
        assign(s, o);
        slot(s + 1);
      }
      return;
    }
    int index = label_[static_cast<std::size_t>((*partner_)[static_cast<std::size_t>(base + fixed_pos)])];
    for (std::size_t t : k_.containing(index)) {
      for (std::size_t o = ot_.first[t]; o < ot_.first[t + 1]; ++o) {
        if (!consistent(o, base)) continue;
        assign(s, o);
        slot(s + 1);
      }
    }
  }

  void leaf() {
    switch (policy_) {
      case Policy::Unit:
        ++unit;
        break;
      case Policy::Rational: {
        Rational w = 1;
        for (std::size_t o : chosen_) w *= k_.weight(ot_.origin[o]);
        rational += w;
        break;
      }
      case Policy::Float: {
        double w = 1.0;
        for (std::size_t o : chosen_) w *= k_.value(ot_.origin[o]);
        real.add(w);
        break;
      }
    }
  }

  const Kernel& k_;
  const OrderedTuples& ot_;
  int d_;
  int m_;
  Policy policy_;
  std::vector<int> label_;
  std::vector<std::size_t> chosen_;
  const std::vector<int>* partner_ = nullptr;
};

}  // namespace

MomentResult semicircular_sum_moment(const Kernel& k, int m, unsigned workers) {
  if (m < 1) throw Error(ErrorCode::ShapeMismatch, "moment order must be positive");
  if (m > kMaxSlots) throw Error(ErrorCode::TooLarge, "moment order capped at 8");
  const int d = k.degree();
  const int len = d * m;
  if (len > 24) throw Error(ErrorCode::TooLarge, "semicircular fast path capped at d*m <= 24");
  MomentResult r;
  r.order = m;
  r.engine = "nc_pairing";
  std::vector<const Kernel*> self{&k};
  Policy policy = policy_for(self);
  if (len % 2 != 0) {
    r.value = policy == Policy::Float ? Number::inexact(0.0) : Number();
    return r;
  }
  OrderedTuples ot(k);
  // Jobs: partner of position 0 (outside the first tuple).
  const std::size_t jobs = static_cast<std::size_t>(len - d);
  std::vector<std::unique_ptr<PairingWordWalker>> walkers(jobs);
  parallel_for(jobs, workers, [&](std::size_t j) {
    auto w = std::make_unique<PairingWordWalker>(k, ot, m, policy);
    PairingStream s(len, {.noncrossing = true, .forbid_block = d, .first_partner = d + static_cast<int>(j)});
    while (s.next()) w->run(s.current());
    walkers[j] = std::move(w);
  });
  std::int64_t unit = 0;
  Rational rational = 0;
  Kahan real;
  std::uint64_t work = 0;
  for (const auto& w : walkers) {
    unit += w->unit;
    rational += w->rational;
    real.add(w->real.sum);
    work += w->nodes_;
  }
  switch (policy) {
    case Policy::Unit: r.value = Number(Surd(Rational(static_cast<long>(unit))) * k.scale().pow(static_cast<unsigned>(m))); break;
    case Policy::Rational: r.value = Number(Surd(rational) * k.scale().pow(static_cast<unsigned>(m))); break;
    case Policy::Float: r.value = Number::inexact(real.sum); break;
  }
  r.work = work;
  return r;
}

std::vector<Integer> qgauss_polynomial(int m) {
  if (m < 0) throw Error(ErrorCode::ShapeMismatch, "negative moment order");
  if (m > 16) throw Error(ErrorCode::TooLarge, "q-Gaussian moments capped at order 16");
  if (m % 2 != 0) return {Integer(0)};
  if (m == 0) return {Integer(1)};
  return crossing_polynomial(m);
}

Rational qgauss_moment(int m, const Rational& q) {
  Rational total = 0;
  Rational qp = 1;
  for (const auto& c : qgauss_polynomial(m)) {
    total += Rational(c) * qp;
    qp *= q;
  }
  return total;
}

Rational tetilla_moment(int m) {
  if (m < 0) throw Error(ErrorCode::ShapeMismatch, "negative moment order");
  if (m > 6) throw Error(ErrorCode::TooLarge, "tetilla expansion capped at m = 6");
  if (m == 0) return Rational(1);
  FreeDist s = free_law("semicircular");
  std::vector<int> word(static_cast<std::size_t>(2 * m));
  Surd total;
  for (std::uint32_t mask = 0; mask < (1U << static_cast<unsigned>(m)); ++mask) {
    for (int f = 0; f < m; ++f) {
      bool swap = ((mask >> static_cast<unsigned>(f)) & 1U) != 0;
      word[static_cast<std::size_t>(2 * f)] = swap ? 2 : 1;
      word[static_cast<std::size_t>(2 * f + 1)] = swap ? 1 : 2;
    }
    total += free_joint_moment(word, s);
  }
  // (1/sqrt 2)^m; the sum vanishes for odd m
  Rational r = total.as_rational().value();
  if (m % 2 != 0) return r;
  r /= Rational(Integer(1) << static_cast<unsigned>(m / 2));
  r.canonicalize();
  return r;
}

Number semicircular_wick_joint(std::span<const int> word, const std::vector<std::vector<Number>>& C) {
  const std::size_t mdim = C.size();
  for (const auto& row : C) {
    if (row.size() != mdim) throw Error(ErrorCode::ShapeMismatch, "covariance matrix must be square");
  }
  for (std::size_t i = 0; i < mdim; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::fabs(C[i][j].approx - C[j][i].approx) > 1e-12) throw Error(ErrorCode::ShapeMismatch, "covariance matrix must be symmetric");
  for (int w : word) {
    if (w < 0 || static_cast<std::size_t>(w) >= mdim) throw Error(ErrorCode::ShapeMismatch, "word letter outside the covariance matrix");
  }
  if (word.size() % 2 != 0) return Number();
  if (word.empty()) return Number(Rational(1));
  // Count pairings by the multiset of component pairs they join.
  std::map<std::vector<int>, std::int64_t> types;
  auto stream = enumerate_nc_pairings(static_cast<int>(word.size()));
  std::vector<int> key;
  while (stream.next()) {
    const auto& partner = stream.current().partner;
    key.clear();
    for (std::size_t a = 0; a < partner.size(); ++a) {
      auto b = static_cast<std::size_t>(partner[a]);
      if (a > b) continue;
      int i = std::min(word[a], word[b]);
      int j = std::max(word[a], word[b]);
      key.push_back(i * static_cast<int>(mdim) + j);
    }
    std::sort(key.begin(), key.end());
    ++types[key];
  }
  Number total;
  for (const auto& [k, count] : types) {
    Number prod(Rational(static_cast<long>(count)));
    for (int code : k) prod = prod * C[static_cast<std::size_t>(code) / mdim][static_cast<std::size_t>(code) % mdim];
    total = total + prod;
  }
  return total;
}

}  // namespace chaoskit
