#include "chaoskit/classical_moments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "chaoskit/error.hpp"
#include "chaoskit/parallel.hpp"
#include "chaoskit/rng.hpp"
#include "chaoskit/simd/eval.hpp"

namespace chaoskit {

namespace {

constexpr std::uint64_t kBruteForceWords = 10'000'000;
constexpr std::uint64_t kNodeBudget = 2'000'000'000;
constexpr int kMaxSlots = 8;
constexpr int kMaxWordLength = 16;
constexpr std::size_t kChunk = 4096;
constexpr unsigned kHistBits = 5;

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

// Multiplicity histogram of an index word: h_j = #indices used exactly j times.
std::uint64_t pack_histogram(std::span<const int> multiplicities) {
  std::uint64_t key = 0;
  for (int m : multiplicities) key += std::uint64_t{1} << (kHistBits * static_cast<unsigned>(m - 1));
  return key;
}

Surd histogram_moment(std::uint64_t key, const ClassicalDist& law) {
  Surd out(1);
  for (int j = 1; key != 0; ++j, key >>= kHistBits) {
    unsigned h = static_cast<unsigned>(key & ((1U << kHistBits) - 1U));
    if (h > 0) out *= law.moment(j).pow(h);
  }
  return out;
}

Integer factorial_int(int k) { return factorial(static_cast<unsigned>(k)).get_num(); }

enum class Policy { Unit, Rational, Float };

// Per-histogram partial sums for one weight policy.
struct Partial {
  std::map<std::uint64_t, std::int64_t> unit;
  std::map<std::uint64_t, Rational> rational;
  std::map<std::uint64_t, Kahan> real;
  std::uint64_t leaves = 0;
  std::uint64_t nodes = 0;

  void merge(const Partial& o) {
    for (const auto& [k, v] : o.unit) unit[k] += v;
    for (const auto& [k, v] : o.rational) rational[k] += v;
    for (const auto& [k, v] : o.real) real[k].add(v.sum);
    leaves += o.leaves;
    nodes += o.nodes;
  }
};

Number finish(const Partial& p, Policy policy, const ClassicalDist& law, const Surd& exact_scale, double float_scale) {
  if (policy == Policy::Float) {
    Kahan total;
    for (const auto& [key, v] : p.real) total.add(v.sum * histogram_moment(key, law).to_double());
    return Number::inexact(total.sum * float_scale);
  }
  Surd total;
  if (policy == Policy::Unit) {
    for (const auto& [key, v] : p.unit) {
      if (v != 0) total += Surd(Rational(static_cast<long>(v))) * histogram_moment(key, law);
    }
  } else {
    for (const auto& [key, v] : p.rational) {
      if (v != 0) total += Surd(v) * histogram_moment(key, law);
    }
  }
  return Number(total * exact_scale);
}

struct Slot {
  const Kernel* k;
  bool continues_group;  // same kernel as the previous slot
};

class MultisetWalker {
 public:
  MultisetWalker(const std::vector<Slot>& slots, int n, bool symmetric, bool no_singletons, Policy policy)
      : slots_(slots), symmetric_(symmetric), no_singletons_(no_singletons), policy_(policy),
        mult_(static_cast<std::size_t>(n), 0), chosen_(slots.size(), 0), capacity_(slots.size() + 1, 0) {
    for (std::size_t j = slots.size(); j-- > 0;) capacity_[j] = capacity_[j + 1] + slots[j].k->degree();
  }

  Partial run_first(std::size_t t0) {
    out_ = Partial{};
    place(0, t0);
    if (feasible(1)) descend(1);
    remove(0);
    return std::move(out_);
  }

 private:
  void place(std::size_t j, std::size_t t) {
    chosen_[j] = t;
    for (int i : slots_[j].k->tuple(t)) {
      int& m = mult_[static_cast<std::size_t>(i)];
      odd_ += (m % 2 == 0) ? 1 : -1;
      if (m == 0) ++singles_;
      if (m == 1) --singles_;
      ++m;
    }
    if (++out_.nodes > kNodeBudget) throw Error(ErrorCode::TooLarge, "partition engine node budget exceeded");
  }

  void remove(std::size_t j) {
    for (int i : slots_[j].k->tuple(chosen_[j])) {
      int& m = mult_[static_cast<std::size_t>(i)];
      --m;
      odd_ += (m % 2 == 0) ? -1 : 1;
      if (m == 0) --singles_;
      if (m == 1) ++singles_;
    }
  }

  bool feasible(std::size_t j) const {
    int cap = capacity_[j];
    if (symmetric_ && (odd_ > cap || (cap - odd_) % 2 != 0)) return false;
    if (no_singletons_ && singles_ > cap) return false;
    return true;
  }

  void descend(std::size_t j) {
    if (j == slots_.size()) {
      leaf();
      return;
    }
    const Kernel& k = *slots_[j].k;
    std::size_t start = slots_[j].continues_group ? chosen_[j - 1] : 0;
    if (symmetric_ && j + 1 == slots_.size()) {
      // The last tuple must be exactly the set of odd-multiplicity indices.
      if (odd_ != k.degree()) return;
      std::vector<int> odd_set;
      for (std::size_t s = 0; s < j; ++s) {
        for (int i : slots_[s].k->tuple(chosen_[s])) {
          if (mult_[static_cast<std::size_t>(i)] % 2 == 1) odd_set.push_back(i);
        }
      }
      std::sort(odd_set.begin(), odd_set.end());
      odd_set.erase(std::unique(odd_set.begin(), odd_set.end()), odd_set.end());
      auto t = k.find(odd_set);
      if (!t || *t < start) return;
      place(j, *t);
      leaf();
      remove(j);
      return;
    }
    for (std::size_t t = start; t < k.size(); ++t) {
      place(j, t);
      if (feasible(j + 1)) descend(j + 1);
      remove(j);
    }
  }

  void leaf() {
    if (symmetric_ && odd_ != 0) return;
    if (no_singletons_ && singles_ != 0) return;
    ++out_.leaves;
    // multinomial over runs of equal tuples inside each kernel group
    std::int64_t multiplicity = 1;
    {
      std::size_t j = 0;
      while (j < slots_.size()) {
        std::size_t end = j + 1;
        while (end < slots_.size() && slots_[end].continues_group) ++end;
        std::int64_t num = 1;
        for (std::size_t r = 2; r <= end - j; ++r) num *= static_cast<std::int64_t>(r);
        std::size_t run = 1;
        for (std::size_t s = j + 1; s <= end; ++s) {
          if (s < end && chosen_[s] == chosen_[s - 1]) {
            ++run;
            num /= static_cast<std::int64_t>(run);
          } else {
            run = 1;
          }
        }
        multiplicity *= num;
        j = end;
      }
    }
    indices_.clear();
    for (std::size_t s = 0; s < slots_.size(); ++s) {
      for (int i : slots_[s].k->tuple(chosen_[s])) indices_.push_back(i);
    }
    std::sort(indices_.begin(), indices_.end());
    indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
    mults_.clear();
    for (int i : indices_) mults_.push_back(mult_[static_cast<std::size_t>(i)]);
    std::uint64_t key = pack_histogram(mults_);
    switch (policy_) {
      case Policy::Unit:
        out_.unit[key] += multiplicity;
        break;
      case Policy::Rational: {
        Rational w(static_cast<long>(multiplicity));
        for (std::size_t s = 0; s < slots_.size(); ++s) w *= slots_[s].k->weight(chosen_[s]);
        out_.rational[key] += w;
        break;
      }
      case Policy::Float: {
        double w = static_cast<double>(multiplicity);
        for (std::size_t s = 0; s < slots_.size(); ++s) w *= slots_[s].k->value(chosen_[s]);
        out_.real[key].add(w);
        break;
      }
    }
  }

  const std::vector<Slot>& slots_;
  bool symmetric_;
  bool no_singletons_;
  Policy policy_;
  std::vector<int> mult_;
  std::vector<std::size_t> chosen_;
  std::vector<int> capacity_;
  int odd_ = 0;
  int singles_ = 0;
  std::vector<int> indices_;
  std::vector<int> mults_;
  Partial out_;
};

Policy policy_for(std::span<const Kernel* const> ks) {
  bool exact = std::all_of(ks.begin(), ks.end(), [](const Kernel* k) { return k->is_exact(); });
  if (!exact) return Policy::Float;
  bool unit = std::all_of(ks.begin(), ks.end(), [](const Kernel* k) { return k->unit_weights(); });
  return unit ? Policy::Unit : Policy::Rational;
}

void check_order(int m) {
  if (m < 1) throw Error(ErrorCode::ShapeMismatch, "moment order must be positive");
  if (m > kMaxSlots) throw Error(ErrorCode::TooLarge, "moment order capped at 8");
}

double phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

MomentResult exact_mixed_moment(std::span<const Kernel* const> slots_in, const ClassicalDist& law, unsigned workers) {
  const int K = static_cast<int>(slots_in.size());
  check_order(K);
  int n = slots_in.front()->n();
  int total_degree = 0;
  for (const Kernel* k : slots_in) {
    if (k->n() != n) throw Error(ErrorCode::ShapeMismatch, "kernels in a mixed moment must share n");
    total_degree += k->degree();
  }
  if (total_degree > kMaxWordLength) throw Error(ErrorCode::TooLarge, "partition engine needs m*d <= 16");

  // Group equal kernels so each group is walked as a multiset.
  std::vector<const Kernel*> sorted;
  for (const Kernel* k : slots_in) {
    if (std::find(sorted.begin(), sorted.end(), k) != sorted.end()) continue;
    for (const Kernel* other : slots_in) {
      if (other == k) sorted.push_back(k);
    }
  }
  std::vector<Slot> slots;
  for (std::size_t j = 0; j < sorted.size(); ++j) slots.push_back({sorted[j], j > 0 && sorted[j] == sorted[j - 1]});

  const bool symmetric = law.symmetric();
  const bool no_singletons = law.max_order() >= 1 && law.moments[1].is_zero();
  Policy policy = policy_for(slots_in);

  const std::size_t jobs = slots.front().k->size();
  std::vector<Partial> partials(jobs);
  parallel_for(jobs, workers, [&](std::size_t t0) {
    MultisetWalker w(slots, n, symmetric, no_singletons, policy);
    partials[t0] = w.run_first(t0);
  });
  Partial merged;
  for (const auto& p : partials) merged.merge(p);

  Surd exact_scale(1);
  double float_scale = 1.0;
  for (const Kernel* k : slots_in) {
    Rational dfact = factorial(static_cast<unsigned>(k->degree()));
    float_scale *= dfact.get_d();
    if (policy != Policy::Float) exact_scale *= k->scale() * Surd(dfact);
  }
  MomentResult r;
  r.value = finish(merged, policy, law, exact_scale, float_scale);
  r.order = K;
  r.engine = "partition";
  r.work = merged.leaves;
  return r;
}

MomentResult exact_moment_partition(const Kernel& k, const ClassicalDist& law, int m, unsigned workers) {
  check_order(m);
  std::vector<const Kernel*> slots(static_cast<std::size_t>(m), &k);
  return exact_mixed_moment(slots, law, workers);
}

MomentResult exact_moment_bruteforce(const Kernel& k, const ClassicalDist& law, int m) {
  check_order(m);
  const int d = k.degree();
  // Every ordering of every stored tuple.
  std::vector<std::vector<int>> ordered;
  std::vector<std::size_t> origin;
  for (std::size_t t = 0; t < k.size(); ++t) {
    std::vector<int> tup(k.tuple(t).begin(), k.tuple(t).end());
    do {
      ordered.push_back(tup);
      origin.push_back(t);
    } while (std::next_permutation(tup.begin(), tup.end()));
  }
  const std::uint64_t base = ordered.size();
  std::uint64_t words = 1;
  for (int j = 0; j < m; ++j) {
    words *= base;
    if (words > kBruteForceWords) throw Error(ErrorCode::TooLarge, "brute force capped at 1e7 words");
  }
  Policy policy = policy_for(std::vector<const Kernel*>{&k});
  Partial acc;
  std::vector<std::size_t> digit(static_cast<std::size_t>(m), 0);
  std::vector<int> mult(static_cast<std::size_t>(k.n()), 0);
  std::vector<int> profile;
  for (std::uint64_t w = 0; w < words; ++w) {
    std::fill(mult.begin(), mult.end(), 0);
    for (int j = 0; j < m; ++j) {
      for (int i : ordered[digit[static_cast<std::size_t>(j)]]) ++mult[static_cast<std::size_t>(i)];
    }
    profile.clear();
    for (int c : mult) {
      if (c > 0) profile.push_back(c);
    }
    std::uint64_t key = pack_histogram(profile);
    switch (policy) {
      case Policy::Unit:
        acc.unit[key] += 1;
        break;
      case Policy::Rational: {
        Rational p = 1;
        for (int j = 0; j < m; ++j) p *= k.weight(origin[digit[static_cast<std::size_t>(j)]]);
        acc.rational[key] += p;
        break;
      }
      case Policy::Float: {
        double p = 1.0;
        for (int j = 0; j < m; ++j) p *= k.value(origin[digit[static_cast<std::size_t>(j)]]);
        acc.real[key].add(p);
        break;
      }
    }
    for (int j = m - 1; j >= 0; --j) {
      if (++digit[static_cast<std::size_t>(j)] < base) break;
      digit[static_cast<std::size_t>(j)] = 0;
    }
  }
  (void)d;
  Surd exact_scale = policy == Policy::Float ? Surd(1) : k.scale().pow(static_cast<unsigned>(m));
  MomentResult r;
  r.value = finish(acc, policy, law, exact_scale, 1.0);
  r.order = m;
  r.engine = "bruteforce";
  r.work = words;
  return r;
}

std::vector<double> mc_values(const Kernel& k, const ClassicalDist& law, std::uint64_t samples, std::uint64_t seed,
                              unsigned workers) {
  if (law.sampler == Sampler::None) throw Error(ErrorCode::NoSampler, "law '" + law.name + "' has no sampler");
  simd::BatchKernel bk(k);
  const std::size_t n = static_cast<std::size_t>(k.n());
  const std::size_t chunks = static_cast<std::size_t>((samples + kChunk - 1) / kChunk);
  std::vector<double> q(static_cast<std::size_t>(samples));
  parallel_for(chunks, workers, [&](std::size_t c) {
    const std::size_t begin = c * kChunk;
    const std::size_t count = std::min<std::size_t>(kChunk, static_cast<std::size_t>(samples) - begin);
    RandomStream rng(substream_seed(seed, c));
    std::vector<double> x(n * count);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t s = 0; s < count; ++s) x[i * count + s] = draw(law, rng);
    }
    simd::eval_batch(bk, x.data(), count, q.data() + begin);
  });
  return q;
}

double ks_normal(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double N = static_cast<double>(values.size());
  double best = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    double f = phi(values[i]);
    best = std::max(best, std::max(static_cast<double>(i + 1) / N - f, f - static_cast<double>(i) / N));
  }
  return best;
}

McStats mc_stats(const Kernel& k, const ClassicalDist& law, std::uint64_t samples, std::uint64_t seed, unsigned workers) {
  if (samples < 1000) throw Error(ErrorCode::ShapeMismatch, "Monte-Carlo needs at least 1000 samples");
  auto q = mc_values(k, law, samples, seed, workers);
  Kahan s[5];
  Kahan s8;
  for (double v : q) {
    double p = 1.0;
    for (int j = 1; j <= 4; ++j) {
      p *= v;
      s[j].add(p);
    }
    s8.add(p * p);
  }
  McStats out;
  out.samples = samples;
  out.seed = seed;
  const double N = static_cast<double>(samples);
  for (int j = 1; j <= 4; ++j) out.moments[j] = s[j].sum / N;
  out.m4_std_error = std::sqrt(std::max(0.0, s8.sum / N - out.moments[4] * out.moments[4]) / N);
  out.ks = ks_normal(std::move(q));
  return out;
}

MomentResult mc_moment(const Kernel& k, const ClassicalDist& law, int m, std::uint64_t samples, std::uint64_t seed,
                       unsigned workers) {
  check_order(m);
  if (samples < 1000) throw Error(ErrorCode::ShapeMismatch, "Monte-Carlo needs at least 1000 samples");
  auto q = mc_values(k, law, samples, seed, workers);
  Kahan s, s2;
  for (double v : q) {
    double p = std::pow(v, m);
    s.add(p);
    s2.add(p * p);
  }
  const double N = static_cast<double>(samples);
  double mean = s.sum / N;
  MomentResult r;
  r.value = Number::inexact(mean);
  r.order = m;
  r.engine = "montecarlo";
  r.work = samples;
  r.std_error = std::sqrt(std::max(0.0, s2.sum / N - mean * mean) / N);
  return r;
}

namespace {

struct WickTypes {
  explicit WickTypes(const std::vector<std::vector<Number>>& cov) : C(cov) {}

  const std::vector<std::vector<Number>>& C;
  std::vector<int> comps;     // distinct component ids
  std::vector<int> residual;  // unpaired positions per component
  Number total;
  Rational weight = 1;        // 1 / prod(2^{a_ii} a_ii! prod a_ij!)
  Number product = Number(Rational(1));

  void run(std::size_t i, std::size_t j) {
    const std::size_t r = comps.size();
    if (i == r) {
      total = total + Number(weight) * product;
      return;
    }
    if (j == r) {
      if (residual[i] == 0) run(i + 1, i + 1);
      return;
    }
    const Number& c = C[static_cast<std::size_t>(comps[i])][static_cast<std::size_t>(comps[j])];
    Rational saved_w = weight;
    Number saved_p = product;
    if (i == j) {
      int cap = residual[i] / 2;
      for (int a = 0; a <= cap; ++a) {
        if (a > 0) {
          weight /= 2 * a;
          product = product * c;
        }
        residual[i] -= 2 * a;
        run(i, j + 1);
        residual[i] += 2 * a;
      }
    } else {
      int cap = std::min(residual[i], residual[j]);
      for (int a = 0; a <= cap; ++a) {
        if (a > 0) {
          weight /= a;
          product = product * c;
        }
        residual[i] -= a;
        residual[j] -= a;
        run(i, j + 1);
        residual[i] += a;
        residual[j] += a;
      }
    }
    weight = saved_w;
    product = saved_p;
  }
};

void check_covariance(std::span<const int> word, const std::vector<std::vector<Number>>& C) {
  const std::size_t m = C.size();
  for (const auto& row : C) {
    if (row.size() != m) throw Error(ErrorCode::ShapeMismatch, "covariance matrix must be square");
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::fabs(C[i][j].approx - C[j][i].approx) > 1e-12) throw Error(ErrorCode::ShapeMismatch, "covariance matrix must be symmetric");
  for (int w : word) {
    if (w < 0 || static_cast<std::size_t>(w) >= m) throw Error(ErrorCode::ShapeMismatch, "word letter outside the covariance matrix");
  }
}

}  // namespace

Number gaussian_wick_joint(std::span<const int> word, const std::vector<std::vector<Number>>& C) {
  check_covariance(word, C);
  if (word.size() % 2 != 0) return Number();
  // Pairings with a_ij pairs between components i and j number
  // prod c_i! / (prod_i 2^{a_ii} a_ii! prod_{i<j} a_ij!).
  std::map<int, int> counts;
  for (int w : word) ++counts[w];
  WickTypes wt(C);
  Integer numer = 1;
  for (const auto& [comp, c] : counts) {
    wt.comps.push_back(comp);
    wt.residual.push_back(c);
    numer *= factorial_int(c);
  }
  wt.run(0, 0);
  return wt.total * Number(Rational(numer));
}

}  // namespace chaoskit
