#include "chaoskit/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "chaoskit/error.hpp"
#include "chaoskit/rng.hpp"

namespace chaoskit {

namespace {

constexpr std::size_t kMaxStoredTuples = 5'000'000;

std::string tuple_key(std::span<const int> t) {
  return {reinterpret_cast<const char*>(t.data()), t.size() * sizeof(int)};
}

double factorial_d(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

void check_shape(int n, int d) {
  if (d < 2) throw Error(ErrorCode::ShapeMismatch, "degree must be at least 2");
  if (n < d) throw Error(ErrorCode::ShapeMismatch, "n must be at least d (no off-diagonal tuple otherwise)");
}

/// Validates an ordered raw tuple and returns its sorted form, or nullopt on a diagonal.
std::optional<IndexTuple> sorted_off_diagonal(int n, int d, const IndexTuple& t) {
  if (static_cast<int>(t.size()) != d) {
    throw Error(ErrorCode::ShapeMismatch, "raw tuple length differs from d");
  }
  for (int i : t) {
    if (i < 0 || i >= n) throw Error(ErrorCode::BadIndex, "index " + std::to_string(i + 1) + " outside [n]");
  }
  IndexTuple s = t;
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) return std::nullopt;
  return s;
}

/// Lexicographic visit of all strictly increasing d-tuples over [n].
template <class F>
void for_each_combination(int n, int d, F&& f) {
  IndexTuple t(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) t[static_cast<std::size_t>(j)] = j;
  while (true) {
    f(t);
    int j = d - 1;
    while (j >= 0 && t[static_cast<std::size_t>(j)] == n - d + j) --j;
    if (j < 0) return;
    ++t[static_cast<std::size_t>(j)];
    for (int k = j + 1; k < d; ++k) t[static_cast<std::size_t>(k)] = t[static_cast<std::size_t>(k - 1)] + 1;
  }
}

Integer binomial(int n, int k) {
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

Kernel unit_kernel(int n, int d, std::vector<int> indices) {
  std::size_t count = indices.size() / static_cast<std::size_t>(d);
  Rational dfact = factorial(static_cast<unsigned>(d));
  Rational c2 = Rational(1) / (dfact * dfact * Rational(static_cast<long>(count)));
  std::vector<Rational> w(count, Rational(1));
  return Kernel(n, d, std::move(indices), std::move(w), c2);
}

}  // namespace

Kernel::Kernel(int n, int d, std::vector<int> indices, std::vector<double> values)
    : n_(n), d_(d), indices_(std::move(indices)), values_(std::move(values)) {
  build_index();
}

Kernel::Kernel(int n, int d, std::vector<int> indices, std::vector<Rational> weights, Rational c2)
    : n_(n), d_(d), indices_(std::move(indices)), weights_(std::move(weights)), c2_(std::move(c2)) {
  scale_ = Surd::sqrt(*c2_);
  double s = scale_.to_double();
  values_.reserve(weights_.size());
  unit_weights_ = true;
  for (const auto& w : weights_) {
    values_.push_back(w.get_d() * s);
    if (w != 1) unit_weights_ = false;
  }
  build_index();
}

void Kernel::build_index() {
  by_index_.assign(static_cast<std::size_t>(n_), {});
  lookup_.reserve(values_.size());
  for (std::size_t t = 0; t < values_.size(); ++t) {
    auto tp = tuple(t);
    lookup_.emplace(tuple_key(tp), t);
    for (int i : tp) by_index_[static_cast<std::size_t>(i)].push_back(t);
  }
}

std::optional<std::size_t> Kernel::find(std::span<const int> sorted) const {
  if (static_cast<int>(sorted.size()) != d_) return std::nullopt;
  auto it = lookup_.find(tuple_key(sorted));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

double Kernel::at(std::span<const int> ordered) const {
  IndexTuple s(ordered.begin(), ordered.end());
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) return 0.0;
  auto t = find(s);
  return t ? values_[*t] : 0.0;
}

bool operator==(const Kernel& a, const Kernel& b) {
  if (a.n_ != b.n_ || a.d_ != b.d_ || a.indices_ != b.indices_) return false;
  if (a.is_exact() != b.is_exact()) return false;
  if (a.is_exact()) return a.weights_ == b.weights_ && *a.c2_ == *b.c2_;
  return a.values_ == b.values_;
}

Kernel make_kernel(int n, int d, const RawEntries& raw) {
  check_shape(n, d);
  std::map<IndexTuple, double> sym;
  for (const auto& [t, v] : raw) {
    if (auto s = sorted_off_diagonal(n, d, t)) sym[*s] += v;
  }
  std::vector<int> indices;
  std::vector<double> values;
  double norm2 = 0.0;
  for (const auto& [t, v] : sym) {
    if (v == 0.0) continue;
    indices.insert(indices.end(), t.begin(), t.end());
    values.push_back(v);
    norm2 += v * v;
  }
  if (values.empty()) throw Error(ErrorCode::AllDiagonal, "no off-diagonal mass to normalize");
  double scale = 1.0 / (factorial_d(d) * std::sqrt(norm2));
  for (auto& v : values) v *= scale;
  return Kernel(n, d, std::move(indices), std::move(values));
}

Kernel make_kernel(int n, int d, const RawExactEntries& raw) {
  check_shape(n, d);
  std::map<IndexTuple, Rational> sym;
  for (const auto& [t, v] : raw) {
    if (auto s = sorted_off_diagonal(n, d, t)) sym[*s] += v;
  }
  std::vector<int> indices;
  std::vector<Rational> weights;
  for (const auto& [t, v] : sym) {
    if (v == 0) continue;
    indices.insert(indices.end(), t.begin(), t.end());
    weights.push_back(v);
  }
  if (weights.empty()) throw Error(ErrorCode::AllDiagonal, "no off-diagonal mass to normalize");

  // Integer-primitive weights make the representation canonical.
  Integer lcm_den = 1;
  for (const auto& w : weights) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), w.get_den_mpz_t());
  Integer gcd_num = 0;
  for (auto& w : weights) {
    w *= lcm_den;
    w.canonicalize();
    mpz_gcd(gcd_num.get_mpz_t(), gcd_num.get_mpz_t(), w.get_num_mpz_t());
  }
  Rational norm2 = 0;
  for (auto& w : weights) {
    w /= gcd_num;
    w.canonicalize();
    norm2 += w * w;
  }
  Rational dfact = factorial(static_cast<unsigned>(d));
  Rational c2 = Rational(1) / (dfact * dfact * norm2);
  c2.canonicalize();
  return Kernel(n, d, std::move(indices), std::move(weights), std::move(c2));
}

Family parse_family(std::string_view name) {
  if (name == "constant") return Family::Constant;
  if (name == "disjoint_pairs") return Family::DisjointPairs;
  if (name == "concentrated") return Family::Concentrated;
  if (name == "random_dense") return Family::RandomDense;
  throw Error(ErrorCode::BadFamilyParams, "unknown family '" + std::string(name) + "'");
}

std::string_view family_name(Family f) {
  switch (f) {
    case Family::Constant: return "constant";
    case Family::DisjointPairs: return "disjoint_pairs";
    case Family::Concentrated: return "concentrated";
    case Family::RandomDense: return "random_dense";
  }
  return "unknown";
}

Kernel family(Family f, int n, int d, std::optional<std::uint64_t> seed) {
  if (d < 2 || n < d) throw Error(ErrorCode::BadFamilyParams, "family requires d >= 2 and n >= d");
  switch (f) {
    case Family::Constant: {
      if (binomial(n, d) > kMaxStoredTuples) throw Error(ErrorCode::TooLarge, "constant kernel too large");
      std::vector<int> indices;
      for_each_combination(n, d, [&](const IndexTuple& t) { indices.insert(indices.end(), t.begin(), t.end()); });
      return unit_kernel(n, d, std::move(indices));
    }
    case Family::DisjointPairs: {
      if (d != 2 || n % 2 != 0) throw Error(ErrorCode::BadFamilyParams, "disjoint_pairs requires d = 2 and even n");
      std::vector<int> indices;
      for (int k = 0; k < n; k += 2) {
        indices.push_back(k);
        indices.push_back(k + 1);
      }
      return unit_kernel(n, d, std::move(indices));
    }
    case Family::Concentrated: {
      std::vector<int> indices(static_cast<std::size_t>(d));
      for (int j = 0; j < d; ++j) indices[static_cast<std::size_t>(j)] = j;
      return unit_kernel(n, d, std::move(indices));
    }
    case Family::RandomDense: {
      if (!seed) throw Error(ErrorCode::BadFamilyParams, "random_dense requires a seed");
      if (binomial(n, d) > kMaxStoredTuples) throw Error(ErrorCode::TooLarge, "random_dense kernel too large");
      RandomStream rng(substream_seed(*seed, 0));
      RawEntries raw;
      for_each_combination(n, d, [&](const IndexTuple& t) { raw.emplace(t, rng.normal()); });
      return make_kernel(n, d, raw);
    }
  }
  throw Error(ErrorCode::BadFamilyParams, "unknown family");
}

InfluenceProfile influence_profile(const Kernel& k) {
  const auto n = static_cast<std::size_t>(k.n());
  InfluenceProfile out;
  out.per_index.reserve(n);
  if (k.is_exact()) {
    std::vector<Rational> acc(n, Rational(0));
    for (std::size_t t = 0; t < k.size(); ++t) {
      Rational w2 = k.weight(t) * k.weight(t);
      for (int i : k.tuple(t)) acc[static_cast<std::size_t>(i)] += w2;
    }
    Rational factor = factorial(static_cast<unsigned>(k.degree() - 1)) * k.c2();
    Rational best = 0;
    for (auto& a : acc) {
      a *= factor;
      a.canonicalize();
      if (a > best) best = a;
      out.per_index.emplace_back(a);
    }
    out.tau = Number(best);
    return out;
  }
  std::vector<double> acc(n, 0.0);
  for (std::size_t t = 0; t < k.size(); ++t) {
    double v2 = k.value(t) * k.value(t);
    for (int i : k.tuple(t)) acc[static_cast<std::size_t>(i)] += v2;
  }
  double factor = factorial_d(k.degree() - 1);
  double best = 0.0;
  for (double a : acc) {
    a *= factor;
    best = std::max(best, a);
    out.per_index.push_back(Number::inexact(a));
  }
  out.tau = Number::inexact(best);
  return out;
}

Number covariance(const Kernel& f, const Kernel& g) {
  if (f.n() != g.n() || f.degree() != g.degree()) {
    throw Error(ErrorCode::ShapeMismatch, "covariance needs kernels of equal n and d");
  }
  if (f.is_exact() && g.is_exact()) {
    Rational acc = 0;
    for (std::size_t t = 0; t < f.size(); ++t) {
      if (auto u = g.find(f.tuple(t))) acc += f.weight(t) * g.weight(*u);
    }
    Rational dfact = factorial(static_cast<unsigned>(f.degree()));
    Surd value = f.scale() * g.scale();
    value *= dfact * dfact * acc;
    return Number(value);
  }
  double acc = 0.0;
  for (std::size_t t = 0; t < f.size(); ++t) {
    if (auto u = g.find(f.tuple(t))) acc += f.value(t) * g.value(*u);
  }
  double dfact = factorial_d(f.degree());
  return Number::inexact(dfact * dfact * acc);
}

double evaluate_sum(const Kernel& k, std::span<const double> x) {
  if (static_cast<int>(x.size()) != k.n()) throw Error(ErrorCode::ShapeMismatch, "x must have length n");
  double acc = 0.0;
  for (std::size_t t = 0; t < k.size(); ++t) {
    double term = k.value(t);
    for (int i : k.tuple(t)) term *= x[static_cast<std::size_t>(i)];
    acc += term;
  }
  return factorial_d(k.degree()) * acc;
}

double normalization_residual(const Kernel& k) {
  if (k.is_exact()) return 0.0;
  double acc = 0.0;
  for (std::size_t t = 0; t < k.size(); ++t) acc += k.value(t) * k.value(t);
  double dfact = factorial_d(k.degree());
  return std::fabs(dfact * dfact * acc - 1.0);
}

}  // namespace chaoskit
