#include "chaoskit/distributions.hpp"

#include <cmath>
#include <numbers>

#include "chaoskit/error.hpp"
#include "chaoskit/partitions.hpp"

namespace chaoskit {

namespace {

constexpr int kMinOrder = 8;
constexpr int kMaxFreeOrder = 16;
constexpr int kMaxHermiteLaw = 6;

Surd binomial(int n, int k) {
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return Surd(Rational(r));
}

// coefficients [z^0..z^deg] of M(z)^s for s = 0..deg, M(z) = sum_j m_j z^j.
std::vector<std::vector<Surd>> series_powers(std::span<const Surd> m, int deg) {
  std::vector<std::vector<Surd>> pow(static_cast<std::size_t>(deg + 1),
                                     std::vector<Surd>(static_cast<std::size_t>(deg + 1)));
  pow[0][0] = Surd(1);
  for (int s = 1; s <= deg; ++s) {
    auto& cur = pow[static_cast<std::size_t>(s)];
    const auto& prev = pow[static_cast<std::size_t>(s - 1)];
    for (int a = 0; a <= deg; ++a) {
      if (prev[static_cast<std::size_t>(a)].is_zero()) continue;
      for (int b = 0; a + b <= deg && b < static_cast<int>(m.size()); ++b) {
        if (m[static_cast<std::size_t>(b)].is_zero()) continue;
        cur[static_cast<std::size_t>(a + b)] += prev[static_cast<std::size_t>(a)] * m[static_cast<std::size_t>(b)];
      }
    }
  }
  return pow;
}

void check_moment_zero(std::span<const Surd> moments) {
  if (moments.empty() || moments[0] != Surd(1)) throw Error(ErrorCode::ShapeMismatch, "moment sequences start with m_0 = 1");
}

bool is_negative(const Surd& s) { return !s.is_zero() && s.to_long_double() < 0; }

Integer evaluate_against(const std::vector<Integer>& poly, int m, const std::vector<Integer>& base_moments) {
  // poly^m, then sum_p c_p * base_moments[p].
  std::vector<Integer> acc{Integer(1)};
  for (int r = 0; r < m; ++r) {
    std::vector<Integer> next(acc.size() + poly.size() - 1, Integer(0));
    for (std::size_t i = 0; i < acc.size(); ++i) {
      for (std::size_t j = 0; j < poly.size(); ++j) next[i + j] += acc[i] * poly[j];
    }
    acc = std::move(next);
  }
  Integer total = 0;
  for (std::size_t p = 0; p < acc.size(); ++p) total += acc[p] * base_moments.at(p);
  return total;
}

// Monic orthogonal polynomials by three-term recursion P_{j+1} = x P_j - b_j P_{j-1}.
std::vector<Integer> orthogonal_polynomial(int k, bool hermite) {
  std::vector<Integer> prev{Integer(1)};
  std::vector<Integer> cur{Integer(0), Integer(1)};
  if (k == 0) return prev;
  for (int j = 1; j < k; ++j) {
    std::vector<Integer> next(cur.size() + 1, Integer(0));
    for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] += cur[i];
    Integer b = hermite ? Integer(j) : Integer(1);
    for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= b * prev[i];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

void check_star_caps(int k, int m) {
  if (k < 1 || m < 1) throw Error(ErrorCode::ShapeMismatch, "need k, m >= 1");
  if (k > 4 || m > 6) throw Error(ErrorCode::TooLarge, "polynomial moments capped at k <= 4, m <= 6");
}

double hermite_value(int k, double x) {
  double prev = 1.0;
  double cur = x;
  if (k == 0) return prev;
  for (int j = 1; j < k; ++j) {
    double next = x * cur - j * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

std::string_view suffix_after(std::string_view name, std::string_view prefix) {
  return name.substr(prefix.size());
}

}  // namespace

const Surd& ClassicalDist::moment(int j) const {
  if (j < 0 || j > max_order()) {
    throw Error(ErrorCode::TooLarge, "law '" + name + "' has moments up to order " + std::to_string(max_order()));
  }
  return moments[static_cast<std::size_t>(j)];
}

bool ClassicalDist::standardized() const {
  return max_order() >= 2 && moments[1].is_zero() && moments[2] == Surd(1);
}

bool ClassicalDist::assumption1() const { return standardized() && max_order() >= 4 && moments[3].is_zero(); }

bool ClassicalDist::symmetric() const {
  for (int j = 1; j <= max_order(); j += 2) {
    if (!moments[static_cast<std::size_t>(j)].is_zero()) return false;
  }
  return true;
}

bool ClassicalDist::outside_theorem_class() const { return !assumption1() || is_negative(chi4(*this)); }

const Surd& FreeDist::moment(int j) const {
  if (j < 0 || j > max_order()) {
    throw Error(ErrorCode::TooLarge, "law '" + name + "' has moments up to order " + std::to_string(max_order()));
  }
  return moments[static_cast<std::size_t>(j)];
}

const Surd& FreeDist::cumulant(int j) const {
  if (j < 1 || j > max_order()) {
    throw Error(ErrorCode::TooLarge, "law '" + name + "' has free cumulants up to order " + std::to_string(max_order()));
  }
  return cumulants[static_cast<std::size_t>(j)];
}

bool FreeDist::standardized() const { return max_order() >= 2 && cumulants[1].is_zero() && cumulants[2] == Surd(1); }

bool FreeDist::outside_theorem_class() const { return !standardized() || max_order() < 4 || is_negative(kappa4(*this)); }

std::vector<Surd> moments_to_free_cumulants(std::span<const Surd> moments) {
  check_moment_zero(moments);
  const int M = static_cast<int>(moments.size()) - 1;
  auto pow = series_powers(moments, M);
  // m_n = sum_{s=1}^{n} kappa_s [z^{n-s}] M(z)^s  (first-block decomposition).
  std::vector<Surd> kappa(static_cast<std::size_t>(M + 1));
  for (int n = 1; n <= M; ++n) {
    Surd k = moments[static_cast<std::size_t>(n)];
    for (int s = 1; s < n; ++s) {
      k -= kappa[static_cast<std::size_t>(s)] * pow[static_cast<std::size_t>(s)][static_cast<std::size_t>(n - s)];
    }
    kappa[static_cast<std::size_t>(n)] = k;
  }
  return kappa;
}

std::vector<Surd> free_cumulants_to_moments(std::span<const Surd> cumulants) {
  const int M = static_cast<int>(cumulants.size()) - 1;
  std::vector<Surd> m(static_cast<std::size_t>(M + 1));
  if (M < 0) return m;
  m[0] = Surd(1);
  for (int n = 1; n <= M; ++n) {
    auto pow = series_powers(std::span<const Surd>(m.data(), static_cast<std::size_t>(n)), n - 1);
    Surd v = cumulants[static_cast<std::size_t>(n)];
    for (int s = 1; s < n; ++s) {
      v += cumulants[static_cast<std::size_t>(s)] * pow[static_cast<std::size_t>(s)][static_cast<std::size_t>(n - s)];
    }
    m[static_cast<std::size_t>(n)] = v;
  }
  return m;
}

std::vector<Surd> moments_to_classical_cumulants(std::span<const Surd> moments) {
  check_moment_zero(moments);
  const int M = static_cast<int>(moments.size()) - 1;
  std::vector<Surd> kappa(static_cast<std::size_t>(M + 1));
  for (int n = 1; n <= M; ++n) {
    Surd k = moments[static_cast<std::size_t>(n)];
    for (int j = 1; j < n; ++j) {
      k -= binomial(n - 1, j - 1) * kappa[static_cast<std::size_t>(j)] * moments[static_cast<std::size_t>(n - j)];
    }
    kappa[static_cast<std::size_t>(n)] = k;
  }
  return kappa;
}

std::vector<Surd> classical_cumulants_to_moments(std::span<const Surd> cumulants) {
  const int M = static_cast<int>(cumulants.size()) - 1;
  std::vector<Surd> m(static_cast<std::size_t>(M + 1));
  if (M < 0) return m;
  m[0] = Surd(1);
  for (int n = 1; n <= M; ++n) {
    Surd v;
    for (int j = 1; j <= n; ++j) {
      v += binomial(n - 1, j - 1) * cumulants[static_cast<std::size_t>(j)] * m[static_cast<std::size_t>(n - j)];
    }
    m[static_cast<std::size_t>(n)] = v;
  }
  return m;
}

Surd chi4(const ClassicalDist& d) {
  if (!d.standardized() || d.max_order() < 4) throw Error(ErrorCode::NotStandardized, "law '" + d.name + "' is not standardized");
  return d.moments[4] - Surd(3);
}

Surd kappa4(const FreeDist& d) {
  if (!d.standardized() || d.max_order() < 4) throw Error(ErrorCode::NotStandardized, "law '" + d.name + "' is not standardized");
  return d.moments[4] - Surd(2);
}

Integer hermite_moment(int k, int m) {
  check_star_caps(k, m);
  return star_pairing_count(k, m, false);
}

Integer chebyshev_moment(int k, int m) {
  check_star_caps(k, m);
  return star_pairing_count(k, m, true);
}

Integer hermite_moment_by_expansion(int k, int m) {
  check_star_caps(k, m);
  std::vector<Integer> base(static_cast<std::size_t>(k * m + 1), Integer(0));
  for (int p = 0; p <= k * m; p += 2) base[static_cast<std::size_t>(p)] = Integer(static_cast<unsigned long>(double_factorial(p - 1)));
  return evaluate_against(orthogonal_polynomial(k, true), m, base);
}

Integer chebyshev_moment_by_expansion(int k, int m) {
  check_star_caps(k, m);
  std::vector<Integer> base(static_cast<std::size_t>(k * m + 1), Integer(0));
  for (int p = 0; p <= k * m; p += 2) base[static_cast<std::size_t>(p)] = Integer(static_cast<unsigned long>(catalan(p / 2)));
  return evaluate_against(orthogonal_polynomial(k, false), m, base);
}

ClassicalDist convolve_cumulants(const ClassicalDist& a, const ClassicalDist& b) {
  for (const auto* d : {&a, &b}) {
    if (!d->assumption1()) throw Error(ErrorCode::NotStandardized, "law '" + d->name + "' needs m1 = 0, m2 = 1, m3 = 0");
  }
  const int M = std::min(a.max_order(), b.max_order());
  auto ka = moments_to_classical_cumulants(std::span<const Surd>(a.moments.data(), static_cast<std::size_t>(M + 1)));
  auto kb = moments_to_classical_cumulants(std::span<const Surd>(b.moments.data(), static_cast<std::size_t>(M + 1)));
  Surd inv_sqrt2 = Surd::sqrt(Rational(1, 2));
  std::vector<Surd> kz(static_cast<std::size_t>(M + 1));
  for (int j = 1; j <= M; ++j) {
    kz[static_cast<std::size_t>(j)] = (ka[static_cast<std::size_t>(j)] + kb[static_cast<std::size_t>(j)]) * inv_sqrt2.pow(static_cast<unsigned>(j));
  }
  return classical_from_moments(a.name + "+" + b.name, classical_cumulants_to_moments(kz));
}

Surd multiply_kurtosis(const ClassicalDist& a, const ClassicalDist& b) {
  for (const auto* d : {&a, &b}) {
    if (!d->assumption1()) throw Error(ErrorCode::NotStandardized, "law '" + d->name + "' needs m1 = 0, m2 = 1, m3 = 0");
  }
  return a.moments[4] * b.moments[4] - Surd(3);
}

double draw(const ClassicalDist& d, RandomStream& rng) {
  switch (d.sampler) {
    case Sampler::Gaussian:
      return rng.normal();
    case Sampler::Laplace: {
      // scale 1/sqrt(2) gives unit variance
      double u = rng.uniform();
      double b = std::numbers::sqrt2 / 2.0;
      return u < 0.5 ? b * std::log(2.0 * u) : -b * std::log(2.0 * (1.0 - u));
    }
    case Sampler::Uniform:
      return std::numbers::sqrt3 * (2.0 * rng.uniform() - 1.0);
    case Sampler::Rademacher:
      return (rng.bits() >> 63U) != 0 ? 1.0 : -1.0;
    case Sampler::Hermite: {
      double norm = std::sqrt(std::tgamma(static_cast<double>(d.hermite_k) + 1.0));
      return hermite_value(d.hermite_k, rng.normal()) / norm;
    }
    case Sampler::None:
      break;
  }
  throw Error(ErrorCode::NoSampler, "law '" + d.name + "' has no sampler");
}

std::vector<double> sample(const ClassicalDist& d, std::size_t count, std::uint64_t seed) {
  if (d.sampler == Sampler::None) throw Error(ErrorCode::NoSampler, "law '" + d.name + "' has no sampler");
  RandomStream rng(seed);
  std::vector<double> out(count);
  for (auto& x : out) x = draw(d, rng);
  return out;
}

ClassicalDist classical_from_moments(std::string name, std::vector<Surd> moments) {
  check_moment_zero(moments);
  ClassicalDist d;
  d.name = std::move(name);
  d.moments = std::move(moments);
  return d;
}

FreeDist free_from_moments(std::string name, std::vector<Surd> moments) {
  check_moment_zero(moments);
  FreeDist d;
  d.name = std::move(name);
  d.cumulants = moments_to_free_cumulants(moments);
  d.moments = std::move(moments);
  return d;
}

FreeDist free_from_cumulants(std::string name, std::vector<Surd> cumulants) {
  if (cumulants.empty()) throw Error(ErrorCode::ShapeMismatch, "empty cumulant sequence");
  cumulants[0] = Surd();
  FreeDist d;
  d.name = std::move(name);
  d.moments = free_cumulants_to_moments(cumulants);
  d.cumulants = std::move(cumulants);
  return d;
}

ClassicalDist classical_law(std::string_view name, int order) {
  if (order < kMinOrder) order = kMinOrder;
  std::vector<Surd> m(static_cast<std::size_t>(order + 1));
  m[0] = Surd(1);
  ClassicalDist d;
  d.name = std::string(name);
  if (name == "gaussian") {
    for (int j = 2; j <= order; j += 2) m[static_cast<std::size_t>(j)] = Surd(Rational(static_cast<unsigned long>(double_factorial(j - 1))));
    d.sampler = Sampler::Gaussian;
  } else if (name == "laplace") {
    for (int j = 2; j <= order; j += 2) {
      Rational v = factorial(static_cast<unsigned>(j));
      v /= Rational(Integer(1) << static_cast<unsigned>(j / 2));  // b^{2k} = 2^{-k}
      m[static_cast<std::size_t>(j)] = Surd(v);
    }
    d.sampler = Sampler::Laplace;
  } else if (name == "uniform") {
    Rational three_k = 1;
    for (int j = 2; j <= order; j += 2) {
      three_k *= 3;
      m[static_cast<std::size_t>(j)] = Surd(three_k / (j + 1));
    }
    d.sampler = Sampler::Uniform;
  } else if (name == "rademacher") {
    for (int j = 2; j <= order; j += 2) m[static_cast<std::size_t>(j)] = Surd(1);
    d.sampler = Sampler::Rademacher;
  } else if (name.starts_with("hermite:")) {
    std::string_view arg = suffix_after(name, "hermite:");
    int k = 0;
    try {
      k = std::stoi(std::string(arg));
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad Hermite degree in '" + std::string(name) + "'");
    }
    if (k < 1 || k > kMaxHermiteLaw) throw Error(ErrorCode::BadFamilyParams, "hermite:K needs 1 <= K <= 6");
    Surd inv_norm = Surd::sqrt(Rational(1) / factorial(static_cast<unsigned>(k)));
    for (int j = 1; j <= order; ++j) {
      m[static_cast<std::size_t>(j)] = Surd(Rational(star_pairing_count(k, j, false))) * inv_norm.pow(static_cast<unsigned>(j));
    }
    d.sampler = Sampler::Hermite;
    d.hermite_k = k;
    d.name = "hermite:" + std::to_string(k);
  } else {
    throw Error(ErrorCode::ParseError, "unknown classical law '" + std::string(name) + "'");
  }
  d.moments = std::move(m);
  return d;
}

Rational tetilla_moment_table(int m) {
  if (m < 0 || m > 12) throw Error(ErrorCode::TooLarge, "tetilla moments capped at order 12");
  if (m % 2 != 0) return Rational(0);
  std::vector<int> labels(static_cast<std::size_t>(2 * m));
  std::uint64_t total = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << static_cast<unsigned>(m)); ++mask) {
    for (int f = 0; f < m; ++f) {
      bool swap = ((mask >> static_cast<unsigned>(f)) & 1U) != 0;
      labels[static_cast<std::size_t>(2 * f)] = swap ? 1 : 0;
      labels[static_cast<std::size_t>(2 * f + 1)] = swap ? 0 : 1;
    }
    total += count_labelled_nc_pairings(labels);
  }
  // (1/sqrt 2)^m with m even
  Rational r(Integer(static_cast<unsigned long>(total)), Integer(1) << static_cast<unsigned>(m / 2));
  r.canonicalize();
  return r;
}

FreeDist free_law(std::string_view name, int order) {
  if (order < kMinOrder) order = kMinOrder;
  if (order > kMaxFreeOrder) throw Error(ErrorCode::TooLarge, "free laws are tabulated up to order 16");
  if (name == "semicircular") {
    std::vector<Surd> kappa(static_cast<std::size_t>(order + 1));
    kappa[2] = Surd(1);
    return free_from_cumulants("semicircular", std::move(kappa));
  }
  if (name.starts_with("freepoisson:")) {
    Rational lambda = parse_rational(suffix_after(name, "freepoisson:"));
    if (lambda <= 0) throw Error(ErrorCode::BadFamilyParams, "free Poisson rate must be positive");
    // (P - lambda)/sqrt(lambda): kappa_j = lambda^{1 - j/2} for j >= 2.
    Surd inv_root = Surd::sqrt(Rational(1) / lambda);
    std::vector<Surd> kappa(static_cast<std::size_t>(order + 1));
    for (int j = 2; j <= order; ++j) kappa[static_cast<std::size_t>(j)] = Surd(lambda) * inv_root.pow(static_cast<unsigned>(j));
    return free_from_cumulants("freepoisson:" + to_string(lambda), std::move(kappa));
  }
  if (name.starts_with("qgauss:")) {
    Rational q = parse_rational(suffix_after(name, "qgauss:"));
    if (q < -1 || q > 1) throw Error(ErrorCode::BadFamilyParams, "q must lie in [-1, 1]");
    std::vector<Surd> m(static_cast<std::size_t>(order + 1));
    m[0] = Surd(1);
    for (int j = 2; j <= order; j += 2) {
      auto poly = crossing_polynomial(j);
      Rational v = 0;
      Rational qp = 1;
      for (const auto& c : poly) {
        v += Rational(c) * qp;
        qp *= q;
      }
      m[static_cast<std::size_t>(j)] = Surd(v);
    }
    return free_from_moments("qgauss:" + to_string(q), std::move(m));
  }
  if (name == "tetilla") {
    if (order > 12) throw Error(ErrorCode::TooLarge, "tetilla moments capped at order 12");
    std::vector<Surd> m(static_cast<std::size_t>(order + 1));
    for (int j = 0; j <= order; ++j) m[static_cast<std::size_t>(j)] = Surd(tetilla_moment_table(j));
    return free_from_moments("tetilla", std::move(m));
  }
  throw Error(ErrorCode::ParseError, "unknown free law '" + std::string(name) + "'");
}

}  // namespace chaoskit
