#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"

#include "chaoskit/error.hpp"
#include "chaoskit/kernels.hpp"
#include "chaoskit/rng.hpp"

using namespace chaoskit;

namespace {

// E[Q(f) Q(g)] by averaging over all 2^n sign vectors.
double rademacher_covariance(const Kernel& f, const Kernel& g) {
  const int n = f.n();
  double acc = 0.0;
  std::vector<double> x(static_cast<std::size_t>(n));
  for (std::uint32_t mask = 0; mask < (1U << static_cast<unsigned>(n)); ++mask) {
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = ((mask >> static_cast<unsigned>(i)) & 1U) ? 1.0 : -1.0;
    acc += evaluate_sum(f, x) * evaluate_sum(g, x);
  }
  return acc / static_cast<double>(1U << static_cast<unsigned>(n));
}

}  // namespace

TEST_CASE("make_kernel normalizes a single entry") {
  Kernel k = make_kernel(2, 2, RawExactEntries{{{0, 1}, Rational(5)}});
  REQUIRE(k.size() == 1);
  CHECK(k.exact_value(0) == Surd(Rational(1, 2)));
  CHECK(k.value(0) == doctest::Approx(0.5));
}

TEST_CASE("make_kernel symmetrizes before normalizing") {
  Kernel a = make_kernel(3, 2, RawExactEntries{{{0, 1}, Rational(1)}, {{1, 0}, Rational(1)}});
  Kernel b = make_kernel(3, 2, RawExactEntries{{{0, 1}, Rational(2)}});
  CHECK(a == b);
  Kernel fa = make_kernel(3, 2, RawEntries{{{0, 1}, 1.0}, {{1, 0}, 1.0}});
  Kernel fb = make_kernel(3, 2, RawEntries{{{0, 1}, 2.0}});
  CHECK(fa == fb);
}

TEST_CASE("make_kernel rejects diagonal-only and out-of-range input") {
  CHECK_THROWS_WITH_AS(make_kernel(3, 2, RawEntries{{{0, 0}, 7.0}}), doctest::Contains("AllDiagonal"), Error);
  CHECK_THROWS_WITH_AS(make_kernel(3, 2, RawEntries{{{0, 3}, 1.0}}), doctest::Contains("BadIndex"), Error);
  CHECK_THROWS_AS(make_kernel(1, 2, RawEntries{{{0, 1}, 1.0}}), Error);
}

TEST_CASE("permuted raw maps give identical kernels") {
  RandomStream rng(7);
  RawExactEntries a, b;
  for (int r = 0; r < 20; ++r) {
    IndexTuple t{static_cast<int>(rng.bits() % 5), static_cast<int>(rng.bits() % 5), static_cast<int>(rng.bits() % 5)};
    Rational w(static_cast<long>(rng.bits() % 7) - 3);
    a[t] += w;
    IndexTuple p{t[2], t[0], t[1]};
    b[p] += w;
  }
  bool a_has_mass = false;
  try {
    Kernel ka = make_kernel(5, 3, a);
    a_has_mass = true;
    CHECK(ka == make_kernel(5, 3, b));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AllDiagonal);
  }
  (void)a_has_mass;
}

TEST_CASE("constant family values and influences") {
  Kernel k = family(Family::Constant, 3, 2);
  CHECK(k.size() == 3);
  for (std::size_t t = 0; t < k.size(); ++t) CHECK(k.exact_value(t) == Surd::sqrt(Rational(1, 12)));
  auto inf = influence_profile(k);
  for (const auto& v : inf.per_index) CHECK(v.str() == "1/6");
  CHECK(inf.tau.str() == "1/6");
  for (int n : {4, 7, 10}) {
    auto p = influence_profile(family(Family::Constant, n, 2));
    CHECK(*p.tau.exact == Surd(Rational(1, 2 * n)));
  }
}

TEST_CASE("disjoint_pairs and concentrated families") {
  Kernel dp = family(Family::DisjointPairs, 4, 2);
  CHECK(dp.size() == 2);
  CHECK(dp.exact_value(0) == Surd::sqrt(Rational(1, 8)));
  CHECK(influence_profile(dp).tau.str() == "1/8");
  CHECK(influence_profile(family(Family::DisjointPairs, 8, 2)).tau.str() == "1/16");
  CHECK_THROWS_AS(family(Family::DisjointPairs, 5, 2), Error);
  CHECK_THROWS_AS(family(Family::DisjointPairs, 6, 3), Error);

  Kernel c = family(Family::Concentrated, 100, 2);
  CHECK(c.size() == 1);
  CHECK(c.exact_value(0) == Surd(Rational(1, 2)));
  CHECK(influence_profile(c).tau.str() == "1/4");
  CHECK(influence_profile(family(Family::Concentrated, 50, 2)).tau.str() == "1/4");
  CHECK(influence_profile(family(Family::Concentrated, 9, 3)).tau.str() == "1/18");
}

TEST_CASE("random_dense is seeded and admissible") {
  CHECK_THROWS_AS(family(Family::RandomDense, 5, 2), Error);
  Kernel a = family(Family::RandomDense, 6, 3, 11);
  Kernel b = family(Family::RandomDense, 6, 3, 11);
  Kernel c = family(Family::RandomDense, 6, 3, 12);
  CHECK(a == b);
  CHECK(!(a == c));
  CHECK(normalization_residual(a) < 1e-12);
}

TEST_CASE("influence profiles sum to 1/d!") {
  for (int d : {2, 3, 4}) {
    for (std::uint64_t seed : {1, 2, 3}) {
      Kernel k = family(Family::RandomDense, 7, d, seed);
      auto p = influence_profile(k);
      double s = 0.0;
      for (const auto& v : p.per_index) s += v.approx;
      double dfact = std::tgamma(d + 1.0);
      CHECK(std::fabs(s - 1.0 / dfact) < 1e-12);
      CHECK(p.tau.approx >= 1.0 / (7 * dfact) - 1e-15);
      CHECK(p.tau.approx <= 1.0 / dfact + 1e-15);
    }
    Kernel e = family(Family::Constant, 6, d);
    Rational total = 0;
    for (const auto& v : influence_profile(e).per_index) total += v.exact->as_rational().value();
    CHECK(total == Rational(1) / factorial(static_cast<unsigned>(d)));
  }
}

TEST_CASE("symmetric extension agrees on every ordering") {
  Kernel k = family(Family::RandomDense, 5, 3, 4);
  for (std::size_t t = 0; t < k.size(); ++t) {
    std::vector<int> tup(k.tuple(t).begin(), k.tuple(t).end());
    do {
      CHECK(k.at(tup) == k.value(t));
    } while (std::next_permutation(tup.begin(), tup.end()));
  }
  std::vector<int> diag{1, 1, 2};
  CHECK(k.at(diag) == 0.0);
}

TEST_CASE("covariance matches the Rademacher average") {
  Kernel f = family(Family::DisjointPairs, 4, 2);
  Kernel g = family(Family::Concentrated, 4, 2);
  Number c = covariance(f, g);
  CHECK(c.str() == "1/2*sqrt(2)");
  CHECK(rademacher_covariance(f, g) == doctest::Approx(c.approx).epsilon(1e-14));
  CHECK(covariance(f, f).str() == "1");
  Kernel r1 = family(Family::RandomDense, 6, 2, 1);
  Kernel r2 = family(Family::RandomDense, 6, 2, 2);
  CHECK(covariance(r1, r1).approx == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(covariance(r1, r2).approx == doctest::Approx(rademacher_covariance(r1, r2)).epsilon(1e-12));
  CHECK(covariance(r1, r2).approx == doctest::Approx(covariance(r2, r1).approx).epsilon(1e-15));
  Kernel h = make_kernel(4, 2, RawExactEntries{{{2, 3}, Rational(1)}});
  Kernel l = make_kernel(4, 2, RawExactEntries{{{0, 1}, Rational(1)}});
  CHECK(covariance(h, l).is_zero());
  CHECK_THROWS_AS(covariance(f, family(Family::DisjointPairs, 6, 2)), Error);
}

TEST_CASE("covariance Gram matrices are positive semidefinite") {
  std::vector<Kernel> ks;
  for (std::uint64_t s = 1; s <= 5; ++s) ks.push_back(family(Family::RandomDense, 6, 2, s));
  ks.push_back(family(Family::Constant, 6, 2));
  ks.push_back(family(Family::DisjointPairs, 6, 2));
  const std::size_t m = ks.size();
  std::vector<double> g(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) g[i * m + j] = covariance(ks[i], ks[j]).approx;
  // In-place Cholesky with a small tolerance for rounding.
  for (std::size_t j = 0; j < m; ++j) {
    double s = g[j * m + j];
    for (std::size_t p = 0; p < j; ++p) s -= g[j * m + p] * g[j * m + p];
    REQUIRE(s > -1e-12);
    double r = std::sqrt(std::max(s, 0.0));
    g[j * m + j] = r;
    for (std::size_t i = j + 1; i < m; ++i) {
      double v = g[i * m + j];
      for (std::size_t p = 0; p < j; ++p) v -= g[i * m + p] * g[j * m + p];
      g[i * m + j] = r > 1e-14 ? v / r : 0.0;
    }
  }
}

TEST_CASE("evaluate_sum examples") {
  Kernel k = make_kernel(2, 2, RawExactEntries{{{0, 1}, Rational(1)}});
  std::vector<double> x{3.0, 5.0};
  CHECK(evaluate_sum(k, x) == doctest::Approx(15.0));
  Kernel dp = family(Family::DisjointPairs, 4, 2);
  std::vector<double> ones(4, 1.0), zeros(4, 0.0);
  CHECK(evaluate_sum(dp, ones) == doctest::Approx(std::sqrt(2.0)));
  CHECK(evaluate_sum(dp, zeros) == 0.0);
  CHECK_THROWS_AS(evaluate_sum(dp, x), Error);
}

TEST_CASE("evaluate_sum is affine in each coordinate") {
  Kernel k = family(Family::RandomDense, 5, 3, 9);
  RandomStream rng(3);
  std::vector<double> x(5);
  for (auto& v : x) v = rng.normal();
  for (int j = 0; j < 5; ++j) {
    std::vector<double> vals;
    for (double lam : {0.0, 1.0, 2.0, 3.0}) {
      auto y = x;
      y[static_cast<std::size_t>(j)] = lam;
      vals.push_back(evaluate_sum(k, y));
    }
    // Second differences of an affine function vanish.
    CHECK(vals[2] - 2 * vals[1] + vals[0] == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
    CHECK(vals[3] - 2 * vals[2] + vals[1] == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
  }
}
