#include <cmath>

#include "doctest.h"
#include "oracles.hpp"

#include "chaoskit/distributions.hpp"
#include "chaoskit/error.hpp"
#include "chaoskit/partitions.hpp"
#include "chaoskit/rng.hpp"

using namespace chaoskit;

namespace {

std::vector<Surd> surds(std::initializer_list<long> v) {
  std::vector<Surd> out;
  for (long x : v) out.emplace_back(x);
  return out;
}

// Composite Simpson rule for E[X^p] under the unit-variance Laplace density.
double laplace_moment_quadrature(int p) {
  const double b = 1.0 / std::sqrt(2.0);
  const int steps = 200000;
  const double hi = 80.0 * b;
  const double h = hi / steps;
  auto f = [&](double x) { return std::pow(x, p) * std::exp(-x / b) / (2.0 * b); };
  double s = f(0.0) + f(hi);
  for (int i = 1; i < steps; ++i) s += f(i * h) * (i % 2 ? 4.0 : 2.0);
  return 2.0 * s * h / 3.0;  // symmetric density, even p
}

}  // namespace

TEST_CASE("free cumulants of the semicircle and Gaussian-start sequences") {
  auto k = moments_to_free_cumulants(surds({1, 0, 1, 0, 2, 0, 5, 0, 14}));
  for (int j = 1; j <= 8; ++j) CHECK(k[static_cast<std::size_t>(j)] == Surd(j == 2 ? 1 : 0));
  auto g = moments_to_free_cumulants(surds({1, 0, 1, 0, 3}));
  CHECK(g[2] == Surd(1));
  CHECK(g[4] == Surd(1));
}

TEST_CASE("free Poisson moments count non-crossing partitions") {
  std::vector<Surd> m;
  for (int k = 0; k <= 8; ++k) {
    long c = 0;
    oracle::for_each_set_partition(k, [&](const std::vector<int>& a) { c += oracle::labels_noncrossing(a) ? 1 : 0; });
    m.emplace_back(c);
  }
  auto kappa = moments_to_free_cumulants(m);
  for (int j = 1; j <= 8; ++j) CHECK(kappa[static_cast<std::size_t>(j)] == Surd(1));
}

TEST_CASE("cumulants to moments") {
  auto m = free_cumulants_to_moments(surds({0, 0, 1, 0, 0, 0, 0, 0, 0}));
  CHECK(m == surds({1, 0, 1, 0, 2, 0, 5, 0, 14}));
  CHECK(free_cumulants_to_moments(surds({0, 0, 0, 0})) == surds({1, 0, 0, 0}));
  std::vector<Surd> tet{Surd(0), Surd(0), Surd(1), Surd(0), Surd(Rational(1, 2))};
  CHECK(free_cumulants_to_moments(tet)[4] == Surd(Rational(5, 2)));
}

TEST_CASE("moment-cumulant transforms round-trip on random rational sequences") {
  RandomStream rng(2024);
  for (int r = 0; r < 100; ++r) {
    std::vector<Surd> m{Surd(1)};
    for (int j = 1; j <= 8; ++j) {
      long num = static_cast<long>(rng.bits() % 41) - 20;
      long den = 1 + static_cast<long>(rng.bits() % 9);
      Rational q(num, den);
      q.canonicalize();
      m.emplace_back(q);
    }
    CHECK(free_cumulants_to_moments(moments_to_free_cumulants(m)) == m);
    CHECK(classical_cumulants_to_moments(moments_to_classical_cumulants(m)) == m);
  }
}

TEST_CASE("classical cumulants of the Gaussian vanish beyond order 2") {
  auto k = moments_to_classical_cumulants(classical_law("gaussian").moments);
  for (int j = 1; j <= 8; ++j) CHECK(k[static_cast<std::size_t>(j)] == Surd(j == 2 ? 1 : 0));
}

TEST_CASE("builtin classical law table") {
  auto g = classical_law("gaussian");
  CHECK(g.moments == surds({1, 0, 1, 0, 3, 0, 15, 0, 105}));
  CHECK(chi4(g).is_zero());
  CHECK(!g.outside_theorem_class());
  auto l = classical_law("laplace");
  CHECK(l.moment(4) == Surd(6));
  CHECK(l.moment(6) == Surd(90));
  CHECK(l.moment(4).to_double() == doctest::Approx(laplace_moment_quadrature(4)).epsilon(1e-9));
  CHECK(l.moment(6).to_double() == doctest::Approx(laplace_moment_quadrature(6)).epsilon(1e-9));
  CHECK(chi4(l) == Surd(3));
  auto u = classical_law("uniform");
  CHECK(u.moment(4) == Surd(Rational(9, 5)));
  CHECK(u.outside_theorem_class());
  auto r = classical_law("rademacher");
  CHECK(r.moment(4) == Surd(1));
  CHECK(chi4(r) == Surd(-2));
  CHECK(r.outside_theorem_class());
  CHECK_THROWS_AS(g.moment(9), Error);
  CHECK(classical_law("gaussian", 12).moment(12) == Surd(10395));
  CHECK_THROWS_AS(classical_law("cauchy"), Error);
}

TEST_CASE("Hermite laws") {
  auto h1 = classical_law("hermite:1");
  CHECK(h1.moments == classical_law("gaussian").moments);
  auto h3 = classical_law("hermite:3");
  CHECK(h3.assumption1());
  CHECK(h3.moment(4) == Surd(Rational(3348, 36)));
  auto h2 = classical_law("hermite:2");
  CHECK(!h2.assumption1());
  CHECK(h2.outside_theorem_class());
  CHECK(h2.moment(3) == Surd(8) * Surd::sqrt(Rational(1, 8)));  // E[(N^2-1)^3] = 8
  CHECK_THROWS_AS(classical_law("hermite:0"), Error);
  CHECK_THROWS_AS(classical_law("hermite:x"), Error);
}

TEST_CASE("chi4 and kappa4") {
  CHECK(kappa4(free_law("qgauss:0.7")) == Surd(Rational(7, 10)));
  CHECK(kappa4(free_law("semicircular")).is_zero());
  CHECK(kappa4(free_law("tetilla")) == Surd(Rational(1, 2)));
  auto raw = classical_from_moments("raw", surds({1, 1, 2, 3, 4}));
  CHECK_THROWS_WITH_AS(chi4(raw), doctest::Contains("NotStandardized"), Error);
  auto fraw = free_from_moments("raw", surds({1, 1, 2, 3, 4}));
  CHECK_THROWS_AS(kappa4(fraw), Error);
}

TEST_CASE("Hermite and Chebyshev star counts") {
  // E[(N^2 - 1)^4] = m8 - 4 m6 + 6 m4 - 4 m2 + 1
  CHECK(hermite_moment(2, 4) == 105 - 4 * 15 + 6 * 3 - 4 * 1 + 1);
  CHECK(chebyshev_moment(2, 4) == 14 - 4 * 5 + 6 * 2 - 4 * 1 + 1);
  CHECK(hermite_moment(1, 4) == 3);
  CHECK(hermite_moment(3, 4) == 3348);
  CHECK(hermite_moment(4, 4) == 368064);
  CHECK(hermite_moment(4, 6) == Integer("61719667200"));
  CHECK(hermite_moment(1, 3) == 0);
  for (int k = 1; k <= 4; ++k) {
    CHECK(hermite_moment(k, 2) == factorial(static_cast<unsigned>(k)).get_num());
    CHECK(chebyshev_moment(k, 2) == 1);
    for (int m = 1; m <= 6; ++m) {
      CHECK(hermite_moment(k, m) == hermite_moment_by_expansion(k, m));
      CHECK(chebyshev_moment(k, m) == chebyshev_moment_by_expansion(k, m));
    }
  }
  CHECK_THROWS_AS(hermite_moment(5, 4), Error);
  CHECK_THROWS_AS(chebyshev_moment(2, 7), Error);
}

TEST_CASE("cumulant arithmetic for sums and products") {
  auto g = classical_law("gaussian");
  auto l = classical_law("laplace");
  CHECK(chi4(convolve_cumulants(g, g)).is_zero());
  CHECK(chi4(convolve_cumulants(l, g)) == Surd(Rational(3, 4)));
  CHECK(chi4(convolve_cumulants(l, l)) == Surd(Rational(6, 4)));
  // direct: E[((X1+X2)/sqrt2)^4] = (2 m4 + 6) / 4
  CHECK(convolve_cumulants(l, l).moment(4) == Surd(Rational(2 * 6 + 6, 4)));
  CHECK(multiply_kurtosis(g, g) == Surd(6));
  CHECK(multiply_kurtosis(classical_law("rademacher"), g).is_zero());
  CHECK_THROWS_AS(multiply_kurtosis(classical_law("hermite:2"), g), Error);
}

TEST_CASE("builtin free law table") {
  auto s = free_law("semicircular");
  CHECK(s.moment(4) == Surd(2));
  CHECK(s.moment(12) == Surd(132));
  CHECK(s.standardized());
  auto fp = free_law("freepoisson:1");
  for (int j = 2; j <= 12; ++j) CHECK(fp.cumulant(j) == Surd(1));
  CHECK(fp.cumulant(1).is_zero());
  CHECK(fp.moment(4) == Surd(3));
  auto fp4 = free_law("freepoisson:4");
  CHECK(kappa4(fp4) == Surd(Rational(1, 4)));
  CHECK(fp4.cumulant(3) == Surd(Rational(1, 2)));
  CHECK(free_law("qgauss:1").moments == classical_law("gaussian", 12).moments);
  CHECK(free_law("qgauss:0").moments == s.moments);
  auto t = free_law("tetilla");
  CHECK(t.moment(2) == Surd(1));
  CHECK(t.moment(4) == Surd(Rational(5, 2)));
  CHECK(t.moment(3).is_zero());
  CHECK(!t.outside_theorem_class());
  CHECK(free_law("qgauss:-0.5").outside_theorem_class());
  CHECK_THROWS_AS(s.cumulant(13), Error);
  CHECK_THROWS_AS(free_law("freepoisson:0"), Error);
  CHECK_THROWS_AS(free_law("gaussian"), Error);
}

TEST_CASE("samplers") {
  auto g = classical_law("gaussian");
  auto xs = sample(g, 1000000, 12345);
  double m4 = 0.0;
  for (double x : xs) m4 += x * x * x * x;
  m4 /= static_cast<double>(xs.size());
  CHECK(std::fabs(m4 - 3.0) <= 3.0 * std::sqrt(96.0 / 1e6));
  CHECK(sample(g, 100, 5) == sample(g, 100, 5));

  for (double x : sample(classical_law("rademacher"), 10000, 9)) CHECK((x == 1.0 || x == -1.0));

  auto ls = sample(classical_law("laplace"), 1000000, 777);
  double m3 = 0.0, m2 = 0.0;
  for (double x : ls) {
    m3 += x * x * x;
    m2 += x * x;
  }
  CHECK(std::fabs(m3 / 1e6) < 0.02);
  CHECK(std::fabs(m2 / 1e6 - 1.0) < 0.01);

  auto us = sample(classical_law("uniform"), 200000, 3);
  double u4 = 0.0;
  for (double x : us) u4 += x * x * x * x;
  CHECK(u4 / 2e5 == doctest::Approx(1.8).epsilon(0.02));

  auto hs = sample(classical_law("hermite:2"), 400000, 4);
  double h2 = 0.0;
  for (double x : hs) h2 += x * x;
  CHECK(h2 / 4e5 == doctest::Approx(1.0).epsilon(0.02));

  auto fake = classical_from_moments("custom", surds({1, 0, 1, 0, 3}));
  CHECK_THROWS_WITH_AS(sample(fake, 10, 1), doctest::Contains("NoSampler"), Error);
}
