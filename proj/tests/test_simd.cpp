#include <cstring>

#include "doctest.h"

#include "chaoskit/kernels.hpp"
#include "chaoskit/rng.hpp"
#include "chaoskit/simd/eval.hpp"

using namespace chaoskit;

namespace {

std::vector<double> random_samples(int n, std::size_t count, std::uint64_t seed) {
  RandomStream rng(seed);
  std::vector<double> x(static_cast<std::size_t>(n) * count);
  for (auto& v : x) v = rng.normal();
  return x;
}

}  // namespace

TEST_CASE("batch evaluation matches evaluate_sum") {
  Kernel k = family(Family::RandomDense, 7, 3, 5);
  simd::BatchKernel bk(k);
  const std::size_t count = 13;
  auto x = random_samples(7, count, 1);
  std::vector<double> out(count);
  simd::eval_scalar(bk, x.data(), count, out.data());
  for (std::size_t s = 0; s < count; ++s) {
    std::vector<double> col(7);
    for (int i = 0; i < 7; ++i) col[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i) * count + s];
    CHECK(out[s] == doctest::Approx(evaluate_sum(k, col)).epsilon(1e-12));
  }
}

TEST_CASE("every available SIMD level is bit-identical to scalar") {
  std::vector<Kernel> ks{family(Family::RandomDense, 9, 2, 1), family(Family::RandomDense, 8, 3, 2),
                         family(Family::DisjointPairs, 16, 2), family(Family::Constant, 6, 4),
                         family(Family::Concentrated, 5, 2)};
  for (const auto& k : ks) {
    simd::BatchKernel bk(k);
    for (std::size_t count : {1UL, 3UL, 4UL, 5UL, 64UL, 1027UL}) {
      auto x = random_samples(k.n(), count, count);
      std::vector<double> ref(count), got(count);
      simd::eval_scalar(bk, x.data(), count, ref.data());
      for (auto level : {simd::Level::Avx2, simd::Level::Neon}) {
        if (!simd::available(level)) continue;
        std::fill(got.begin(), got.end(), -1.0);
        simd::eval_batch(bk, x.data(), count, got.data(), level);
        CHECK(std::memcmp(ref.data(), got.data(), count * sizeof(double)) == 0);
      }
      simd::eval_batch(bk, x.data(), count, got.data());
      CHECK(std::memcmp(ref.data(), got.data(), count * sizeof(double)) == 0);
    }
  }
}

TEST_CASE("level names") {
  CHECK(simd::level_name(simd::Level::Scalar) == "scalar");
  CHECK(simd::available(simd::Level::Scalar));
}
