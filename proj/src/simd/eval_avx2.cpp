#include "chaoskit/simd/eval.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

namespace chaoskit::simd {

void eval_avx2(const BatchKernel& k, const double* x, std::size_t count, double* out) {
  const std::size_t d = static_cast<std::size_t>(k.d);
  std::size_t s = 0;
  for (; s + 4 <= count; s += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t t = 0; t < k.size(); ++t) {
      __m256d p = _mm256_set1_pd(k.coef[t]);
      const int* tup = k.idx.data() + t * d;
      for (std::size_t j = 0; j < d; ++j) {
        p = _mm256_mul_pd(p, _mm256_loadu_pd(x + static_cast<std::size_t>(tup[j]) * count + s));
      }
      acc = _mm256_add_pd(acc, p);
    }
    _mm256_storeu_pd(out + s, acc);
  }
  for (; s < count; ++s) {
    double acc = 0.0;
    for (std::size_t t = 0; t < k.size(); ++t) {
      double p = k.coef[t];
      const int* tup = k.idx.data() + t * d;
      for (std::size_t j = 0; j < d; ++j) p = p * x[static_cast<std::size_t>(tup[j]) * count + s];
      acc = acc + p;
    }
    out[s] = acc;
  }
}

}  // namespace chaoskit::simd

#else

namespace chaoskit::simd {

void eval_avx2(const BatchKernel& k, const double* x, std::size_t count, double* out) { eval_scalar(k, x, count, out); }

}  // namespace chaoskit::simd

#endif
