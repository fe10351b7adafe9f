#include "chaoskit/simd/eval.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace chaoskit::simd {

void eval_neon(const BatchKernel& k, const double* x, std::size_t count, double* out) {
  const std::size_t d = static_cast<std::size_t>(k.d);
  std::size_t s = 0;
  for (; s + 2 <= count; s += 2) {
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::size_t t = 0; t < k.size(); ++t) {
      float64x2_t p = vdupq_n_f64(k.coef[t]);
      const int* tup = k.idx.data() + t * d;
      for (std::size_t j = 0; j < d; ++j) {
        p = vmulq_f64(p, vld1q_f64(x + static_cast<std::size_t>(tup[j]) * count + s));
      }
      acc = vaddq_f64(acc, p);
    }
    vst1q_f64(out + s, acc);
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

void eval_neon(const BatchKernel& k, const double* x, std::size_t count, double* out) { eval_scalar(k, x, count, out); }

}  // namespace chaoskit::simd

#endif
