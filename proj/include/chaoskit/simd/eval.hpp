#pragma once

// Batched evaluation of Q_x(f) over many sample vectors at once.
//
// Samples are stored index-major: x[i * count + s] is coordinate i of
// sample s. Every variant performs the same multiplications and additions
// in the same order per sample, so results are bit-identical across ISAs.

#include <cstddef>
#include <string_view>
#include <vector>

#include "chaoskit/kernels.hpp"

namespace chaoskit::simd {

enum class Level { Scalar, Avx2, Neon };

/// Flattened kernel: tuple t uses idx[t*d .. t*d+d-1] and coefficient
/// coef[t] = d! * value(t).
struct BatchKernel {
  int d = 0;
  std::vector<int> idx;
  std::vector<double> coef;

  explicit BatchKernel(const Kernel& k);
  std::size_t size() const { return coef.size(); }
};

void eval_scalar(const BatchKernel& k, const double* x, std::size_t count, double* out);
void eval_avx2(const BatchKernel& k, const double* x, std::size_t count, double* out);
void eval_neon(const BatchKernel& k, const double* x, std::size_t count, double* out);

bool available(Level level);
/// Best level supported by the running CPU, unless CHAOSKIT_SIMD
/// (scalar | avx2 | neon) asks for an available one.
Level active_level();
std::string_view level_name(Level level);

void eval_batch(const BatchKernel& k, const double* x, std::size_t count, double* out, Level level);
inline void eval_batch(const BatchKernel& k, const double* x, std::size_t count, double* out) {
  eval_batch(k, x, count, out, active_level());
}

}  // namespace chaoskit::simd
