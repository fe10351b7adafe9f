#include "chaoskit/simd/eval.hpp"

namespace chaoskit::simd {

BatchKernel::BatchKernel(const Kernel& k) : d(k.degree()) {
  double dfact = 1.0;
  for (int j = 2; j <= d; ++j) dfact *= j;
  idx.reserve(k.size() * static_cast<std::size_t>(d));
  coef.reserve(k.size());
  for (std::size_t t = 0; t < k.size(); ++t) {
    auto tup = k.tuple(t);
    idx.insert(idx.end(), tup.begin(), tup.end());
    coef.push_back(dfact * k.value(t));
  }
}

void eval_scalar(const BatchKernel& k, const double* x, std::size_t count, double* out) {
  const std::size_t d = static_cast<std::size_t>(k.d);
  for (std::size_t s = 0; s < count; ++s) {
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
