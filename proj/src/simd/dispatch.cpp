#include <cstdlib>
#include <string>

#include "chaoskit/simd/eval.hpp"

namespace chaoskit::simd {

bool available(Level level) {
  switch (level) {
    case Level::Scalar:
      return true;
    case Level::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") != 0;
#else
      return false;
#endif
    case Level::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

namespace {

Level detect() {
  if (const char* env = std::getenv("CHAOSKIT_SIMD")) {
    std::string want(env);
    if (want == "scalar") return Level::Scalar;
    if (want == "avx2" && available(Level::Avx2)) return Level::Avx2;
    if (want == "neon" && available(Level::Neon)) return Level::Neon;
  }
  if (available(Level::Avx2)) return Level::Avx2;
  if (available(Level::Neon)) return Level::Neon;
  return Level::Scalar;
}

}  // namespace

Level active_level() {
  static const Level level = detect();
  return level;
}

std::string_view level_name(Level level) {
  switch (level) {
    case Level::Scalar: return "scalar";
    case Level::Avx2: return "avx2";
    case Level::Neon: return "neon";
  }
  return "scalar";
}

void eval_batch(const BatchKernel& k, const double* x, std::size_t count, double* out, Level level) {
  if (!available(level)) level = Level::Scalar;
  switch (level) {
    case Level::Avx2: eval_avx2(k, x, count, out); return;
    case Level::Neon: eval_neon(k, x, count, out); return;
    case Level::Scalar: break;
  }
  eval_scalar(k, x, count, out);
}

}  // namespace chaoskit::simd
