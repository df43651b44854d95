#include <cstdlib>
#include <stdexcept>
#include <string>

#include "freemax/kernels/kernels.hpp"

namespace freemax::kern {

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const Ops* resolve() {
  const char* env = std::getenv("FREEMAX_SIMD");
  const std::string mode = env ? env : "auto";
  if (mode == "scalar") return &detail::scalar_ops();
  if (mode == "avx2") {
    if (!avx2_available())
      throw std::runtime_error("FREEMAX_SIMD=avx2 requested but CPU lacks AVX2/FMA");
    return &detail::avx2_ops();
  }
  if (mode != "auto" && mode != "")
    throw std::runtime_error("FREEMAX_SIMD must be auto, scalar or avx2");
  return avx2_available() ? &detail::avx2_ops() : &detail::scalar_ops();
}

}  // namespace

const Ops& ops() {
  static const Ops* table = resolve();
  return *table;
}

const char* active_lane() {
  return &ops() == &detail::scalar_ops() ? "scalar" : "avx2";
}

}  // namespace freemax::kern
