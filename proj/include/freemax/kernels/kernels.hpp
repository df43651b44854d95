#pragma once

#include <cstddef>
#include <cstdint>

// Data-parallel inner loops: pointwise CDF maps over grids, sup-norm
// reduction, and the bulk inverse-transform sampling pipeline. Each kernel
// has a scalar reference implementation and an AVX2 variant selected at
// runtime; the two produce bit-identical output (see vmath.hpp), which the
// kernel tests assert. FREEMAX_SIMD=scalar|avx2|auto overrides detection.

namespace freemax::kern {

struct Ops {
  // pointwise maps
  void (*product)(const double* a, const double* b, double* out, std::size_t n);
  void (*free_conv)(const double* a, const double* b, double* out, std::size_t n);
  void (*free_power)(const double* p, double k, double* out, std::size_t n);
  void (*lambda_vee)(const double* p, double* out, std::size_t n);
  void (*pow_int)(const double* a, long long k, double* out, std::size_t n);
  void (*root)(const double* p, double k, double* out, std::size_t n);
  void (*log_map)(const double* a, double* out, std::size_t n);
  void (*exp_map)(const double* a, double* out, std::size_t n);
  // reductions
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
  // RNG fill: values 2*b, 2*b+1 come from philox block (block0 + b)
  void (*fill_uniform)(std::uint64_t seed, std::uint64_t stream, std::uint64_t block0,
                       double* out, std::size_t n);
  // sampling transforms; nlp = -scale*log(u) feeds the family quantiles below,
  // which evaluate F^{<-1>} at log-probability -nlp.
  void (*neg_log_scaled)(const double* u, double scale, double* out, std::size_t n);
  void (*q_uniform)(const double* nlp, double lo, double width, double* out, std::size_t n);
  void (*q_gumbel)(const double* nlp, double loc, double scale, double* out, std::size_t n);
  void (*q_frechet)(const double* nlp, double alpha, double loc, double scale, double* out,
                    std::size_t n);
  void (*q_weibull)(const double* nlp, double alpha, double loc, double scale, double* out,
                    std::size_t n);
};

const Ops& ops();                // dispatched table (cached after first call)
const char* active_lane();       // "scalar" or "avx2"
bool avx2_available();           // CPU capability, ignoring the env override

namespace detail {
const Ops& scalar_ops();
const Ops& avx2_ops();           // only valid to call when avx2_available()
}  // namespace detail

}  // namespace freemax::kern
