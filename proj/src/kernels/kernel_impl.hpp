#pragma once

#include <cstddef>
#include <cstdint>

#include "freemax/kernels/philox.hpp"
#include "freemax/kernels/vmath.hpp"

// Lane-templated kernel bodies shared by the scalar and AVX2 translation
// units. Wide lanes fall through to the scalar lane for the ragged tail;
// per-element results are identical either way because each op is a single
// lane-generic function instantiated for both.

namespace freemax::kern::impl {

using vm::ScalarLane;

struct ProductOp {
  template <class L>
  static typename L::f64 apply(typename L::f64 x, typename L::f64 y) {
    return L::mul(x, y);
  }
};

struct FreeConvOp {
  template <class L>
  static typename L::f64 apply(typename L::f64 x, typename L::f64 y) {
    return L::max(L::set(0.0), L::sub(L::add(x, y), L::set(1.0)));
  }
};

struct FreePowerOp {  // (k*p - k + 1)^+
  template <class L>
  static typename L::f64 apply(typename L::f64 x, double k) {
    return L::max(L::set(0.0), L::add(L::mul(L::set(k), x), L::set(1.0 - k)));
  }
};

struct LambdaVeeOp {  // p <= 0 maps straight to 0, no -inf intermediate
  template <class L>
  static typename L::f64 apply(typename L::f64 x) {
    const auto zero = L::set(0.0);
    const auto dead = L::le(x, zero);
    const auto safe = L::blend(x, L::set(1.0), dead);
    const auto v = L::max(zero, L::add(L::set(1.0), vm::vlog<L>(safe)));
    return L::blend(v, zero, dead);
  }
};

struct PowIntOp {
  template <class L>
  static typename L::f64 apply(typename L::f64 x, long long k) {
    return vm::vpow_int<L>(x, k);
  }
};

struct RootOp {  // p^(1/k)
  template <class L>
  static typename L::f64 apply(typename L::f64 x, double k) {
    return vm::vexp<L>(L::div(vm::vlog<L>(x), L::set(k)));
  }
};

struct LogOp {
  template <class L>
  static typename L::f64 apply(typename L::f64 x) {
    return vm::vlog<L>(x);
  }
};

struct ExpOp {
  template <class L>
  static typename L::f64 apply(typename L::f64 x) {
    return vm::vexp<L>(x);
  }
};

struct NegLogScaledOp {  // -scale*log(u)
  template <class L>
  static typename L::f64 apply(typename L::f64 x, double scale) {
    return L::mul(L::set(-scale), vm::vlog<L>(x));
  }
};

// Family quantiles at log-probability -nlp.
struct QUniformOp {  // lo + width*exp(-nlp)
  template <class L>
  static typename L::f64 apply(typename L::f64 x, double lo, double width) {
    return L::add(L::set(lo), L::mul(L::set(width), vm::vexp<L>(L::sub(L::set(0.0), x))));
  }
};

struct QGumbelOp {  // loc - scale*log(nlp)
  template <class L>
  static typename L::f64 apply(typename L::f64 x, double loc, double scale) {
    return L::sub(L::set(loc), L::mul(L::set(scale), vm::vlog<L>(x)));
  }
};

struct QFrechetOp {  // loc + scale*nlp^(-1/alpha)
  template <class L>
  static typename L::f64 apply(typename L::f64 x, double alpha, double loc, double scale) {
    const auto p = vm::vexp<L>(L::div(vm::vlog<L>(x), L::set(-alpha)));
    return L::add(L::set(loc), L::mul(L::set(scale), p));
  }
};

struct QWeibullOp {  // loc - scale*nlp^(1/alpha)
  template <class L>
  static typename L::f64 apply(typename L::f64 x, double alpha, double loc, double scale) {
    const auto p = vm::vexp<L>(L::div(vm::vlog<L>(x), L::set(alpha)));
    return L::sub(L::set(loc), L::mul(L::set(scale), p));
  }
};

template <class L, class Op, class... P>
inline void map1(const double* a, double* out, std::size_t n, P... params) {
  std::size_t i = 0;
  for (; i + L::width <= n; i += L::width)
    L::store(out + i, Op::template apply<L>(L::load(a + i), params...));
  if constexpr (L::width > 1) {
    for (; i < n; ++i)
      ScalarLane::store(out + i, Op::template apply<ScalarLane>(a[i], params...));
  }
}

template <class L, class Op>
inline void map2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + L::width <= n; i += L::width)
    L::store(out + i, Op::template apply<L>(L::load(a + i), L::load(b + i)));
  if constexpr (L::width > 1) {
    for (; i < n; ++i)
      ScalarLane::store(out + i, Op::template apply<ScalarLane>(a[i], b[i]));
  }
}

template <class L>
struct Body {
  static void product(const double* a, const double* b, double* out, std::size_t n) {
    map2<L, ProductOp>(a, b, out, n);
  }
  static void free_conv(const double* a, const double* b, double* out, std::size_t n) {
    map2<L, FreeConvOp>(a, b, out, n);
  }
  static void free_power(const double* p, double k, double* out, std::size_t n) {
    map1<L, FreePowerOp>(p, out, n, k);
  }
  static void lambda_vee(const double* p, double* out, std::size_t n) {
    map1<L, LambdaVeeOp>(p, out, n);
  }
  static void pow_int(const double* a, long long k, double* out, std::size_t n) {
    map1<L, PowIntOp>(a, out, n, k);
  }
  static void root(const double* p, double k, double* out, std::size_t n) {
    map1<L, RootOp>(p, out, n, k);
  }
  static void log_map(const double* a, double* out, std::size_t n) {
    map1<L, LogOp>(a, out, n);
  }
  static void exp_map(const double* a, double* out, std::size_t n) {
    map1<L, ExpOp>(a, out, n);
  }
  static void neg_log_scaled(const double* u, double scale, double* out, std::size_t n) {
    map1<L, NegLogScaledOp>(u, out, n, scale);
  }
  static void q_uniform(const double* nlp, double lo, double width, double* out,
                        std::size_t n) {
    map1<L, QUniformOp>(nlp, out, n, lo, width);
  }
  static void q_gumbel(const double* nlp, double loc, double scale, double* out,
                       std::size_t n) {
    map1<L, QGumbelOp>(nlp, out, n, loc, scale);
  }
  static void q_frechet(const double* nlp, double alpha, double loc, double scale,
                        double* out, std::size_t n) {
    map1<L, QFrechetOp>(nlp, out, n, alpha, loc, scale);
  }
  static void q_weibull(const double* nlp, double alpha, double loc, double scale,
                        double* out, std::size_t n) {
    map1<L, QWeibullOp>(nlp, out, n, alpha, loc, scale);
  }
};

inline double max_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] < b[i] ? b[i] - a[i] : a[i] - b[i];
    if (d > m) m = d;
  }
  return m;
}

inline void fill_uniform_scalar(std::uint64_t seed, std::uint64_t stream,
                                std::uint64_t block0, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const auto pair = philox_block_u64(seed, stream, block0 + (i >> 1));
    out[i] = uniform_from_bits(pair[0]);
    out[i + 1] = uniform_from_bits(pair[1]);
  }
  if (i < n) {
    const auto pair = philox_block_u64(seed, stream, block0 + (i >> 1));
    out[i] = uniform_from_bits(pair[0]);
  }
}

}  // namespace freemax::kern::impl
