#include <immintrin.h>

#include <cstdint>

#include "freemax/kernels/kernels.hpp"
#include "kernel_impl.hpp"

// AVX2 lane. Compiled with -mavx2 -mfma in this translation unit only; the
// dispatcher guarantees these entry points run only on capable CPUs.

namespace freemax::kern::detail {

namespace {

struct Avx2Lane {
  using f64 = __m256d;
  using i64 = __m256i;
  using msk = __m256d;
  static constexpr int width = 4;

  static f64 set(double c) { return _mm256_set1_pd(c); }
  static i64 seti(std::int64_t c) { return _mm256_set1_epi64x(c); }
  static f64 load(const double* p) { return _mm256_loadu_pd(p); }
  static void store(double* p, f64 x) { _mm256_storeu_pd(p, x); }

  static f64 add(f64 a, f64 b) { return _mm256_add_pd(a, b); }
  static f64 sub(f64 a, f64 b) { return _mm256_sub_pd(a, b); }
  static f64 mul(f64 a, f64 b) { return _mm256_mul_pd(a, b); }
  static f64 div(f64 a, f64 b) { return _mm256_div_pd(a, b); }
  static f64 min(f64 a, f64 b) { return _mm256_min_pd(a, b); }
  static f64 max(f64 a, f64 b) { return _mm256_max_pd(a, b); }

  static msk lt(f64 a, f64 b) { return _mm256_cmp_pd(a, b, _CMP_LT_OQ); }
  static msk le(f64 a, f64 b) { return _mm256_cmp_pd(a, b, _CMP_LE_OQ); }
  static msk gt(f64 a, f64 b) { return _mm256_cmp_pd(a, b, _CMP_GT_OQ); }
  static msk ge(f64 a, f64 b) { return _mm256_cmp_pd(a, b, _CMP_GE_OQ); }
  static msk eq(f64 a, f64 b) { return _mm256_cmp_pd(a, b, _CMP_EQ_OQ); }
  static msk unord(f64 a, f64 b) { return _mm256_cmp_pd(a, b, _CMP_UNORD_Q); }
  static msk mor(msk a, msk b) { return _mm256_or_pd(a, b); }
  static msk mand(msk a, msk b) { return _mm256_and_pd(a, b); }
  static f64 blend(f64 a, f64 b, msk m) { return _mm256_blendv_pd(a, b, m); }

  static i64 bits(f64 x) { return _mm256_castpd_si256(x); }
  static f64 from_bits(i64 x) { return _mm256_castsi256_pd(x); }
  static i64 addi(i64 a, i64 b) { return _mm256_add_epi64(a, b); }
  static i64 subi(i64 a, i64 b) { return _mm256_sub_epi64(a, b); }
  static i64 andi(i64 a, i64 b) { return _mm256_and_si256(a, b); }
  static i64 ori(i64 a, i64 b) { return _mm256_or_si256(a, b); }
  static i64 srl(i64 a, int s) { return _mm256_srl_epi64(a, _mm_cvtsi32_si128(s)); }
  static i64 sll(i64 a, int s) { return _mm256_sll_epi64(a, _mm_cvtsi32_si128(s)); }
};

using B = impl::Body<Avx2Lane>;

double max_abs_diff_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    const __m256d d = _mm256_max_pd(_mm256_sub_pd(va, vb), _mm256_sub_pd(vb, va));
    acc = _mm256_max_pd(acc, d);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double m = lanes[0];
  for (int j = 1; j < 4; ++j)
    if (lanes[j] > m) m = lanes[j];
  for (; i < n; ++i) {
    const double d = a[i] < b[i] ? b[i] - a[i] : a[i] - b[i];
    if (d > m) m = d;
  }
  return m;
}

// Four philox blocks per iteration; output order matches the scalar fill.
void fill_uniform_avx2(std::uint64_t seed, std::uint64_t stream, std::uint64_t block0,
                       double* out, std::size_t n) {
  const __m256i mask32 = _mm256_set1_epi64x(0xFFFFFFFFll);
  const __m256i m0 = _mm256_set1_epi64x(static_cast<long long>(kPhiloxM0));
  const __m256i m1 = _mm256_set1_epi64x(static_cast<long long>(kPhiloxM1));
  const __m256i c2 = _mm256_set1_epi64x(static_cast<long long>(stream & 0xFFFFFFFFull));
  const __m256i c3 = _mm256_set1_epi64x(static_cast<long long>(stream >> 32));
  const __m256i mant_or = _mm256_set1_epi64x(0x3FF0000000000000ll);
  const __m256d mant_sub = _mm256_set1_pd(1.0 - 0x1p-53);

  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const std::uint64_t base = block0 + (i >> 1);
    const __m256i blk = _mm256_add_epi64(_mm256_set1_epi64x(static_cast<long long>(base)),
                                         _mm256_setr_epi64x(0, 1, 2, 3));
    __m256i x0 = _mm256_and_si256(blk, mask32);
    __m256i x1 = _mm256_srli_epi64(blk, 32);
    __m256i x2 = c2;
    __m256i x3 = c3;
    std::uint32_t k0 = static_cast<std::uint32_t>(seed);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
    for (int round = 0; round < 10; ++round) {
      const __m256i p0 = _mm256_mul_epu32(m0, x0);
      const __m256i p1 = _mm256_mul_epu32(m1, x2);
      const __m256i vk0 = _mm256_set1_epi64x(static_cast<long long>(k0));
      const __m256i vk1 = _mm256_set1_epi64x(static_cast<long long>(k1));
      x0 = _mm256_xor_si256(_mm256_srli_epi64(p1, 32), _mm256_xor_si256(x1, vk0));
      x1 = _mm256_and_si256(p1, mask32);
      x2 = _mm256_xor_si256(_mm256_srli_epi64(p0, 32), _mm256_xor_si256(x3, vk1));
      x3 = _mm256_and_si256(p0, mask32);
      k0 += kPhiloxW0;
      k1 += kPhiloxW1;
    }
    const __m256i wa = _mm256_or_si256(x0, _mm256_slli_epi64(x1, 32));
    const __m256i wb = _mm256_or_si256(x2, _mm256_slli_epi64(x3, 32));
    const __m256d da = _mm256_sub_pd(
        _mm256_castsi256_pd(_mm256_or_si256(_mm256_srli_epi64(wa, 12), mant_or)), mant_sub);
    const __m256d db = _mm256_sub_pd(
        _mm256_castsi256_pd(_mm256_or_si256(_mm256_srli_epi64(wb, 12), mant_or)), mant_sub);
    const __m256d lo = _mm256_unpacklo_pd(da, db);
    const __m256d hi = _mm256_unpackhi_pd(da, db);
    _mm256_storeu_pd(out + i, _mm256_permute2f128_pd(lo, hi, 0x20));
    _mm256_storeu_pd(out + i + 4, _mm256_permute2f128_pd(lo, hi, 0x31));
  }
  if (i < n) impl::fill_uniform_scalar(seed, stream, block0 + (i >> 1), out + i, n - i);
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops table = {
      B::product,       B::free_conv, B::free_power, B::lambda_vee,
      B::pow_int,       B::root,      B::log_map,    B::exp_map,
      max_abs_diff_avx2,              fill_uniform_avx2,
      B::neg_log_scaled, B::q_uniform, B::q_gumbel,  B::q_frechet,
      B::q_weibull,
  };
  return table;
}

}  // namespace freemax::kern::detail
