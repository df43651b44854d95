#pragma once

#include <bit>
#include <cstdint>
#include <limits>

// Lane-generic exp/log cores (classic Sun fdlibm reductions + minimax
// polynomials, ~1 ulp). The same template instantiates the scalar reference
// lane and the AVX2 lane; every operation used here maps to one IEEE-754
// operation in both, so the two lanes agree bit for bit. No libm calls.
//
// Scalar convenience wrappers (vm::log, vm::exp, ...) are the only
// transcendental routines the rest of the library uses; this keeps grid
// kernels, pointwise evaluation and sampling on one arithmetic path.

namespace freemax::vm {

struct ScalarLane {
  using f64 = double;
  using i64 = std::int64_t;
  using msk = bool;
  static constexpr int width = 1;

  static f64 set(double c) { return c; }
  static i64 seti(std::int64_t c) { return c; }
  static f64 load(const double* p) { return *p; }
  static void store(double* p, f64 x) { *p = x; }

  static f64 add(f64 a, f64 b) { return a + b; }
  static f64 sub(f64 a, f64 b) { return a - b; }
  static f64 mul(f64 a, f64 b) { return a * b; }
  static f64 div(f64 a, f64 b) { return a / b; }
  // min/max mirror the AVX semantics: second operand wins ties/NaN.
  static f64 min(f64 a, f64 b) { return a < b ? a : b; }
  static f64 max(f64 a, f64 b) { return a > b ? a : b; }

  static msk lt(f64 a, f64 b) { return a < b; }
  static msk le(f64 a, f64 b) { return a <= b; }
  static msk gt(f64 a, f64 b) { return a > b; }
  static msk ge(f64 a, f64 b) { return a >= b; }
  static msk eq(f64 a, f64 b) { return a == b; }
  static msk unord(f64 a, f64 b) { return a != a || b != b; }
  static msk mor(msk a, msk b) { return a || b; }
  static msk mand(msk a, msk b) { return a && b; }
  static f64 blend(f64 a, f64 b, msk m) { return m ? b : a; }

  static i64 bits(f64 x) { return std::bit_cast<i64>(x); }
  static f64 from_bits(i64 x) { return std::bit_cast<f64>(x); }
  static i64 addi(i64 a, i64 b) { return a + b; }
  static i64 subi(i64 a, i64 b) { return a - b; }
  static i64 andi(i64 a, i64 b) { return a & b; }
  static i64 ori(i64 a, i64 b) { return a | b; }
  static i64 srl(i64 a, int s) {
    return static_cast<i64>(static_cast<std::uint64_t>(a) >> s);
  }
  static i64 sll(i64 a, int s) {
    return static_cast<i64>(static_cast<std::uint64_t>(a) << s);
  }
};

namespace detail {

// 2^52 + 2^51; integer round/convert magic, exact for |x| < 2^51.
inline constexpr double kMagic = 6755399441055744.0;
inline constexpr std::int64_t kMagicBits = 0x4338000000000000ll;

inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;

}  // namespace detail

// Round to nearest integer (half-even under the default FP environment).
template <class L>
inline typename L::f64 roundeven(typename L::f64 x) {
  const auto magic = L::set(detail::kMagic);
  return L::sub(L::add(x, magic), magic);
}

template <class L>
inline typename L::i64 to_i64(typename L::f64 x) {  // |x| < 2^51, integral
  return L::subi(L::bits(L::add(x, L::set(detail::kMagic))), L::seti(detail::kMagicBits));
}

template <class L>
inline typename L::f64 to_f64(typename L::i64 k) {  // |k| < 2^51
  return L::sub(L::from_bits(L::addi(k, L::seti(detail::kMagicBits))),
                L::set(detail::kMagic));
}

// Natural logarithm. log(0) = -inf, log(x<0) = NaN, log(inf) = inf.
template <class L>
inline typename L::f64 vlog(typename L::f64 x) {
  using f64 = typename L::f64;
  using msk = typename L::msk;
  const f64 zero = L::set(0.0), one = L::set(1.0), two = L::set(2.0);
  const f64 inf = L::set(std::numeric_limits<double>::infinity());

  const msk m_nan = L::mor(L::unord(x, x), L::lt(x, zero));
  const msk m_zero = L::eq(x, zero);
  const msk m_inf = L::eq(x, inf);
  const msk m_tiny = L::mand(L::gt(x, zero), L::lt(x, L::set(0x1p-1022)));

  f64 xs = L::blend(x, L::mul(x, L::set(0x1p54)), m_tiny);
  xs = L::blend(xs, one, L::mor(m_nan, L::mor(m_zero, m_inf)));

  const auto bx = L::bits(xs);
  f64 ke = to_f64<L>(L::subi(L::srl(bx, 52), L::seti(1023)));
  ke = L::blend(ke, L::sub(ke, L::set(54.0)), m_tiny);
  f64 m = L::from_bits(L::ori(L::andi(bx, L::seti(0x000FFFFFFFFFFFFFll)),
                              L::seti(0x3FF0000000000000ll)));
  const msk m_big = L::gt(m, L::set(1.4142135623730951));
  m = L::blend(m, L::mul(m, L::set(0.5)), m_big);
  ke = L::blend(ke, L::add(ke, one), m_big);

  const f64 f = L::sub(m, one);
  const f64 s = L::div(f, L::add(two, f));
  const f64 z = L::mul(s, s);
  const f64 w = L::mul(z, z);
  const f64 t1 =
      L::mul(w, L::add(L::set(3.999999999940941908e-01),
                       L::mul(w, L::add(L::set(2.222219843214978396e-01),
                                        L::mul(w, L::set(1.531383769920937332e-01))))));
  const f64 t2 = L::mul(
      z, L::add(L::set(6.666666666666735130e-01),
                L::mul(w, L::add(L::set(2.857142874366239149e-01),
                                 L::mul(w, L::add(L::set(1.818357216161805012e-01),
                                                  L::mul(w, L::set(1.479819860511658591e-01))))))));
  const f64 r_poly = L::add(t2, t1);
  const f64 hfsq = L::mul(L::set(0.5), L::mul(f, f));
  // ke*ln2_hi - ((hfsq - (s*(hfsq+R) + ke*ln2_lo)) - f)
  f64 r = L::sub(
      L::mul(ke, L::set(detail::kLn2Hi)),
      L::sub(L::sub(hfsq, L::add(L::mul(s, L::add(hfsq, r_poly)),
                                 L::mul(ke, L::set(detail::kLn2Lo)))),
             f));
  r = L::blend(r, L::set(-std::numeric_limits<double>::infinity()), m_zero);
  r = L::blend(r, inf, m_inf);
  r = L::blend(r, L::set(std::numeric_limits<double>::quiet_NaN()), m_nan);
  return r;
}

// Exponential. Overflows to inf, underflows through subnormals to 0.
template <class L>
inline typename L::f64 vexp(typename L::f64 x) {
  using f64 = typename L::f64;
  using msk = typename L::msk;
  const f64 one = L::set(1.0), two = L::set(2.0);
  const f64 inf = L::set(std::numeric_limits<double>::infinity());

  const msk m_nan = L::unord(x, x);
  const msk m_hi = L::gt(x, L::set(7.09782712893383973096e+02));
  const msk m_lo = L::lt(x, L::set(-7.45133219101941108420e+02));
  const f64 xs = L::blend(x, L::set(0.0), L::mor(m_nan, L::mor(m_hi, m_lo)));

  const f64 kd = roundeven<L>(L::mul(xs, L::set(1.44269504088896338700e+00)));
  const f64 hi = L::sub(xs, L::mul(kd, L::set(detail::kLn2Hi)));
  const f64 lo = L::mul(kd, L::set(detail::kLn2Lo));
  const f64 r = L::sub(hi, lo);
  const f64 z = L::mul(r, r);
  const f64 c = L::sub(
      r, L::mul(z, L::add(L::set(1.66666666666666019037e-01),
                          L::mul(z, L::add(L::set(-2.77777777770155933842e-03),
                                           L::mul(z, L::add(L::set(6.61375632143793436117e-05),
                                                            L::mul(z, L::add(L::set(-1.65339022054652515390e-06),
                                                                             L::mul(z, L::set(4.13813679705723846039e-08)))))))))));
  f64 y = L::sub(one, L::sub(L::sub(lo, L::div(L::mul(r, c), L::sub(two, c))), hi));

  // y * 2^k in two exact exponent steps so |k| up to ~1075 stays in range.
  const f64 kd1 = L::max(L::min(kd, L::set(1000.0)), L::set(-1000.0));
  const f64 kd2 = L::sub(kd, kd1);
  const auto e1 = L::sll(L::addi(to_i64<L>(kd1), L::seti(1023)), 52);
  const auto e2 = L::sll(L::addi(to_i64<L>(kd2), L::seti(1023)), 52);
  y = L::mul(L::mul(y, L::from_bits(e1)), L::from_bits(e2));

  y = L::blend(y, inf, m_hi);
  y = L::blend(y, L::set(0.0), m_lo);
  y = L::blend(y, L::set(std::numeric_limits<double>::quiet_NaN()), m_nan);
  return y;
}

// x^k for integer k >= 0, by binary exponentiation (exact IEEE multiplies).
template <class L>
inline typename L::f64 vpow_int(typename L::f64 x, long long k) {
  typename L::f64 acc = L::set(1.0);
  typename L::f64 base = x;
  unsigned long long e = static_cast<unsigned long long>(k);
  while (e != 0) {
    if (e & 1ull) acc = L::mul(acc, base);
    e >>= 1;
    if (e != 0) base = L::mul(base, base);
  }
  return acc;
}

inline double log(double x) { return vlog<ScalarLane>(x); }
inline double exp(double x) { return vexp<ScalarLane>(x); }
inline double pow_int(double x, long long k) { return vpow_int<ScalarLane>(x, k); }

}  // namespace freemax::vm
