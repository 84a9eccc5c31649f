#pragma once

// Multi-component kernels written once over an element type T, which is
// either double (one element) or LaneVec (kLaneVecWidth independent
// elements, one per vector lane). Nothing here branches on element data
// except to skip work that is a no-op for every lane, so each lane of a
// LaneVec call performs exactly the operations of the double call on that
// element and the two agree bitwise.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>

#if defined(__AVX512F__)
#include <immintrin.h>
#endif

#if !defined(__GNUC__)
#error "mpcore kernels rely on GCC/Clang vector extensions"
#endif

namespace mpcore::detail {

inline constexpr int kLaneVecWidth = 8;
typedef double LaneVec __attribute__((vector_size(8 * kLaneVecWidth)));
typedef std::uint64_t LaneBits __attribute__((vector_size(8 * kLaneVecWidth)));

inline constexpr std::uint64_t kSignBit = 0x8000000000000000ULL;
inline constexpr std::uint64_t kExpBits = 0x7ff0000000000000ULL;
inline constexpr std::uint64_t kManBits = 0x000fffffffffffffULL;

// --- per-type primitives ----------------------------------------------------

inline std::uint64_t to_bits(double x) { return std::bit_cast<std::uint64_t>(x); }
inline LaneBits to_bits(LaneVec x) { return std::bit_cast<LaneBits>(x); }
inline double from_bits(std::uint64_t b) { return std::bit_cast<double>(b); }
inline LaneVec from_bits(LaneBits b) { return std::bit_cast<LaneVec>(b); }

inline double vabs(double x) { return std::fabs(x); }
inline LaneVec vabs(LaneVec x) { return from_bits(to_bits(x) & ~kSignBit); }

inline double vfma(double a, double b, double c) { return std::fma(a, b, c); }
inline LaneVec vfma(LaneVec a, LaneVec b, LaneVec c) {
  LaneVec r;
  for (int i = 0; i < kLaneVecWidth; ++i) r[i] = __builtin_fma(a[i], b[i], c[i]);
  return r;
}

// Masks are bool/int for double and lane-wise all-ones/zero for LaneVec.
inline bool any(bool m) { return m; }
inline bool any(int m) { return m != 0; }
template <typename M>
  requires(sizeof(M) == sizeof(LaneVec))
inline bool any(M m) {
#if defined(__AVX512F__)
  const __m512i v = reinterpret_cast<__m512i>(m);
  return _mm512_test_epi64_mask(v, v) != 0;
#endif
  bool r = false;
  for (int i = 0; i < kLaneVecWidth; ++i) r |= m[i] != 0;
  return r;
}

template <typename M, typename T>
inline T sel(M m, T a, T b) {
  return m ? a : b;
}

template <typename T>
inline T splat(double x) {
  return T{} + x;
}

// --- error-free transformations ---------------------------------------------

template <typename T>
inline void two_sum_k(T a, T b, T& s, T& e) {
  s = a + b;
  const T bb = s - a;
  e = (a - (s - bb)) + (b - bb);
}

// Requires |a| >= |b| or a == 0.
template <typename T>
inline void quick_two_sum_k(T a, T b, T& s, T& e) {
  s = a + b;
  e = b - (s - a);
}

template <typename T>
inline void two_prod_k(T a, T b, T& p, T& e) {
  p = a * b;
  e = vfma(a, b, -p);
}

// Larger magnitude first; equal magnitudes keep their order.
template <typename T>
inline void order_pair(T& a, T& b) {
  const auto swap = vabs(a) < vabs(b);
  const T hi = sel(swap, b, a);
  const T lo = sel(swap, a, b);
  a = hi;
  b = lo;
}

// --- canonical form ---------------------------------------------------------

// Cheap filter for pushed_tie: lo and below are nonzero with equal signs and
// lo is a power of two or subnormal (a normal half-ulp has no mantissa bits).
template <typename T>
inline auto tie_candidate(T lo, T below) {
  const auto lb = to_bits(lo);
  const auto bb = to_bits(below);
  return ((lb << 1) != 0) & ((bb << 1) != 0) & (((lb ^ bb) & kSignBit) == 0) &
         (((lb & kExpBits) == 0) | ((lb & kManBits) == 0));
}

// hi + lo sits exactly halfway between hi and its neighbour in the direction
// of lo (hi is the rounded sum, so round-to-even picked hi).
template <typename T>
inline auto is_midpoint(T hi, T lo) {
  const auto hb = to_bits(hi);
  const auto lb = to_bits(lo);
  const auto mag = hb & ~kSignBit;
  const auto from_zero = mag == 0;
  const auto away = from_zero | (((hb ^ lb) & kSignBit) == 0);
  const auto sign = sel(from_zero, lb & kSignBit, hb & kSignBit);
  const auto next_mag = sel(away, mag + 1, mag - 1);
  const T next = from_bits(sign | next_mag);
  return (next - hi) == lo * 2.0;
}

// One canonicalizing step on (hi, lo) given the next component below: hi
// becomes the rounding of hi + lo + below, lo the exact remainder. Pairwise
// rounding gets this right except when hi + lo is a midpoint and below
// pushes past it. Returns the lanes that changed.
template <typename T>
inline auto canon_step(T& hi, T& lo, T below) {
  T s, e;
  two_sum_k(hi, lo, s, e);
  const auto cand = tie_candidate(e, below);
  if (any(cand)) {
    const auto tie = cand & is_midpoint(s, e);
    s = sel(tie, s + e * 2.0, s);
    e = sel(tie, -e, e);
  }
  const auto changed = (s != hi) | (e != lo);
  hi = s;
  lo = e;
  return changed;
}

// Brings an exact-sum-preserving K-term expansion to canonical form: every
// component is the rounding of itself plus everything below, zeros trail,
// no -0. Sweeps until nothing moves; lanes already at the fixed point are
// left as they are by further sweeps.
template <int K, typename T>
inline void canonicalize_k(std::array<T, K>& c) {
  for (int pass = 0; pass < 4 * K; ++pass) {
    auto changed = canon_step(c[0], c[1], K > 2 ? c[2 % K] : T{});
    for (int i = 1; i + 1 < K; ++i) {
      changed = changed | canon_step(c[i], c[i + 1], i + 2 < K ? c[(i + 2) % K] : T{});
    }
    if (!any(changed)) break;
  }
  for (auto& x : c) x = x + 0.0;  // -0 + +0 == +0, everything else unchanged
}

// Exact distillation of M magnitude-sorted terms, truncated to K outputs:
// VecSum bottom up, then error-branch accumulation that skips zero errors.
template <int K, int M, typename T>
inline std::array<T, K> distill_k(std::array<T, M>& x) {
  T s = x[M - 1];
  for (int i = M - 1; i-- > 0;) {
    T e;
    two_sum_k(x[i], s, s, e);
    x[i + 1] = e;
  }
  x[0] = s;

  std::array<T, K> r{};
  T slot{};  // index of the output being accumulated
  T eps = x[0];
  for (int i = 1; i < M; ++i) {
    T v, e;
    two_sum_k(eps, x[i], v, e);
    for (int k = 0; k < K; ++k) r[k] = sel(slot == static_cast<double>(k), v, r[k]);
    const auto nonzero = e != 0.0;
    eps = sel(nonzero, e, v);
    slot = slot + sel(nonzero, splat<T>(1.0), T{});
  }
  for (int k = 0; k < K; ++k) r[k] = sel(slot == static_cast<double>(k), eps, r[k]);
  canonicalize_k<K>(r);
  return r;
}

// --- arithmetic kernels -----------------------------------------------------

// Two components: accurate pairwise sum and a three-product multiply. The
// trailing quick_two_sum leaves hi == fl(hi + lo), which for two components
// is the whole canonical condition.
template <typename T>
inline std::array<T, 2> dd_add_k(const std::array<T, 2>& x, const std::array<T, 2>& y) {
  T sh, se, th, te, vh, ve, zh, ze;
  two_sum_k(x[0], y[0], sh, se);
  two_sum_k(x[1], y[1], th, te);
  quick_two_sum_k(sh, se + th, vh, ve);
  quick_two_sum_k(vh, te + ve, zh, ze);
  return {zh + 0.0, ze + 0.0};
}

template <typename T>
inline std::array<T, 2> dd_mul_k(const std::array<T, 2>& x, const std::array<T, 2>& y) {
  T ph, pe, zh, ze;
  two_prod_k(x[0], y[0], ph, pe);
  const T t0 = x[1] * y[1];
  const T t1 = vfma(x[0], y[1], t0);
  const T t2 = vfma(x[1], y[0], t1);
  quick_two_sum_k(ph, pe + t2, zh, ze);
  return {zh + 0.0, ze + 0.0};
}

template <int K, typename T>
inline std::array<T, K> add_k(const std::array<T, K>& a, const std::array<T, K>& b) {
  if constexpr (K == 2) {
    return dd_add_k(a, b);
  } else {
    // a, then b reversed, zero padded to 8: a bitonic sequence in magnitude.
    std::array<T, 8> x{};
    for (int i = 0; i < K; ++i) {
      x[i] = a[i];
      x[7 - i] = b[i];
    }
    order_pair(x[0], x[4]);
    order_pair(x[1], x[5]);
    order_pair(x[2], x[6]);
    order_pair(x[3], x[7]);
    order_pair(x[0], x[2]);
    order_pair(x[1], x[3]);
    order_pair(x[4], x[6]);
    order_pair(x[5], x[7]);
    order_pair(x[0], x[1]);
    order_pair(x[2], x[3]);
    order_pair(x[4], x[5]);
    order_pair(x[6], x[7]);
    std::array<T, 2 * K> m;
    for (int i = 0; i < 2 * K; ++i) m[i] = x[i];  // the padding zeros sorted last
    return distill_k<K, 2 * K>(m);
  }
}

// Sorts x[1..M-1] by decreasing magnitude with a fixed comparator network.
template <int M, typename T>
inline void sort_tail(std::array<T, M>& x) {
  for (int i = 2; i < M; ++i) {
    for (int j = i; j > 1; --j) order_pair(x[j - 1], x[j]);
  }
}

// Products are grouped by order (sum of component indices). Orders whose
// exact value matters are kept as two_prod pairs; the rest only has to reach
// the last component's precision and is summed plainly into one term. A
// product of canonical values has no cancellation at the top, so a0*b0
// dominates and goes first.
template <int K, typename T>
inline std::array<T, K> mul_k(const std::array<T, K>& a, const std::array<T, K>& b) {
  if constexpr (K == 2) {
    return dd_mul_k(a, b);
  } else if constexpr (K == 3) {
    T p00, e00, p01, e01, p10, e10;
    two_prod_k(a[0], b[0], p00, e00);
    two_prod_k(a[0], b[1], p01, e01);
    two_prod_k(a[1], b[0], p10, e10);
    const T tail = ((a[1] * b[2] + a[2] * b[1]) + (a[0] * b[2] + a[1] * b[1] + a[2] * b[0])) +
                   (e01 + e10);
    std::array<T, 5> x{p00, p01, p10, e00, tail};
    sort_tail<5>(x);
    return distill_k<3, 5>(x);
  } else {
    T p00, e00, p01, e01, p10, e10, p02, e02, p11, e11, p20, e20;
    two_prod_k(a[0], b[0], p00, e00);
    two_prod_k(a[0], b[1], p01, e01);
    two_prod_k(a[1], b[0], p10, e10);
    two_prod_k(a[0], b[2], p02, e02);
    two_prod_k(a[1], b[1], p11, e11);
    two_prod_k(a[2], b[0], p20, e20);
    const T order4 = a[1] * b[3] + a[2] * b[2] + a[3] * b[1];
    const T order3 = a[0] * b[3] + a[1] * b[2] + a[2] * b[1] + a[3] * b[0];
    const T tail = (order4 + (e02 + e11 + e20)) + order3;
    std::array<T, 10> x{p00, p01, p10, e00, p02, p11, p20, e01, e10, tail};
    sort_tail<10>(x);
    return distill_k<4, 10>(x);
  }
}

}  // namespace mpcore::detail
