#pragma once

// Multi-component ("double-double", "triple-double", "quad-double") scalars.
//
// A MultiComp<K> is an unevaluated sum of K binary64 components, most
// significant first. Every value produced here is canonical: each component
// is the correctly rounded binary64 value of itself plus everything below it,
// zero components only appear at the tail, and no component is -0.0. With
// that form, comparison is lexicographic and equality is bitwise.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>
#include <span>

#include "mpcore/eft.hpp"
#include "mpcore/errors.hpp"
#include "mpcore/mc_kernels.hpp"

namespace mpcore {

template <int K>
struct MultiComp {
  static_assert(K >= 2 && K <= 4, "component count must be 2, 3 or 4");
  static constexpr int kComponents = K;
  static constexpr int kBits = 53 * K;

  std::array<double, K> c{};

  constexpr double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  friend constexpr bool operator==(const MultiComp& a, const MultiComp& b) {
    return a.c == b.c;
  }
};

using DD = MultiComp<2>;
using TD = MultiComp<3>;
using QD = MultiComp<4>;

struct PrecisionTag {
  int k;
  int bits;
};

constexpr PrecisionTag precision_tag(int k) { return {k, 53 * k}; }

namespace detail {

// Largest raw expansion renormalize() is asked to handle in one go.
inline constexpr std::size_t kMaxRawTerms = 32;

// Brings an exact-sum-preserving K-term expansion to canonical form.
template <int K>
inline void canonicalize(std::array<double, K>& c) {
  canonicalize_k<K>(c);
}

template <int K>
inline void check_finite(const std::array<double, K>& c, const char* what) {
  for (double x : c) {
    if (!std::isfinite(x)) throw OverflowError(what);
  }
}

// Exact distillation of an arbitrary raw expansion followed by truncation to
// K terms. `x` is reordered in place.
template <int K>
inline std::array<double, K> renormalize_raw(double* x, std::size_t m) {
  std::array<double, K> r{};
  if (m == 0) return r;

  // Decreasing magnitude.
  for (std::size_t i = 1; i < m; ++i) {
    const double v = x[i];
    const double av = std::fabs(v);
    std::size_t j = i;
    while (j > 0 && std::fabs(x[j - 1]) < av) {
      x[j] = x[j - 1];
      --j;
    }
    x[j] = v;
  }

  // VecSum, bottom up. x[0] becomes the leading approximation and x[i] the
  // rounding error of step i.
  double s = x[m - 1];
  for (std::size_t i = m - 1; i-- > 0;) {
    const Eft t = two_sum_unchecked(x[i], s);
    s = t.value;
    x[i + 1] = t.error;
  }
  x[0] = s;

  // Error-branch accumulation into at most K outputs.
  int j = 0;
  double eps = x[0];
  bool full = false;
  for (std::size_t i = 1; i < m; ++i) {
    const Eft t = two_sum_unchecked(eps, x[i]);
    if (t.error != 0.0) {
      r[j] = t.value;
      if (j >= K - 1) {
        full = true;
        break;
      }
      ++j;
      eps = t.error;
    } else {
      eps = t.value;
    }
  }
  if (!full) r[j] = eps;

  canonicalize<K>(r);
  return r;
}

template <int K>
inline std::array<double, K> add_unchecked(const std::array<double, K>& a,
                                           const std::array<double, K>& b) {
  return add_k<K, double>(a, b);
}

template <int K>
inline std::array<double, K> mul_unchecked(const std::array<double, K>& a,
                                           const std::array<double, K>& b) {
  return mul_k<K, double>(a, b);
}

template <int K>
inline std::array<double, K> negate(const std::array<double, K>& a) {
  std::array<double, K> r;
  for (int i = 0; i < K; ++i) r[i] = -a[i] + 0.0;
  return r;
}

}  // namespace detail

// --- construction and conversion -------------------------------------------

/// (x, 0, ...). Throws OverflowError for non-finite x.
template <int K>
MultiComp<K> from_binary64(double x) {
  if (!std::isfinite(x)) throw OverflowError("from_binary64: non-finite input");
  MultiComp<K> r;
  r.c[0] = x + 0.0;
  return r;
}

template <int K>
constexpr double to_binary64(const MultiComp<K>& a) {
  return a.c[0];
}

/// Turns any finite raw expansion (m >= K terms, any order) into a canonical
/// K-component value whose sum matches the raw sum to within the last
/// component's precision.
template <int K>
MultiComp<K> renormalize(std::span<const double> raw) {
  if (raw.size() < static_cast<std::size_t>(K)) {
    throw DimensionError("renormalize: fewer raw terms than components");
  }
  if (raw.size() > detail::kMaxRawTerms) {
    throw DimensionError("renormalize: too many raw terms");
  }
  double buf[detail::kMaxRawTerms];
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!std::isfinite(raw[i])) throw OverflowError("renormalize: non-finite term");
    buf[i] = raw[i];
  }
  MultiComp<K> r{detail::renormalize_raw<K>(buf, raw.size())};
  detail::check_finite<K>(r.c, "renormalize: sum overflows");
  return r;
}

/// Checks the canonical-form invariants: every component is finite, none is
/// -0, and each one is the rounding of itself plus everything below it
/// (which also makes zeros trail).
template <int K>
bool is_normalized(const MultiComp<K>& a) {
  for (int i = 0; i < K; ++i) {
    if (!std::isfinite(a.c[i])) return false;
    if (a.c[i] == 0.0 && std::signbit(a.c[i])) return false;
  }
  for (int i = 0; i + 1 < K; ++i) {
    double hi = a.c[i];
    double lo = a.c[i + 1];
    if (detail::canon_step(hi, lo, i + 2 < K ? a.c[i + 2] : 0.0)) return false;
  }
  return true;
}

// --- arithmetic -------------------------------------------------------------

template <int K>
MultiComp<K> mc_neg(const MultiComp<K>& a) {
  return {detail::negate<K>(a.c)};
}

template <int K>
MultiComp<K> mc_abs(const MultiComp<K>& a) {
  return a.c[0] < 0.0 ? mc_neg(a) : a;
}

template <int K>
MultiComp<K> mc_add(const MultiComp<K>& a, const MultiComp<K>& b) {
  MultiComp<K> r{detail::add_unchecked<K>(a.c, b.c)};
  detail::check_finite<K>(r.c, "mc_add: overflow");
  return r;
}

template <int K>
MultiComp<K> mc_sub(const MultiComp<K>& a, const MultiComp<K>& b) {
  MultiComp<K> r{detail::add_unchecked<K>(a.c, detail::negate<K>(b.c))};
  detail::check_finite<K>(r.c, "mc_sub: overflow");
  return r;
}

template <int K>
MultiComp<K> mc_mul(const MultiComp<K>& a, const MultiComp<K>& b) {
  MultiComp<K> r{detail::mul_unchecked<K>(a.c, b.c)};
  detail::check_finite<K>(r.c, "mc_mul: overflow");
  return r;
}

/// Exact scaling by a power of two (no rounding unless the result leaves
/// the normal range).
template <int K>
MultiComp<K> mc_ldexp(const MultiComp<K>& a, int e) {
  MultiComp<K> r;
  for (int i = 0; i < K; ++i) r.c[i] = std::ldexp(a.c[i], e) + 0.0;
  detail::check_finite<K>(r.c, "mc_ldexp: overflow");
  return r;
}

/// Long division producing K+1 quotient digits, then renormalized.
template <int K>
MultiComp<K> mc_div(const MultiComp<K>& a, const MultiComp<K>& b) {
  if (b.c[0] == 0.0) throw DivideByZeroError("mc_div: division by zero");
  double q[K + 1];
  MultiComp<K> r = a;
  for (int i = 0; i <= K; ++i) {
    q[i] = r.c[0] / b.c[0];
    if (!std::isfinite(q[i])) throw OverflowError("mc_div: overflow");
    if (i < K) r = mc_sub(r, mc_mul(b, from_binary64<K>(q[i])));
  }
  MultiComp<K> out{detail::renormalize_raw<K>(q, K + 1)};
  detail::check_finite<K>(out.c, "mc_div: overflow");
  return out;
}

/// Newton iteration on x -> (x + a/x)/2 from the binary64 square root.
template <int K>
MultiComp<K> mc_sqrt(const MultiComp<K>& a) {
  if (a.c[0] < 0.0) throw DomainError("mc_sqrt: negative argument");
  if (a.c[0] == 0.0) return MultiComp<K>{};
  MultiComp<K> x = from_binary64<K>(std::sqrt(a.c[0]));
  constexpr int kSteps = K == 2 ? 2 : 3;
  for (int i = 0; i < kSteps; ++i) {
    x = mc_ldexp(mc_add(x, mc_div(a, x)), -1);
  }
  return x;
}

/// Exact comparison; lexicographic on canonical components.
template <int K>
std::strong_ordering mc_cmp(const MultiComp<K>& a, const MultiComp<K>& b) {
  for (int i = 0; i < K; ++i) {
    if (a.c[i] < b.c[i]) return std::strong_ordering::less;
    if (a.c[i] > b.c[i]) return std::strong_ordering::greater;
  }
  return std::strong_ordering::equal;
}

template <int K>
bool mc_is_zero(const MultiComp<K>& a) {
  return a.c[0] == 0.0;
}

// Operator sugar over the named operations.
template <int K>
MultiComp<K> operator+(const MultiComp<K>& a, const MultiComp<K>& b) { return mc_add(a, b); }
template <int K>
MultiComp<K> operator-(const MultiComp<K>& a, const MultiComp<K>& b) { return mc_sub(a, b); }
template <int K>
MultiComp<K> operator*(const MultiComp<K>& a, const MultiComp<K>& b) { return mc_mul(a, b); }
template <int K>
MultiComp<K> operator/(const MultiComp<K>& a, const MultiComp<K>& b) { return mc_div(a, b); }
template <int K>
MultiComp<K> operator-(const MultiComp<K>& a) { return mc_neg(a); }
template <int K>
std::strong_ordering operator<=>(const MultiComp<K>& a, const MultiComp<K>& b) {
  return mc_cmp(a, b);
}

}  // namespace mpcore
