#pragma once

// Scalar arithmetic policies. Generic linear algebra is written against
// these so the same elimination code runs on multi-component values (no
// state) and on BigFloat (carries its PrecisionContext).

#include <compare>

#include "mpcore/bigfloat.hpp"
#include "mpcore/mcfloat.hpp"

namespace mpcore {

template <int K>
struct McArith {
  using Scalar = MultiComp<K>;
  static constexpr bool kHasLanes = true;
  static constexpr int kComponents = K;

  Scalar zero() const { return {}; }
  Scalar one() const { return from_binary64<K>(1.0); }
  Scalar from_int(long v) const { return from_binary64<K>(static_cast<double>(v)); }
  Scalar add(const Scalar& a, const Scalar& b) const { return mc_add(a, b); }
  Scalar sub(const Scalar& a, const Scalar& b) const { return mc_sub(a, b); }
  Scalar mul(const Scalar& a, const Scalar& b) const { return mc_mul(a, b); }
  Scalar div(const Scalar& a, const Scalar& b) const { return mc_div(a, b); }
  Scalar sqrt(const Scalar& a) const { return mc_sqrt(a); }
  Scalar abs(const Scalar& a) const { return mc_abs(a); }
  Scalar neg(const Scalar& a) const { return mc_neg(a); }
  bool is_zero(const Scalar& a) const { return mc_is_zero(a); }
  std::strong_ordering cmp(const Scalar& a, const Scalar& b) const { return mc_cmp(a, b); }
  /// Working epsilon 2^-(53K).
  double epsilon() const { return std::ldexp(1.0, -53 * K); }
};

struct BfArith {
  using Scalar = BigFloat;
  static constexpr bool kHasLanes = false;

  PrecisionContext ctx{kDefaultLongBits};

  Scalar zero() const { return BigFloat::from_parts(false, {}, 0, ctx.bits); }
  Scalar one() const { return BigFloat::from_int(1, ctx.bits); }
  Scalar from_int(long v) const { return BigFloat::from_int(v, ctx.bits); }
  Scalar add(const Scalar& a, const Scalar& b) const { return bf_add(a, b, ctx); }
  Scalar sub(const Scalar& a, const Scalar& b) const { return bf_sub(a, b, ctx); }
  Scalar mul(const Scalar& a, const Scalar& b) const { return bf_mul(a, b, ctx); }
  Scalar div(const Scalar& a, const Scalar& b) const { return bf_div(a, b, ctx); }
  Scalar sqrt(const Scalar& a) const { return bf_sqrt(a, ctx); }
  Scalar abs(const Scalar& a) const { return bf_abs(a); }
  Scalar neg(const Scalar& a) const { return bf_neg(a); }
  bool is_zero(const Scalar& a) const { return a.is_zero(); }
  std::strong_ordering cmp(const Scalar& a, const Scalar& b) const { return bf_cmp(a, b); }
};

}  // namespace mpcore
