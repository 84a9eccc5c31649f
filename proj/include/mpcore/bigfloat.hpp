#pragma once

// Arbitrary-precision binary floating point.
//
// A nonzero BigFloat is (-1)^neg * M * 2^exp where M is a multi-limb integer
// whose top limb has its high bit set and whose lowest limb is nonzero, so
// every value has exactly one representation. Arithmetic takes an explicit
// PrecisionContext and rounds to nearest-even at that many bits; nothing in
// here reads ambient state.

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "mpcore/bignat.hpp"
#include "mpcore/errors.hpp"
#include "mpcore/mcfloat.hpp"

namespace mpcore {

struct PrecisionContext {
  int bits = 424;

  explicit PrecisionContext(int b = 424);
};

inline constexpr int kDefaultLongBits = 424;

class BigFloat {
 public:
  /// Zero.
  BigFloat() = default;

  bool is_zero() const { return mant_.empty(); }
  bool is_negative() const { return neg_; }
  int sign() const { return is_zero() ? 0 : (neg_ ? -1 : 1); }
  /// Exponent of the lowest mantissa limb's bit 0.
  std::int64_t exponent() const { return exp_; }
  const nat::Nat& mantissa() const { return mant_; }
  /// Precision of the context that produced this value.
  int precision() const { return prec_; }
  /// floor(log2|x|) + 1 for nonzero x.
  std::int64_t top_exponent() const;
  /// Significant bits actually in use (position of top bit minus lowest set bit).
  std::int64_t significant_bits() const;

  /// Builds a value from sign, integer magnitude and power-of-two scale,
  /// rounded to `bits` (bits <= 0 keeps it exact).
  static BigFloat from_parts(bool neg, nat::Nat magnitude, std::int64_t exp2, int bits,
                             bool sticky = false);
  static BigFloat from_int(std::int64_t v, int bits = 64);

  BigFloat negated() const {
    BigFloat r = *this;
    if (!r.is_zero()) r.neg_ = !r.neg_;
    return r;
  }

  /// Value equality; the canonical layout makes it field equality. The
  /// producing precision is not compared.
  friend bool operator==(const BigFloat& a, const BigFloat& b) {
    return a.neg_ == b.neg_ && a.exp_ == b.exp_ && a.mant_ == b.mant_;
  }

 private:
  bool neg_ = false;
  std::int64_t exp_ = 0;
  nat::Nat mant_;
  int prec_ = 2;
};

// --- arithmetic (correctly rounded to ctx.bits, ties to even) --------------

BigFloat bf_add(const BigFloat& a, const BigFloat& b, PrecisionContext ctx);
BigFloat bf_sub(const BigFloat& a, const BigFloat& b, PrecisionContext ctx);
BigFloat bf_mul(const BigFloat& a, const BigFloat& b, PrecisionContext ctx);
BigFloat bf_div(const BigFloat& a, const BigFloat& b, PrecisionContext ctx);
BigFloat bf_sqrt(const BigFloat& a, PrecisionContext ctx);

/// Exact sum/difference/product (no rounding at all).
BigFloat bf_add_exact(const BigFloat& a, const BigFloat& b);
BigFloat bf_sub_exact(const BigFloat& a, const BigFloat& b);
BigFloat bf_mul_exact(const BigFloat& a, const BigFloat& b);

/// Rounds an existing value to ctx.bits.
BigFloat bf_round(const BigFloat& a, PrecisionContext ctx);
/// Exact multiplication by 2^e.
BigFloat bf_ldexp(const BigFloat& a, std::int64_t e);

std::strong_ordering bf_cmp(const BigFloat& a, const BigFloat& b);
BigFloat bf_abs(const BigFloat& a);
BigFloat bf_neg(const BigFloat& a);

// --- conversions ------------------------------------------------------------

/// Exact whenever ctx.bits >= 53.
BigFloat bf_from_binary64(double x, PrecisionContext ctx = PrecisionContext{53});
/// Round to nearest-even binary64 (subnormals included). Throws OverflowError
/// if the rounded value is out of binary64 range.
double bf_to_binary64(const BigFloat& a);

/// Greedy split: c[0] = fl(a), c[i] = fl(a - c[0] - ... - c[i-1]), then
/// brought to canonical form.
template <int K>
MultiComp<K> bf_to_multicomp(const BigFloat& a);

/// Sum of the components rounded to ctx.bits (exact when ctx.bits is large
/// enough for the span of the components).
template <int K>
BigFloat bf_from_multicomp(const MultiComp<K>& m, PrecisionContext ctx);

// --- text -------------------------------------------------------------------

/// Decimal ("-12.5e-3") or hex-float ("-0x1.8p+3") text, correctly rounded.
BigFloat bf_parse(std::string_view text, PrecisionContext ctx);
/// Decimal text only.
BigFloat bf_parse_decimal(std::string_view text, PrecisionContext ctx);
/// Hex-float text only.
BigFloat bf_parse_hex(std::string_view text, PrecisionContext ctx);

/// `digits` significant decimal digits, rounded to nearest, as d.ddd...e+XX.
std::string bf_format_decimal(const BigFloat& a, int digits);
/// Exact hex-float text, e.g. "-0x1.8p+3"; zero is "0x0p+0".
std::string bf_format_hex(const BigFloat& a);

/// Digits needed so that decimal text identifies a `bits`-bit value.
int decimal_digits_for(int bits);

}  // namespace mpcore
