#include "mpcore/bigfloat.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>

namespace mpcore {

namespace {

constexpr std::int64_t kExponentLimit = std::int64_t{1} << 62;
constexpr int kExact = 0;
// Decimal exponents beyond this would need integers with millions of bits.
constexpr std::int64_t kMaxDecimalExponent = 100000;

struct Parts {
  bool neg;
  const nat::Nat* m;
  std::int64_t e;
};

}  // namespace

PrecisionContext::PrecisionContext(int b) : bits(b) {
  if (b < 2) throw DomainError("precision must be at least 2 bits");
}

std::int64_t BigFloat::top_exponent() const {
  return exp_ + nat::bit_length(mant_);
}

std::int64_t BigFloat::significant_bits() const {
  if (is_zero()) return 0;
  return nat::bit_length(mant_) - nat::trailing_zeros(mant_);
}

BigFloat BigFloat::from_parts(bool neg, nat::Nat m, std::int64_t e, int bits, bool sticky) {
  nat::trim(m);
  BigFloat r;
  r.prec_ = bits > 0 ? bits : 2;
  if (m.empty()) return r;

  std::int64_t len = nat::bit_length(m);
  if (bits > 0) {
    if (sticky && len <= bits + 1) {
      // Make room so the sticky part sits strictly below the round bit.
      const std::int64_t s = bits + 2 - len;
      m = nat::shl(m, s);
      e -= s;
      len += s;
    }
    if (len > bits) {
      const std::int64_t drop = len - bits;
      const bool round_bit = nat::test_bit(m, drop - 1);
      const bool rest = sticky || nat::any_bits_below(m, drop - 1);
      m = nat::shr(m, drop);
      e += drop;
      if (round_bit && (rest || nat::test_bit(m, 0))) {
        nat::add_small(m, 1);
        if (nat::bit_length(m) > bits) {
          m = nat::shr(m, 1);
          e += 1;
        }
      }
    }
  }

  // Canonical layout: top limb's high bit set, no zero low limbs.
  const std::int64_t top_shift = (64 - nat::bit_length(m) % 64) % 64;
  if (top_shift != 0) {
    m = nat::shl(m, top_shift);
    e -= top_shift;
  }
  std::size_t zero_limbs = 0;
  while (zero_limbs < m.size() && m[zero_limbs] == 0) ++zero_limbs;
  if (zero_limbs != 0) {
    m.erase(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(zero_limbs));
    e += static_cast<std::int64_t>(zero_limbs) * 64;
  }

  const std::int64_t top = e + nat::bit_length(m);
  if (top > kExponentLimit || top < -kExponentLimit) {
    throw OverflowError("BigFloat exponent out of range");
  }
  if (bits <= 0) r.prec_ = static_cast<int>(std::max<std::int64_t>(2, nat::bit_length(m)));
  r.neg_ = neg;
  r.exp_ = e;
  r.mant_ = std::move(m);
  return r;
}

BigFloat BigFloat::from_int(std::int64_t v, int bits) {
  const bool neg = v < 0;
  const std::uint64_t mag =
      neg ? static_cast<std::uint64_t>(-(v + 1)) + 1u : static_cast<std::uint64_t>(v);
  return from_parts(neg, nat::from_u64(mag), 0, bits);
}

namespace {

BigFloat with_sign(const BigFloat& a, bool neg, int bits) {
  return BigFloat::from_parts(neg, a.mantissa(), a.exponent(), bits);
}

BigFloat add_impl(const BigFloat& a_in, const BigFloat& b_in, bool negate_b, int bits) {
  if (b_in.is_zero()) return with_sign(a_in, a_in.is_negative(), bits);
  const bool b_neg_in = b_in.is_negative() != negate_b;
  if (a_in.is_zero()) return with_sign(b_in, b_neg_in, bits);

  Parts a{a_in.is_negative(), &a_in.mantissa(), a_in.exponent()};
  Parts b{b_neg_in, &b_in.mantissa(), b_in.exponent()};
  if (a_in.top_exponent() < b_in.top_exponent()) std::swap(a, b);
  const std::int64_t a_len = nat::bit_length(*a.m);
  const std::int64_t b_top = b.e + nat::bit_length(*b.m);

  // b lies wholly below a's lowest bit and below the rounding position:
  // it only contributes a sticky bit.
  const std::int64_t gap = a.e - b_top;
  if (bits > 0 && gap > static_cast<std::int64_t>(bits) + 8) {
    const std::int64_t s = std::max<std::int64_t>(2, bits + 3 - a_len);
    nat::Nat x = nat::shl(*a.m, s);
    if (a.neg != b.neg) nat::sub_small(x, 1);
    return BigFloat::from_parts(a.neg, std::move(x), a.e - s, bits, true);
  }

  const std::int64_t emin = std::min(a.e, b.e);
  const nat::Nat x = nat::shl(*a.m, a.e - emin);
  const nat::Nat y = nat::shl(*b.m, b.e - emin);
  if (a.neg == b.neg) return BigFloat::from_parts(a.neg, nat::add(x, y), emin, bits);
  const int c = nat::cmp(x, y);
  if (c == 0) return BigFloat::from_parts(false, {}, 0, bits);
  if (c > 0) return BigFloat::from_parts(a.neg, nat::sub(x, y), emin, bits);
  return BigFloat::from_parts(b.neg, nat::sub(y, x), emin, bits);
}

BigFloat mul_impl(const BigFloat& a, const BigFloat& b, int bits) {
  if (a.is_zero() || b.is_zero()) return BigFloat::from_parts(false, {}, 0, bits);
  return BigFloat::from_parts(a.is_negative() != b.is_negative(),
                              nat::mul(a.mantissa(), b.mantissa()),
                              a.exponent() + b.exponent(), bits);
}

}  // namespace

BigFloat bf_add(const BigFloat& a, const BigFloat& b, PrecisionContext ctx) {
  return add_impl(a, b, false, ctx.bits);
}

BigFloat bf_sub(const BigFloat& a, const BigFloat& b, PrecisionContext ctx) {
  return add_impl(a, b, true, ctx.bits);
}

BigFloat bf_mul(const BigFloat& a, const BigFloat& b, PrecisionContext ctx) {
  return mul_impl(a, b, ctx.bits);
}

BigFloat bf_add_exact(const BigFloat& a, const BigFloat& b) { return add_impl(a, b, false, kExact); }
BigFloat bf_sub_exact(const BigFloat& a, const BigFloat& b) { return add_impl(a, b, true, kExact); }
BigFloat bf_mul_exact(const BigFloat& a, const BigFloat& b) { return mul_impl(a, b, kExact); }

BigFloat bf_div(const BigFloat& a, const BigFloat& b, PrecisionContext ctx) {
  if (b.is_zero()) throw DivideByZeroError("bf_div: division by zero");
  if (a.is_zero()) return BigFloat::from_parts(false, {}, 0, ctx.bits);
  const std::int64_t la = nat::bit_length(a.mantissa());
  const std::int64_t lb = nat::bit_length(b.mantissa());
  const std::int64_t s = std::max<std::int64_t>(0, ctx.bits + 2 - (la - lb));
  auto qr = nat::divmod(nat::shl(a.mantissa(), s), b.mantissa());
  return BigFloat::from_parts(a.is_negative() != b.is_negative(), std::move(qr.quotient),
                              a.exponent() - s - b.exponent(), ctx.bits,
                              !nat::is_zero(qr.remainder));
}

BigFloat bf_sqrt(const BigFloat& a, PrecisionContext ctx) {
  if (a.is_negative()) throw DomainError("bf_sqrt: negative argument");
  if (a.is_zero()) return BigFloat::from_parts(false, {}, 0, ctx.bits);
  const std::int64_t la = nat::bit_length(a.mantissa());
  std::int64_t s = std::max<std::int64_t>(0, 2 * (ctx.bits + 2) - la + 1);
  if (((a.exponent() - s) & 1) != 0) ++s;
  auto root = nat::isqrt(nat::shl(a.mantissa(), s));
  return BigFloat::from_parts(false, std::move(root.root), (a.exponent() - s) / 2, ctx.bits,
                              !root.exact);
}

BigFloat bf_round(const BigFloat& a, PrecisionContext ctx) {
  return with_sign(a, a.is_negative(), ctx.bits);
}

BigFloat bf_ldexp(const BigFloat& a, std::int64_t e) {
  if (a.is_zero()) return a;
  return BigFloat::from_parts(a.is_negative(), a.mantissa(), a.exponent() + e, a.precision());
}

std::strong_ordering bf_cmp(const BigFloat& a, const BigFloat& b) {
  const int sa = a.sign();
  const int sb = b.sign();
  if (sa != sb) return sa < sb ? std::strong_ordering::less : std::strong_ordering::greater;
  if (sa == 0) return std::strong_ordering::equal;
  // Same sign, both nonzero: compare magnitudes.
  int mag;
  const std::int64_t ta = a.top_exponent();
  const std::int64_t tb = b.top_exponent();
  if (ta != tb) {
    mag = ta < tb ? -1 : 1;
  } else {
    const std::int64_t emin = std::min(a.exponent(), b.exponent());
    mag = nat::cmp(nat::shl(a.mantissa(), a.exponent() - emin),
                   nat::shl(b.mantissa(), b.exponent() - emin));
  }
  if (sa < 0) mag = -mag;
  if (mag < 0) return std::strong_ordering::less;
  if (mag > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

BigFloat bf_abs(const BigFloat& a) { return a.is_negative() ? bf_neg(a) : a; }

BigFloat bf_neg(const BigFloat& a) { return a.negated(); }

// --- binary64 ---------------------------------------------------------------

BigFloat bf_from_binary64(double x, PrecisionContext ctx) {
  if (!std::isfinite(x)) throw OverflowError("bf_from_binary64: non-finite input");
  if (x == 0.0) return BigFloat::from_parts(false, {}, 0, ctx.bits);
  int e = 0;
  const double f = std::frexp(std::fabs(x), &e);
  const auto m = static_cast<std::uint64_t>(std::ldexp(f, 53));
  return BigFloat::from_parts(x < 0.0, nat::from_u64(m), e - 53, ctx.bits);
}

double bf_to_binary64(const BigFloat& a) {
  if (a.is_zero()) return 0.0;
  const nat::Nat& m = a.mantissa();
  const std::int64_t top = a.top_exponent();
  const std::int64_t lsb = std::max<std::int64_t>(top - 53, -1074);
  nat::Nat r;
  std::int64_t e = a.exponent();
  const std::int64_t drop = lsb - e;
  if (drop > 0) {
    const bool round_bit = nat::test_bit(m, drop - 1);
    const bool rest = nat::any_bits_below(m, drop - 1);
    r = nat::shr(m, drop);
    e += drop;
    if (round_bit && (rest || nat::test_bit(r, 0))) nat::add_small(r, 1);
  } else {
    r = m;
  }
  if (r.empty()) return a.is_negative() ? -0.0 : 0.0;
  if (e + nat::bit_length(r) > 1024) throw OverflowError("bf_to_binary64: out of range");
  // r fits in 54 bits here; shift it down into one limb if needed.
  const std::int64_t tz = nat::trailing_zeros(r);
  r = nat::shr(r, tz);
  e += tz;
  const double v = std::ldexp(static_cast<double>(r[0]), static_cast<int>(e));
  return a.is_negative() ? -v : v;
}

// --- multi-component --------------------------------------------------------

template <int K>
MultiComp<K> bf_to_multicomp(const BigFloat& a) {
  MultiComp<K> out;
  BigFloat rem = a;
  for (int i = 0; i < K; ++i) {
    const double c = bf_to_binary64(rem);
    if (!std::isfinite(c)) throw OverflowError("bf_to_multicomp: out of range");
    out.c[i] = c + 0.0;
    if (c != 0.0) rem = bf_sub_exact(rem, bf_from_binary64(c, PrecisionContext{53}));
  }
  detail::canonicalize<K>(out.c);
  return out;
}

template <int K>
BigFloat bf_from_multicomp(const MultiComp<K>& m, PrecisionContext ctx) {
  BigFloat sum;
  for (int i = 0; i < K; ++i) {
    if (m.c[i] == 0.0) continue;
    sum = bf_add_exact(sum, bf_from_binary64(m.c[i], PrecisionContext{53}));
  }
  return bf_round(sum, ctx);
}

template MultiComp<2> bf_to_multicomp<2>(const BigFloat&);
template MultiComp<3> bf_to_multicomp<3>(const BigFloat&);
template MultiComp<4> bf_to_multicomp<4>(const BigFloat&);
template BigFloat bf_from_multicomp<2>(const MultiComp<2>&, PrecisionContext);
template BigFloat bf_from_multicomp<3>(const MultiComp<3>&, PrecisionContext);
template BigFloat bf_from_multicomp<4>(const MultiComp<4>&, PrecisionContext);

// --- text -------------------------------------------------------------------

namespace {

std::string_view trim_spaces(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool take_sign(std::string_view& s) {
  bool neg = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  return neg;
}

std::int64_t parse_exponent(std::string_view s, std::string_view whole) {
  const bool neg = take_sign(s);
  if (s.empty()) throw ParseError("missing exponent digits in '" + std::string(whole) + "'");
  std::int64_t v = 0;
  for (char ch : s) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) {
      throw ParseError("bad exponent in '" + std::string(whole) + "'");
    }
    if (v < (std::int64_t{1} << 50)) v = v * 10 + (ch - '0');
  }
  return neg ? -v : v;
}

}  // namespace

BigFloat bf_parse_decimal(std::string_view text, PrecisionContext ctx) {
  const std::string_view whole = trim_spaces(text);
  std::string_view s = whole;
  const bool neg = take_sign(s);

  nat::Nat digits;
  std::int64_t frac_digits = 0;
  std::int64_t n_digits = 0;
  bool seen_point = false;
  std::uint64_t chunk = 0;
  int chunk_len = 0;
  static constexpr std::uint64_t kPow10[20] = {1ull,
                                               10ull,
                                               100ull,
                                               1000ull,
                                               10000ull,
                                               100000ull,
                                               1000000ull,
                                               10000000ull,
                                               100000000ull,
                                               1000000000ull,
                                               10000000000ull,
                                               100000000000ull,
                                               1000000000000ull,
                                               10000000000000ull,
                                               100000000000000ull,
                                               1000000000000000ull,
                                               10000000000000000ull,
                                               100000000000000000ull,
                                               1000000000000000000ull,
                                               10000000000000000000ull};
  auto flush = [&] {
    if (chunk_len == 0) return;
    digits = nat::mul_small(digits, kPow10[chunk_len]);
    nat::add_small(digits, chunk);
    chunk = 0;
    chunk_len = 0;
  };

  std::size_t i = 0;
  for (; i < s.size(); ++i) {
    const char ch = s[i];
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      chunk = chunk * 10 + static_cast<std::uint64_t>(ch - '0');
      if (++chunk_len == 19) flush();
      ++n_digits;
      if (seen_point) ++frac_digits;
    } else if (ch == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  flush();
  if (n_digits == 0) throw ParseError("no digits in '" + std::string(whole) + "'");

  std::int64_t exp10 = 0;
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') {
      throw ParseError("unexpected character in '" + std::string(whole) + "'");
    }
    exp10 = parse_exponent(s.substr(i + 1), whole);
  }
  exp10 -= frac_digits;

  if (nat::is_zero(digits)) return BigFloat::from_parts(false, {}, 0, ctx.bits);
  if (exp10 > kMaxDecimalExponent || exp10 < -kMaxDecimalExponent) {
    throw OverflowError("decimal exponent out of supported range in '" + std::string(whole) + "'");
  }
  if (exp10 >= 0) {
    return BigFloat::from_parts(neg, nat::mul(digits, nat::pow10(static_cast<std::uint64_t>(exp10))),
                                0, ctx.bits);
  }
  const nat::Nat den = nat::pow10(static_cast<std::uint64_t>(-exp10));
  const std::int64_t s_shift = std::max<std::int64_t>(
      0, ctx.bits + 2 - (nat::bit_length(digits) - nat::bit_length(den)) + 1);
  auto qr = nat::divmod(nat::shl(digits, s_shift), den);
  return BigFloat::from_parts(neg, std::move(qr.quotient), -s_shift, ctx.bits,
                              !nat::is_zero(qr.remainder));
}

BigFloat bf_parse_hex(std::string_view text, PrecisionContext ctx) {
  const std::string_view whole = trim_spaces(text);
  std::string_view s = whole;
  const bool neg = take_sign(s);
  if (s.size() < 2 || s[0] != '0' || (s[1] != 'x' && s[1] != 'X')) {
    throw ParseError("missing 0x prefix in '" + std::string(whole) + "'");
  }
  s.remove_prefix(2);

  nat::Nat m;
  std::int64_t frac_digits = 0;
  std::int64_t n_digits = 0;
  bool seen_point = false;
  std::size_t i = 0;
  for (; i < s.size(); ++i) {
    const char ch = s[i];
    int v;
    if (ch >= '0' && ch <= '9') {
      v = ch - '0';
    } else if (ch >= 'a' && ch <= 'f') {
      v = ch - 'a' + 10;
    } else if (ch >= 'A' && ch <= 'F') {
      v = ch - 'A' + 10;
    } else if (ch == '.' && !seen_point) {
      seen_point = true;
      continue;
    } else {
      break;
    }
    m = nat::shl(m, 4);
    nat::add_small(m, static_cast<nat::Limb>(v));
    ++n_digits;
    if (seen_point) ++frac_digits;
  }
  if (n_digits == 0) throw ParseError("no hex digits in '" + std::string(whole) + "'");
  std::int64_t exp2 = 0;
  if (i < s.size()) {
    if (s[i] != 'p' && s[i] != 'P') {
      throw ParseError("unexpected character in '" + std::string(whole) + "'");
    }
    exp2 = parse_exponent(s.substr(i + 1), whole);
  }
  if (exp2 > kExponentLimit / 2 || exp2 < -kExponentLimit / 2) {
    throw OverflowError("hex exponent out of range");
  }
  return BigFloat::from_parts(neg, std::move(m), exp2 - 4 * frac_digits, ctx.bits);
}

BigFloat bf_parse(std::string_view text, PrecisionContext ctx) {
  std::string_view s = trim_spaces(text);
  std::string_view rest = s;
  take_sign(rest);
  if (rest.size() >= 2 && rest[0] == '0' && (rest[1] == 'x' || rest[1] == 'X')) {
    return bf_parse_hex(s, ctx);
  }
  return bf_parse_decimal(s, ctx);
}

int decimal_digits_for(int bits) {
  return static_cast<int>(std::ceil(bits * std::log10(2.0))) + 2;
}

std::string bf_format_decimal(const BigFloat& a, int digits) {
  if (digits < 1) digits = 1;
  if (a.is_zero()) return "0";
  const nat::Nat& m = a.mantissa();
  const std::int64_t e = a.exponent();

  // log10|a| from the top limb and the binary exponent.
  const double top_frac = std::ldexp(static_cast<double>(m.back()), -64);
  std::int64_t k = static_cast<std::int64_t>(
      std::floor(std::log10(top_frac) + static_cast<double>(a.top_exponent()) * std::log10(2.0)));

  const nat::Nat lower = nat::pow10(static_cast<std::uint64_t>(digits - 1));
  const nat::Nat upper = nat::pow10(static_cast<std::uint64_t>(digits));
  nat::Nat n;
  for (int attempt = 0; attempt < 4; ++attempt) {
    const std::int64_t t = digits - 1 - k;
    nat::Nat num = nat::shl(m, std::max<std::int64_t>(e, 0));
    if (t > 0) num = nat::mul(num, nat::pow10(static_cast<std::uint64_t>(t)));
    nat::Nat den = nat::shl(nat::from_u64(1), std::max<std::int64_t>(-e, 0));
    if (t < 0) den = nat::mul(den, nat::pow10(static_cast<std::uint64_t>(-t)));
    auto qr = nat::divmod(num, den);
    n = std::move(qr.quotient);
    // Round half to even on the exact remainder.
    const int c = nat::cmp(nat::shl(qr.remainder, 1), den);
    if (c > 0 || (c == 0 && nat::test_bit(n, 0))) nat::add_small(n, 1);
    if (nat::cmp(n, upper) >= 0) {
      ++k;
      continue;
    }
    if (nat::cmp(n, lower) < 0) {
      --k;
      continue;
    }
    break;
  }

  const std::string ds = nat::to_decimal(n);
  std::string out;
  if (a.is_negative()) out.push_back('-');
  out.push_back(ds[0]);
  if (ds.size() > 1) {
    out.push_back('.');
    out.append(ds, 1, std::string::npos);
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "e%+lld", static_cast<long long>(k));
  out += buf;
  return out;
}

std::string bf_format_hex(const BigFloat& a) {
  if (a.is_zero()) return "0x0p+0";
  const nat::Nat& m = a.mantissa();
  const std::int64_t len = nat::bit_length(m);
  const std::int64_t unbiased = a.exponent() + len - 1;
  const std::int64_t tz = nat::trailing_zeros(m);
  nat::Nat frac = nat::shr(m, tz);
  const std::int64_t frac_bits = len - tz - 1;
  // Drop the leading 1 and pad the fraction to whole hex digits.
  frac = nat::sub(frac, nat::shl(nat::from_u64(1), frac_bits));
  const std::int64_t nhex = (frac_bits + 3) / 4;
  frac = nat::shl(frac, nhex * 4 - frac_bits);

  std::string out;
  if (a.is_negative()) out.push_back('-');
  out += "0x1";
  if (nhex > 0) {
    out.push_back('.');
    static constexpr char kHex[] = "0123456789abcdef";
    for (std::int64_t i = nhex - 1; i >= 0; --i) {
      int v = 0;
      for (int b = 3; b >= 0; --b) v = (v << 1) | (nat::test_bit(frac, i * 4 + b) ? 1 : 0);
      out.push_back(kHex[v]);
    }
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "p%+lld", static_cast<long long>(unbiased));
  out += buf;
  return out;
}

}  // namespace mpcore
