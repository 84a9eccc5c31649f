#include "mpcore/bignat.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>

namespace mpcore::nat {

using u128 = unsigned __int128;

void trim(Nat& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

bool is_zero(const Nat& a) { return a.empty(); }

Nat from_u64(std::uint64_t v) {
  Nat r;
  if (v != 0) r.push_back(v);
  return r;
}

std::int64_t bit_length(const Nat& a) {
  if (a.empty()) return 0;
  return static_cast<std::int64_t>(a.size() - 1) * 64 + (64 - std::countl_zero(a.back()));
}

bool test_bit(const Nat& a, std::int64_t pos) {
  if (pos < 0) return false;
  const auto limb = static_cast<std::size_t>(pos / 64);
  if (limb >= a.size()) return false;
  return (a[limb] >> (pos % 64)) & 1u;
}

bool any_bits_below(const Nat& a, std::int64_t pos) {
  if (pos <= 0 || a.empty()) return false;
  const auto full = static_cast<std::size_t>(pos / 64);
  const std::size_t limit = std::min(full, a.size());
  for (std::size_t i = 0; i < limit; ++i) {
    if (a[i] != 0) return true;
  }
  const int rem = static_cast<int>(pos % 64);
  if (rem != 0 && full < a.size()) {
    if ((a[full] & ((Limb{1} << rem) - 1)) != 0) return true;
  }
  return false;
}

std::int64_t trailing_zeros(const Nat& a) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != 0) return static_cast<std::int64_t>(i) * 64 + std::countr_zero(a[i]);
  }
  assert(false && "trailing_zeros of zero");
  return 0;
}

int cmp(const Nat& a, const Nat& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  return 0;
}

Nat shl(const Nat& a, std::int64_t bits) {
  assert(bits >= 0);
  if (a.empty()) return a;
  const auto limbs = static_cast<std::size_t>(bits / 64);
  const int rem = static_cast<int>(bits % 64);
  Nat r(limbs + a.size() + 1, 0);
  if (rem == 0) {
    std::copy(a.begin(), a.end(), r.begin() + static_cast<std::ptrdiff_t>(limbs));
  } else {
    Limb carry = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      r[i + limbs] = (a[i] << rem) | carry;
      carry = a[i] >> (64 - rem);
    }
    r[a.size() + limbs] = carry;
  }
  trim(r);
  return r;
}

Nat shr(const Nat& a, std::int64_t bits) {
  assert(bits >= 0);
  const auto limbs = static_cast<std::size_t>(bits / 64);
  if (limbs >= a.size()) return {};
  const int rem = static_cast<int>(bits % 64);
  Nat r(a.size() - limbs, 0);
  if (rem == 0) {
    std::copy(a.begin() + static_cast<std::ptrdiff_t>(limbs), a.end(), r.begin());
  } else {
    for (std::size_t i = 0; i < r.size(); ++i) {
      Limb lo = a[i + limbs] >> rem;
      Limb hi = (i + limbs + 1 < a.size()) ? (a[i + limbs + 1] << (64 - rem)) : 0;
      r[i] = lo | hi;
    }
  }
  trim(r);
  return r;
}

Nat add(const Nat& a, const Nat& b) {
  const Nat& big = a.size() >= b.size() ? a : b;
  const Nat& small = a.size() >= b.size() ? b : a;
  Nat r(big.size() + 1, 0);
  Limb carry = 0;
  for (std::size_t i = 0; i < big.size(); ++i) {
    const u128 s = static_cast<u128>(big[i]) + (i < small.size() ? small[i] : 0) + carry;
    r[i] = static_cast<Limb>(s);
    carry = static_cast<Limb>(s >> 64);
  }
  r[big.size()] = carry;
  trim(r);
  return r;
}

Nat sub(const Nat& a, const Nat& b) {
  assert(cmp(a, b) >= 0);
  Nat r(a.size(), 0);
  Limb borrow = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Limb bi = i < b.size() ? b[i] : 0;
    const u128 d = static_cast<u128>(a[i]) - bi - borrow;
    r[i] = static_cast<Limb>(d);
    borrow = static_cast<Limb>(d >> 64) & 1u;
  }
  trim(r);
  return r;
}

void add_small(Nat& a, Limb v) {
  for (std::size_t i = 0; i < a.size() && v != 0; ++i) {
    const u128 s = static_cast<u128>(a[i]) + v;
    a[i] = static_cast<Limb>(s);
    v = static_cast<Limb>(s >> 64);
  }
  if (v != 0) a.push_back(v);
}

void sub_small(Nat& a, Limb v) {
  for (std::size_t i = 0; i < a.size() && v != 0; ++i) {
    const Limb before = a[i];
    a[i] = before - v;
    v = before < v ? 1 : 0;
  }
  assert(v == 0);
  trim(a);
}

Nat mul(const Nat& a, const Nat& b) {
  if (a.empty() || b.empty()) return {};
  Nat r(a.size() + b.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    Limb carry = 0;
    const u128 ai = a[i];
    for (std::size_t j = 0; j < b.size(); ++j) {
      const u128 t = ai * b[j] + r[i + j] + carry;
      r[i + j] = static_cast<Limb>(t);
      carry = static_cast<Limb>(t >> 64);
    }
    r[i + b.size()] = carry;
  }
  trim(r);
  return r;
}

Nat mul_small(const Nat& a, Limb v) {
  if (a.empty() || v == 0) return {};
  Nat r(a.size() + 1, 0);
  Limb carry = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const u128 t = static_cast<u128>(a[i]) * v + carry;
    r[i] = static_cast<Limb>(t);
    carry = static_cast<Limb>(t >> 64);
  }
  r[a.size()] = carry;
  trim(r);
  return r;
}

Limb divmod_small(Nat& a, Limb v) {
  assert(v != 0);
  u128 rem = 0;
  for (std::size_t i = a.size(); i-- > 0;) {
    const u128 cur = (rem << 64) | a[i];
    a[i] = static_cast<Limb>(cur / v);
    rem = cur % v;
  }
  trim(a);
  return static_cast<Limb>(rem);
}

DivResult divmod(const Nat& a, const Nat& b) {
  assert(!b.empty());
  if (cmp(a, b) < 0) return {{}, a};
  if (b.size() == 1) {
    Nat q = a;
    const Limb r = divmod_small(q, b[0]);
    return {std::move(q), from_u64(r)};
  }

  // Normalize so the divisor's top limb has its high bit set.
  const int s = std::countl_zero(b.back());
  const Nat v = shl(b, s);
  Nat u = shl(a, s);
  const std::size_t n = v.size();
  u.resize(a.size() + 1, 0);
  const std::size_t m = u.size() - n;

  Nat q(m, 0);
  const u128 base = static_cast<u128>(1) << 64;
  for (std::size_t j = m; j-- > 0;) {
    const u128 num = (static_cast<u128>(u[j + n]) << 64) | u[j + n - 1];
    u128 qhat = num / v[n - 1];
    u128 rhat = num % v[n - 1];
    while (qhat >= base ||
           qhat * v[n - 2] > ((rhat << 64) | u[j + n - 2])) {
      --qhat;
      rhat += v[n - 1];
      if (rhat >= base) break;
    }
    // u[j..j+n] -= qhat * v
    Limb borrow = 0;
    Limb carry = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const u128 p = qhat * v[i] + carry;
      carry = static_cast<Limb>(p >> 64);
      const Limb plo = static_cast<Limb>(p);
      const u128 d = static_cast<u128>(u[i + j]) - plo - borrow;
      u[i + j] = static_cast<Limb>(d);
      borrow = static_cast<Limb>(d >> 64) & 1u;
    }
    const u128 d = static_cast<u128>(u[j + n]) - carry - borrow;
    u[j + n] = static_cast<Limb>(d);
    const bool negative = (d >> 64) & 1u;
    if (negative) {
      --qhat;
      Limb c = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const u128 t = static_cast<u128>(u[i + j]) + v[i] + c;
        u[i + j] = static_cast<Limb>(t);
        c = static_cast<Limb>(t >> 64);
      }
      u[j + n] += c;
    }
    q[j] = static_cast<Limb>(qhat);
  }
  trim(q);
  u.resize(n);
  trim(u);
  return {std::move(q), shr(u, s)};
}

SqrtResult isqrt(const Nat& a) {
  if (a.empty()) return {{}, true};
  // Start from above: 2^ceil(bits/2) >= sqrt(a).
  const std::int64_t bits = bit_length(a);
  Nat x = shl(from_u64(1), (bits + 1) / 2);
  for (;;) {
    Nat y = add(x, divmod(a, x).quotient);
    y = shr(y, 1);
    if (cmp(y, x) >= 0) break;
    x = std::move(y);
  }
  const Nat sq = mul(x, x);
  return {std::move(x), cmp(sq, a) == 0};
}

Nat pow10(std::uint64_t e) {
  Nat result = from_u64(1);
  Nat base = from_u64(10);
  while (e != 0) {
    if (e & 1u) result = mul(result, base);
    e >>= 1;
    if (e != 0) base = mul(base, base);
  }
  return result;
}

std::string to_decimal(Nat a) {
  if (a.empty()) return "0";
  std::string out;
  constexpr Limb kChunk = 10000000000000000000ull;  // 10^19
  while (!a.empty()) {
    Limb r = divmod_small(a, kChunk);
    for (int i = 0; i < 19; ++i) {
      out.push_back(static_cast<char>('0' + r % 10));
      r /= 10;
      if (a.empty() && r == 0) break;
    }
  }
  while (out.size() > 1 && out.back() == '0') out.pop_back();
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace mpcore::nat
