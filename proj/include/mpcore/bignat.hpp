#pragma once

// Little-endian unsigned big integers on 64-bit limbs. This is the integer
// layer under BigFloat; values are kept trimmed (no high zero limbs).

#include <cstddef>
#include <cstdint>
#include <string>

#include <boost/container/small_vector.hpp>

namespace mpcore::nat {

using Limb = std::uint64_t;
using Nat = boost::container::small_vector<Limb, 18>;

void trim(Nat& a);
bool is_zero(const Nat& a);
Nat from_u64(std::uint64_t v);

/// Number of significant bits (0 for zero).
std::int64_t bit_length(const Nat& a);
bool test_bit(const Nat& a, std::int64_t pos);
/// True if any bit strictly below `pos` is set.
bool any_bits_below(const Nat& a, std::int64_t pos);
/// Index of the lowest set bit; a must be nonzero.
std::int64_t trailing_zeros(const Nat& a);

int cmp(const Nat& a, const Nat& b);

Nat shl(const Nat& a, std::int64_t bits);
/// Logical shift right; bits shifted out are discarded.
Nat shr(const Nat& a, std::int64_t bits);

Nat add(const Nat& a, const Nat& b);
/// a - b; requires a >= b.
Nat sub(const Nat& a, const Nat& b);
void add_small(Nat& a, Limb v);
void sub_small(Nat& a, Limb v);
Nat mul(const Nat& a, const Nat& b);
Nat mul_small(const Nat& a, Limb v);

struct DivResult {
  Nat quotient;
  Nat remainder;
};
/// Long division (Knuth algorithm D); b must be nonzero.
DivResult divmod(const Nat& a, const Nat& b);
/// Divides in place by a single limb, returns the remainder.
Limb divmod_small(Nat& a, Limb v);

struct SqrtResult {
  Nat root;
  bool exact;
};
SqrtResult isqrt(const Nat& a);

Nat pow10(std::uint64_t e);

std::string to_decimal(Nat a);

}  // namespace mpcore::nat
