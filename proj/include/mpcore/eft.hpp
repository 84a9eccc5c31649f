#pragma once

// Error-free transformations on binary64.
//
// All of these rely on round-to-nearest-even and on the compiler not
// contracting a*b+c into an fma on its own; the build passes
// -ffp-contract=off and rejects -ffast-math.

#ifdef __FAST_MATH__
#error "fast math breaks error-free transformations"
#endif

#include <cfenv>
#include <cmath>

#include "mpcore/errors.hpp"

namespace mpcore {

/// A rounded result and its exact rounding error: value + error is exact.
struct Eft {
  double value;
  double error;

  friend bool operator==(const Eft&, const Eft&) = default;
};

namespace detail {

// Unchecked kernels; these are what the multi-component arithmetic composes.

inline Eft two_sum_unchecked(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  const double e = (a - (s - bb)) + (b - bb);
  return {s, e};
}

// Requires |a| >= |b| or a == 0.
inline Eft quick_two_sum_unchecked(double a, double b) {
  const double s = a + b;
  const double e = b - (s - a);
  return {s, e};
}

inline Eft two_prod_unchecked(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

}  // namespace detail

/// s = fl(a+b), e = (a+b) - s exactly. Throws OverflowError if the sum is not
/// finite.
inline Eft two_sum(double a, double b) {
  const Eft r = detail::two_sum_unchecked(a, b);
  if (!std::isfinite(r.value) || !std::isfinite(r.error)) {
    throw OverflowError("two_sum: result not finite");
  }
  return r;
}

/// Fast variant of two_sum; valid when |a| >= |b| or a == 0. The precondition
/// is checked in debug builds and whenever MPCORE_CHECK_PRECONDITIONS is set.
inline Eft quick_two_sum(double a, double b) {
#if !defined(NDEBUG) || defined(MPCORE_CHECK_PRECONDITIONS)
  if (a != 0.0 && std::fabs(a) < std::fabs(b)) {
    throw DomainError("quick_two_sum: |a| < |b|");
  }
#endif
  const Eft r = detail::quick_two_sum_unchecked(a, b);
  if (!std::isfinite(r.value)) {
    throw OverflowError("quick_two_sum: result not finite");
  }
  return r;
}

/// p = fl(a*b), e = a*b - p exactly, via fused multiply-add. Products whose
/// error term would fall below the subnormal range are rejected.
inline Eft two_prod(double a, double b) {
  const Eft r = detail::two_prod_unchecked(a, b);
  if (!std::isfinite(r.value)) {
    throw OverflowError("two_prod: product overflows");
  }
  // e is exact only if ulp(p)/2 >= 2^-1074, i.e. |p| >= 2^-969.
  if (r.value != 0.0 && std::fabs(r.value) < 0x1p-969) {
    throw OverflowError("two_prod: product too small for an exact error term");
  }
  if (r.value == 0.0 && a != 0.0 && b != 0.0) {
    throw OverflowError("two_prod: product underflows to zero");
  }
  return r;
}

/// True when the floating-point environment rounds to nearest.
inline bool round_to_nearest_active() { return std::fegetround() == FE_TONEAREST; }

/// Throws unless the current rounding mode is round-to-nearest.
inline void ensure_round_to_nearest() {
  if (!round_to_nearest_active()) {
    throw Error(ErrorCode::kInternal,
                "rounding mode is not round-to-nearest; error-free "
                "transformations would be wrong");
  }
}

}  // namespace mpcore
