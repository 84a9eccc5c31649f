#pragma once

// Batch kernels over contiguous MultiComp arrays.
//
// Each kernel has two paths. The scalar path calls the per-element mcfloat
// operation in a plain loop. The lane path copies blocks into a
// component-planar working layout so the compiler can run several elements
// per vector register, then applies the very same per-element operation
// sequence. Results are bitwise identical between the two paths; only
// throughput differs.

#include <cstddef>
#include <span>

#include "mpcore/mcfloat.hpp"

namespace mpcore {

enum class LaneMode { kScalar, kLanes };

/// Elements processed per lane block.
inline constexpr std::size_t kLaneWidth = 8;

/// `requested`, unless MPCORE_SIMD=off is set in the environment, which
/// forces the scalar path.
LaneMode effective_lane_mode(LaneMode requested);

/// Lane mode used when a caller does not pick one: kLanes unless the
/// environment turns it off. Read once per process.
LaneMode default_lane_mode();

const char* lane_mode_name(LaneMode mode);

/// y[i] = y[i] + alpha * x[i].
template <int K>
void axpy_batch(const MultiComp<K>& alpha, std::span<const MultiComp<K>> x,
                std::span<MultiComp<K>> y, LaneMode mode);

/// out[i] = x[i] * y[i]. `out` may alias `x` or `y`.
template <int K>
void elementwise_mul_batch(std::span<const MultiComp<K>> x, std::span<const MultiComp<K>> y,
                           std::span<MultiComp<K>> out, LaneMode mode);

/// out[i] = x[i] + y[i]. `out` may alias `x` or `y`.
template <int K>
void elementwise_add_batch(std::span<const MultiComp<K>> x, std::span<const MultiComp<K>> y,
                           std::span<MultiComp<K>> out, LaneMode mode);

#define MPCORE_DECLARE_LANES(K)                                                              \
  extern template void axpy_batch<K>(const MultiComp<K>&, std::span<const MultiComp<K>>,     \
                                     std::span<MultiComp<K>>, LaneMode);                     \
  extern template void elementwise_mul_batch<K>(std::span<const MultiComp<K>>,               \
                                                std::span<const MultiComp<K>>,               \
                                                std::span<MultiComp<K>>, LaneMode);          \
  extern template void elementwise_add_batch<K>(std::span<const MultiComp<K>>,               \
                                                std::span<const MultiComp<K>>,               \
                                                std::span<MultiComp<K>>, LaneMode);
MPCORE_DECLARE_LANES(2)
MPCORE_DECLARE_LANES(3)
MPCORE_DECLARE_LANES(4)
#undef MPCORE_DECLARE_LANES

}  // namespace mpcore
