#include "mpcore/lanes.hpp"

#include <array>
#include <cstdlib>
#include <cstring>
#include <type_traits>

#include "mpcore/errors.hpp"

namespace mpcore {

LaneMode effective_lane_mode(LaneMode requested) {
  const char* env = std::getenv("MPCORE_SIMD");
  if (env != nullptr && std::strcmp(env, "off") == 0) return LaneMode::kScalar;
  return requested;
}

LaneMode default_lane_mode() {
  static const LaneMode mode = effective_lane_mode(LaneMode::kLanes);
  return mode;
}

const char* lane_mode_name(LaneMode mode) {
  return mode == LaneMode::kLanes ? "on" : "off";
}

namespace {

void check_equal_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw DimensionError(std::string(what) + ": length mismatch");
}

// Component-planar block: vector c holds component c of kLaneWidth elements.
template <int K>
struct Planes {
  std::array<detail::LaneVec, K> v{};

  void load(const MultiComp<K>* p) {
    for (int c = 0; c < K; ++c) {
      v[c] = detail::LaneVec{p[0].c[c], p[1].c[c], p[2].c[c], p[3].c[c],
                             p[4].c[c], p[5].c[c], p[6].c[c], p[7].c[c]};
    }
  }
  void store(MultiComp<K>* p) const {
    for (std::size_t l = 0; l < kLaneWidth; ++l)
      for (int c = 0; c < K; ++c) p[l].c[c] = v[c][l];
  }
  bool all_finite() const {
    bool ok = true;
    for (int c = 0; c < K; ++c)
      for (std::size_t l = 0; l < kLaneWidth; ++l) ok &= std::isfinite(v[c][l]);
    return ok;
  }
};

static_assert(kLaneWidth == static_cast<std::size_t>(detail::kLaneVecWidth));

// Runs `op(x, y)` for every element. `op` is generic over the element type:
// full blocks call it once with vectors, the tail one element at a time with
// doubles, and both instantiate the same kernel code.
template <int K, typename Op>
void run_lanes(const MultiComp<K>* x, const MultiComp<K>* y, MultiComp<K>* out, std::size_t n,
               const char* what, Op op) {
  std::size_t i = 0;
  Planes<K> px, py, po;
  for (; i + kLaneWidth <= n; i += kLaneWidth) {
    px.load(x + i);
    py.load(y + i);
    po.v = op(px.v, py.v);
    if (!po.all_finite()) throw OverflowError(std::string(what) + ": overflow");
    po.store(out + i);
  }
  for (; i < n; ++i) {
    const std::array<double, K> r = op(x[i].c, y[i].c);
    detail::check_finite<K>(r, what);
    out[i].c = r;
  }
}

template <typename T, int K>
std::array<T, K> broadcast(const std::array<double, K>& a) {
  std::array<T, K> r;
  for (int c = 0; c < K; ++c) r[c] = detail::splat<T>(a[c]);
  return r;
}

}  // namespace

template <int K>
void axpy_batch(const MultiComp<K>& alpha, std::span<const MultiComp<K>> x,
                std::span<MultiComp<K>> y, LaneMode mode) {
  check_equal_lengths(x.size(), y.size(), "axpy_batch");
  if (mode == LaneMode::kScalar) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = mc_add(y[i], mc_mul(alpha, x[i]));
    return;
  }
  const std::array<double, K> a = alpha.c;
  run_lanes<K>(x.data(), y.data(), y.data(), y.size(), "axpy_batch",
               [&a](const auto& xv, const auto& yv) {
                 using T = typename std::decay_t<decltype(xv)>::value_type;
                 return detail::add_k<K, T>(yv, detail::mul_k<K, T>(broadcast<T, K>(a), xv));
               });
}

template <int K>
void elementwise_mul_batch(std::span<const MultiComp<K>> x, std::span<const MultiComp<K>> y,
                           std::span<MultiComp<K>> out, LaneMode mode) {
  check_equal_lengths(x.size(), y.size(), "elementwise_mul_batch");
  check_equal_lengths(x.size(), out.size(), "elementwise_mul_batch");
  if (mode == LaneMode::kScalar) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = mc_mul(x[i], y[i]);
    return;
  }
  run_lanes<K>(x.data(), y.data(), out.data(), out.size(), "elementwise_mul_batch",
               [](const auto& xv, const auto& yv) {
                 using T = typename std::decay_t<decltype(xv)>::value_type;
                 return detail::mul_k<K, T>(xv, yv);
               });
}

template <int K>
void elementwise_add_batch(std::span<const MultiComp<K>> x, std::span<const MultiComp<K>> y,
                           std::span<MultiComp<K>> out, LaneMode mode) {
  check_equal_lengths(x.size(), y.size(), "elementwise_add_batch");
  check_equal_lengths(x.size(), out.size(), "elementwise_add_batch");
  if (mode == LaneMode::kScalar) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = mc_add(x[i], y[i]);
    return;
  }
  run_lanes<K>(x.data(), y.data(), out.data(), out.size(), "elementwise_add_batch",
               [](const auto& xv, const auto& yv) {
                 using T = typename std::decay_t<decltype(xv)>::value_type;
                 return detail::add_k<K, T>(xv, yv);
               });
}

#define MPCORE_DEFINE_LANES(K)                                                                \
  template void axpy_batch<K>(const MultiComp<K>&, std::span<const MultiComp<K>>,             \
                              std::span<MultiComp<K>>, LaneMode);                             \
  template void elementwise_mul_batch<K>(std::span<const MultiComp<K>>,                       \
                                         std::span<const MultiComp<K>>,                       \
                                         std::span<MultiComp<K>>, LaneMode);                  \
  template void elementwise_add_batch<K>(std::span<const MultiComp<K>>,                       \
                                         std::span<const MultiComp<K>>,                       \
                                         std::span<MultiComp<K>>, LaneMode);
MPCORE_DEFINE_LANES(2)
MPCORE_DEFINE_LANES(3)
MPCORE_DEFINE_LANES(4)
#undef MPCORE_DEFINE_LANES

}  // namespace mpcore
