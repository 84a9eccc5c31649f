#pragma once

// Dense linear algebra generic over an arithmetic policy (see arith.hpp).
//
// Every reduction has a fixed evaluation order so results do not depend on
// blocking or on the lane path:
//   mat_vec          y_i accumulates j = 0, 1, ... starting from zero
//   mat_mul_blocked  C_ij accumulates l = 0, 1, ... starting from zero
//   norms            squares accumulate in storage order, then one sqrt

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>

#include "mpcore/arith.hpp"
#include "mpcore/lanes.hpp"
#include "mpcore/matrix.hpp"

namespace mpcore {

inline constexpr std::size_t kDefaultBlock = 64;

namespace detail {

inline void require(bool ok, const char* what) {
  if (!ok) throw DimensionError(what);
}

}  // namespace detail

/// y[i] += alpha * x[i], routed through the batch kernels for MultiComp.
template <typename Arith>
void axpy(const Arith& ar, const typename Arith::Scalar& alpha,
          std::span<const typename Arith::Scalar> x, std::span<typename Arith::Scalar> y,
          LaneMode mode) {
  if constexpr (Arith::kHasLanes) {
    axpy_batch<Arith::kComponents>(alpha, x, y, mode);
  } else {
    detail::require(x.size() == y.size(), "axpy: length mismatch");
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = ar.add(y[i], ar.mul(alpha, x[i]));
  }
}

template <typename Arith>
Vector<typename Arith::Scalar> mat_vec(const Arith& ar,
                                       const DenseMatrix<typename Arith::Scalar>& a,
                                       const Vector<typename Arith::Scalar>& x) {
  detail::require(a.cols() == x.size(), "mat_vec: A.cols != x.len");
  Vector<typename Arith::Scalar> y(a.rows(), ar.zero());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto acc = ar.zero();
    for (std::size_t j = 0; j < a.cols(); ++j) acc = ar.add(acc, ar.mul(a(i, j), x[j]));
    y[i] = std::move(acc);
  }
  return y;
}

/// Tiled product. Tiles are visited ii, ll, jj, so each C_ij still sees its
/// terms in increasing l; any block size gives the triple-loop result.
template <typename Arith>
DenseMatrix<typename Arith::Scalar> mat_mul_blocked(const Arith& ar,
                                                    const DenseMatrix<typename Arith::Scalar>& a,
                                                    const DenseMatrix<typename Arith::Scalar>& b,
                                                    std::size_t block = kDefaultBlock) {
  detail::require(a.cols() == b.rows(), "mat_mul_blocked: A.cols != B.rows");
  detail::require(block >= 1, "mat_mul_blocked: block must be >= 1");
  const std::size_t m = a.rows(), p = a.cols(), n = b.cols();
  DenseMatrix<typename Arith::Scalar> c(m, n, ar.zero());
  for (std::size_t ii = 0; ii < m; ii += block) {
    const std::size_t ie = std::min(m, ii + block);
    for (std::size_t ll = 0; ll < p; ll += block) {
      const std::size_t le = std::min(p, ll + block);
      for (std::size_t jj = 0; jj < n; jj += block) {
        const std::size_t je = std::min(n, jj + block);
        for (std::size_t i = ii; i < ie; ++i) {
          for (std::size_t l = ll; l < le; ++l) {
            const auto& ail = a(i, l);
            for (std::size_t j = jj; j < je; ++j) c(i, j) = ar.add(c(i, j), ar.mul(ail, b(l, j)));
          }
        }
      }
    }
  }
  return c;
}

/// In-place LU with partial pivoting: afterwards the strict lower triangle
/// holds L (unit diagonal implied) and the rest holds U. The pivot at step k
/// is the first row i >= k of maximal |A_ik|. Trailing rows are updated by
/// one axpy per row, so the lane path and the scalar path agree bitwise.
template <typename Arith>
PivotRecord lu_factor_pp(const Arith& ar, DenseMatrix<typename Arith::Scalar>& a,
                         LaneMode mode = LaneMode::kLanes) {
  detail::require(a.is_square(), "lu_factor_pp: matrix not square");
  detail::require(a.rows() >= 1, "lu_factor_pp: empty matrix");
  const std::size_t n = a.rows();
  PivotRecord piv;
  piv.perm.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    auto best = ar.abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      auto cand = ar.abs(a(i, k));
      if (ar.cmp(cand, best) > 0) {
        p = i;
        best = std::move(cand);
      }
    }
    if (ar.is_zero(best)) {
      throw SingularError(k, "lu_factor_pp: zero pivot at step " + std::to_string(k));
    }
    piv.perm[k] = p;
    a.swap_rows(k, p);
    const auto pivot = a(k, k);
    const auto urow = a.row(k).subspan(k + 1);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (ar.is_zero(a(i, k))) continue;
      const auto l = ar.div(a(i, k), pivot);
      a(i, k) = l;
      axpy(ar, ar.neg(l), std::span<const typename Arith::Scalar>(urow), a.row(i).subspan(k + 1),
           mode);
    }
  }
  return piv;
}

/// Solves A x = b from the output of lu_factor_pp; b is left untouched.
template <typename Arith>
Vector<typename Arith::Scalar> lu_solve(const Arith& ar,
                                        const DenseMatrix<typename Arith::Scalar>& lu,
                                        const PivotRecord& piv,
                                        const Vector<typename Arith::Scalar>& b) {
  const std::size_t n = lu.rows();
  detail::require(lu.is_square(), "lu_solve: factors not square");
  detail::require(piv.perm.size() == n, "lu_solve: pivot record length != n");
  detail::require(b.size() == n, "lu_solve: b.len != n");
  Vector<typename Arith::Scalar> x = b;
  for (std::size_t k = 0; k < n; ++k) {
    if (piv.perm[k] < k || piv.perm[k] >= n) throw DimensionError("lu_solve: bad pivot entry");
    if (piv.perm[k] != k) std::swap(x[k], x[piv.perm[k]]);
  }
  for (std::size_t i = 1; i < n; ++i) {
    auto acc = x[i];
    for (std::size_t j = 0; j < i; ++j) acc = ar.sub(acc, ar.mul(lu(i, j), x[j]));
    x[i] = std::move(acc);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    if (ar.is_zero(lu(ii, ii))) {
      throw SingularError(ii, "lu_solve: zero diagonal at " + std::to_string(ii));
    }
    auto acc = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j) acc = ar.sub(acc, ar.mul(lu(ii, j), x[j]));
    x[ii] = ar.div(acc, lu(ii, ii));
  }
  return x;
}

template <typename Arith>
typename Arith::Scalar vec_norm2(const Arith& ar, std::span<const typename Arith::Scalar> x) {
  auto acc = ar.zero();
  for (const auto& v : x) acc = ar.add(acc, ar.mul(v, v));
  return ar.sqrt(acc);
}

template <typename Arith>
typename Arith::Scalar vec_norm2(const Arith& ar, const Vector<typename Arith::Scalar>& x) {
  return vec_norm2(ar, x.span());
}

template <typename Arith>
typename Arith::Scalar mat_norm_fro(const Arith& ar, const DenseMatrix<typename Arith::Scalar>& a) {
  return vec_norm2(ar, a.data());
}

/// max_i |x_i - t_i| / |t_i|, with the absolute error used where t_i == 0.
BigFloat max_rel_err(const Vector<BigFloat>& x, const Vector<BigFloat>& x_true,
                     PrecisionContext ctx = PrecisionContext{kDefaultLongBits});

// --- conversions between scalar types ---------------------------------------

template <int K>
DenseMatrix<MultiComp<K>> to_multicomp(const DenseMatrix<BigFloat>& a) {
  DenseMatrix<MultiComp<K>> r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.data().size(); ++i) r.data()[i] = bf_to_multicomp<K>(a.data()[i]);
  return r;
}

template <int K>
Vector<MultiComp<K>> to_multicomp(const Vector<BigFloat>& v) {
  Vector<MultiComp<K>> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = bf_to_multicomp<K>(v[i]);
  return r;
}

template <int K>
Vector<BigFloat> to_bigfloat(const Vector<MultiComp<K>>& v, PrecisionContext ctx) {
  Vector<BigFloat> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = bf_from_multicomp<K>(v[i], ctx);
  return r;
}

template <int K>
DenseMatrix<BigFloat> to_bigfloat(const DenseMatrix<MultiComp<K>>& a, PrecisionContext ctx) {
  DenseMatrix<BigFloat> r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    r.data()[i] = bf_from_multicomp<K>(a.data()[i], ctx);
  }
  return r;
}

/// Enough bits to hold any canonical MultiComp sum exactly (its components
/// lie between 2^1024 and 2^-1074).
inline constexpr int kMultiCompExactBits = 2 * 1100 + 53 * 4;

template <int K>
DenseMatrix<BigFloat> to_bigfloat_exact(const DenseMatrix<MultiComp<K>>& a) {
  return to_bigfloat<K>(a, PrecisionContext{kMultiCompExactBits});
}

template <int K>
Vector<BigFloat> to_bigfloat_exact(const Vector<MultiComp<K>>& v) {
  return to_bigfloat<K>(v, PrecisionContext{kMultiCompExactBits});
}

DenseMatrix<BigFloat> round_to(const DenseMatrix<BigFloat>& a, PrecisionContext ctx);
Vector<BigFloat> round_to(const Vector<BigFloat>& v, PrecisionContext ctx);

}  // namespace mpcore
