#include "mpcore/refine.hpp"

#include "mpcore/arith.hpp"
#include "mpcore/linalg.hpp"

namespace mpcore {

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::kConverged: return "converged";
    case StopReason::kMaxIter: return "max_iter";
    case StopReason::kStagnated: return "stagnated";
  }
  return "unknown";
}

RefineConfig default_refine_config(int short_k) {
  RefineConfig cfg;
  cfg.short_k = short_k;
  cfg.rtol = bf_parse_decimal("1e-100", PrecisionContext{cfg.long_bits});
  return cfg;
}

void validate(const RefineConfig& cfg) {
  if (cfg.short_k < 2 || cfg.short_k > 4) throw DomainError("refine: short_k must be 2, 3 or 4");
  if (cfg.long_bits <= 53 * cfg.short_k) {
    throw DomainError("refine: long_bits must exceed the short precision");
  }
  if (cfg.rtol.is_negative() || cfg.atol.is_negative()) {
    throw DomainError("refine: tolerances must be nonnegative");
  }
  if (cfg.rtol.is_zero() && cfg.atol.is_zero()) {
    throw DomainError("refine: rtol or atol must be positive");
  }
  if (cfg.max_iter < 1) throw DomainError("refine: max_iter must be >= 1");
}

bool check_stop(const BigFloat& res_norm, const BigFloat& x_norm, const BigFloat& a_fro,
                std::size_t n, const BigFloat& rtol, const BigFloat& atol, PrecisionContext ctx) {
  const BigFloat sqrt_n = bf_sqrt(BigFloat::from_int(static_cast<std::int64_t>(n)), ctx);
  BigFloat thr = bf_mul(sqrt_n, rtol, ctx);
  thr = bf_mul(thr, a_fro, ctx);
  thr = bf_mul(thr, x_norm, ctx);
  thr = bf_add(thr, atol, ctx);
  return bf_cmp(res_norm, thr) < 0;
}

Vector<BigFloat> residual(const DenseMatrix<BigFloat>& a, const Vector<BigFloat>& x,
                          const Vector<BigFloat>& b, PrecisionContext ctx) {
  if (a.rows() != b.size()) throw DimensionError("residual: A.rows != b.len");
  const BfArith ar{ctx};
  Vector<BigFloat> r = mat_vec(ar, a, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = bf_sub(b[i], r[i], ctx);
  return r;
}

namespace {

// Three consecutive steps without a decrease.
bool stagnated(const std::vector<BigFloat>& h) {
  if (h.size() < 4) return false;
  for (std::size_t i = h.size() - 3; i < h.size(); ++i) {
    if (bf_cmp(h[i], h[i - 1]) < 0) return false;
  }
  return true;
}

template <int K>
RefineReport refine_k(const DenseMatrix<BigFloat>& a, const Vector<BigFloat>& b,
                      const RefineConfig& cfg) {
  const PrecisionContext ctx{cfg.long_bits};
  const BfArith lar{ctx};
  const McArith<K> sar;
  const std::size_t n = b.size();

  const BigFloat a_fro = mat_norm_fro(lar, a);

  DenseMatrix<MultiComp<K>> lu = to_multicomp<K>(a);
  const PivotRecord piv = lu_factor_pp(sar, lu, cfg.lanes);
  Vector<BigFloat> x = to_bigfloat<K>(lu_solve(sar, lu, piv, to_multicomp<K>(b)), ctx);

  RefineReport rep;
  for (int step = 0;; ++step) {
    Vector<BigFloat> res = residual(a, x, b, ctx);
    const BigFloat res_norm = vec_norm2(lar, res);
    rep.residual_history.push_back(res_norm);
    if (res_norm.is_zero() ||
        check_stop(res_norm, vec_norm2(lar, x), a_fro, n, cfg.rtol, cfg.atol, ctx)) {
      rep.stop_reason = StopReason::kConverged;
      break;
    }
    if (stagnated(rep.residual_history)) {
      rep.stop_reason = StopReason::kStagnated;
      break;
    }
    if (step == cfg.max_iter) {
      rep.stop_reason = StopReason::kMaxIter;
      break;
    }
    if (cfg.normalize_residual) {
      const BigFloat coef = bf_div(lar.one(), res_norm, ctx);
      for (auto& r : res) r = bf_mul(coef, r, ctx);
    }
    Vector<BigFloat> z = to_bigfloat<K>(lu_solve(sar, lu, piv, to_multicomp<K>(res)), ctx);
    for (std::size_t i = 0; i < n; ++i) {
      if (cfg.normalize_residual) z[i] = bf_mul(res_norm, z[i], ctx);
      x[i] = bf_add(x[i], z[i], ctx);
    }
    ++rep.iterations;
  }
  rep.solution = std::move(x);
  return rep;
}

}  // namespace

RefineReport iterative_refinement(const DenseMatrix<BigFloat>& a, const Vector<BigFloat>& b,
                                  const RefineConfig& cfg) {
  validate(cfg);
  if (!a.is_square()) throw DimensionError("iterative_refinement: A not square");
  if (a.rows() != b.size()) throw DimensionError("iterative_refinement: b.len != n");
  if (b.size() == 0) throw DimensionError("iterative_refinement: empty system");
  switch (cfg.short_k) {
    case 2: return refine_k<2>(a, b, cfg);
    case 3: return refine_k<3>(a, b, cfg);
    default: return refine_k<4>(a, b, cfg);
  }
}

}  // namespace mpcore
