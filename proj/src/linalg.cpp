#include "mpcore/linalg.hpp"

namespace mpcore {

BigFloat max_rel_err(const Vector<BigFloat>& x, const Vector<BigFloat>& x_true,
                     PrecisionContext ctx) {
  detail::require(x.size() == x_true.size(), "max_rel_err: length mismatch");
  BigFloat worst;
  for (std::size_t i = 0; i < x.size(); ++i) {
    BigFloat e = bf_abs(bf_sub(x[i], x_true[i], ctx));
    if (!x_true[i].is_zero()) e = bf_div(e, bf_abs(x_true[i]), ctx);
    if (bf_cmp(e, worst) > 0) worst = std::move(e);
  }
  return worst;
}

DenseMatrix<BigFloat> round_to(const DenseMatrix<BigFloat>& a, PrecisionContext ctx) {
  DenseMatrix<BigFloat> r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.data().size(); ++i) r.data()[i] = bf_round(a.data()[i], ctx);
  return r;
}

Vector<BigFloat> round_to(const Vector<BigFloat>& v, PrecisionContext ctx) {
  Vector<BigFloat> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = bf_round(v[i], ctx);
  return r;
}

}  // namespace mpcore
