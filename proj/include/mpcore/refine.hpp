#pragma once

// Mixed-precision iterative refinement: factor once in MultiComp (short)
// precision, compute residuals and accumulate the solution in BigFloat (long)
// precision.

#include <cstddef>
#include <string>
#include <vector>

#include "mpcore/bigfloat.hpp"
#include "mpcore/lanes.hpp"
#include "mpcore/matrix.hpp"

namespace mpcore {

enum class StopReason { kConverged, kMaxIter, kStagnated };

const char* stop_reason_name(StopReason r);

struct RefineConfig {
  int short_k = 3;
  int long_bits = kDefaultLongBits;
  BigFloat rtol;  // zero until set; see default_refine_config()
  BigFloat atol;
  int max_iter = 50;
  LaneMode lanes = LaneMode::kLanes;
  /// Scale each residual to unit norm before the short solve. Only tests
  /// turn this off.
  bool normalize_residual = true;
};

/// short_k = k, long_bits = 424, rtol = 1e-100, atol = 0, max_iter = 50.
RefineConfig default_refine_config(int short_k = 3);

/// Throws DomainError unless 2 <= short_k <= 4, long_bits > 53 * short_k,
/// rtol and atol are nonnegative with at least one positive, max_iter >= 1.
void validate(const RefineConfig& cfg);

struct RefineReport {
  Vector<BigFloat> solution;
  /// Corrections applied to the initial short-precision solution.
  std::size_t iterations = 0;
  /// Residual 2-norm before each stop test, starting with the initial
  /// solution's; always iterations + 1 entries.
  std::vector<BigFloat> residual_history;
  StopReason stop_reason = StopReason::kConverged;
};

/// res_norm < sqrt(n) * rtol * a_fro * x_norm + atol, evaluated at ctx.
bool check_stop(const BigFloat& res_norm, const BigFloat& x_norm, const BigFloat& a_fro,
                std::size_t n, const BigFloat& rtol, const BigFloat& atol, PrecisionContext ctx);

/// Throws SingularError (with the failing step) when A is singular after
/// rounding to short precision.
RefineReport iterative_refinement(const DenseMatrix<BigFloat>& a, const Vector<BigFloat>& b,
                                  const RefineConfig& cfg);

/// Residual b - A x at ctx.
Vector<BigFloat> residual(const DenseMatrix<BigFloat>& a, const Vector<BigFloat>& x,
                          const Vector<BigFloat>& b, PrecisionContext ctx);

}  // namespace mpcore
