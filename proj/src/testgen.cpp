#include "mpcore/testgen.hpp"

#include <bit>
#include <cmath>
#include <numeric>

#include "mpcore/arith.hpp"
#include "mpcore/linalg.hpp"

namespace mpcore {

std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Xoshiro256ss::Xoshiro256ss(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& w : s_) w = splitmix64_next(sm);
}

std::uint64_t Xoshiro256ss::next() {
  const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = std::rotl(s_[3], 45);
  return result;
}

void validate(const ProblemSpec& spec) {
  if (spec.n < 2) throw DomainError("problem: n must be >= 2");
  if (spec.cond_exponent < 0) throw DomainError("problem: cond_exponent must be >= 0");
  if (spec.gen_bits < 64) throw DomainError("problem: gen_bits must be >= 64");
}

namespace {

BigFloat pow_int(const BigFloat& t, std::uint64_t m, PrecisionContext ctx) {
  BigFloat result = BigFloat::from_int(1, ctx.bits);
  BigFloat base = t;
  while (m) {
    if (m & 1) result = bf_mul(result, base, ctx);
    m >>= 1;
    if (m) base = bf_mul(base, base, ctx);
  }
  return result;
}

// 10^(-r/m) for 0 < r < m by Newton on f(t) = t^-m - 10^r, which needs no
// division: t <- t + t (1 - 10^r t^m) / m.
BigFloat inv_root_of_pow10(std::uint64_t r, std::uint64_t m, PrecisionContext ctx) {
  const BigFloat a = BigFloat::from_parts(false, nat::pow10(r), 0, ctx.bits);
  const BigFloat one = BigFloat::from_int(1, ctx.bits);
  const BigFloat m_bf = BigFloat::from_int(static_cast<std::int64_t>(m), 64);
  BigFloat t = bf_from_binary64(
      std::pow(10.0, -static_cast<double>(r) / static_cast<double>(m)), ctx);
  // Quadratic convergence from ~50 correct bits, plus one step of margin.
  int steps = 1;
  for (int good = 50; good < ctx.bits; good *= 2) ++steps;
  for (int s = 0; s < steps; ++s) {
    const BigFloat e = bf_sub(one, bf_mul(a, pow_int(t, m, ctx), ctx), ctx);
    t = bf_add(t, bf_div(bf_mul(t, e, ctx), m_bf, ctx), ctx);
  }
  return t;
}

// Signed 64-bit generator output mapped to [-1, 1): (u - 2^63) / 2^63.
BigFloat unit_interval(std::uint64_t u, int bits) {
  const std::uint64_t half = 1ULL << 63;
  const bool neg = u < half;
  const std::uint64_t mag = neg ? half - u : u - half;
  return BigFloat::from_parts(neg, nat::from_u64(mag), -63, bits);
}

}  // namespace

Vector<BigFloat> gen_diag(std::size_t n, int c, int gen_bits) {
  if (n < 2) throw DomainError("gen_diag: n must be >= 2");
  if (c < 0) throw DomainError("gen_diag: exponent must be >= 0");
  const PrecisionContext out{gen_bits};
  const PrecisionContext work{gen_bits + 64};
  Vector<BigFloat> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    // exponent c*i/n = q + r/n, reduced to r'/m.
    const std::uint64_t e = static_cast<std::uint64_t>(c) * i;
    const std::uint64_t q = e / n;
    std::uint64_t r = e % n;
    std::uint64_t m = n;
    const std::uint64_t g = std::gcd(r, m);
    if (g > 1) {
      r /= g;
      m /= g;
    }
    const BigFloat p10q = BigFloat::from_parts(false, nat::pow10(q), 0, work.bits);
    BigFloat di;
    if (r == 0) {
      di = bf_div(BigFloat::from_int(1, work.bits), p10q, work);
    } else {
      di = bf_div(inv_root_of_pow10(r, m, work), p10q, work);
    }
    d[i] = bf_round(di, out);
  }
  return d;
}

DenseMatrix<BigFloat> gen_random_matrix(std::size_t n, std::uint64_t seed, int gen_bits) {
  if (n < 2) throw DomainError("gen_random_matrix: n must be >= 2");
  Xoshiro256ss rng(seed);
  DenseMatrix<BigFloat> r(n, n);
  for (auto& e : r.data()) e = unit_interval(rng.next(), std::max(gen_bits, 64));
  return r;
}

namespace {

DenseMatrix<BigFloat> invert(const DenseMatrix<BigFloat>& r, const BfArith& ar) {
  const std::size_t n = r.rows();
  DenseMatrix<BigFloat> lu = r;
  const PivotRecord piv = lu_factor_pp(ar, lu);
  DenseMatrix<BigFloat> inv(n, n, ar.zero());
  for (std::size_t j = 0; j < n; ++j) {
    Vector<BigFloat> e(n, ar.zero());
    e[j] = ar.one();
    const Vector<BigFloat> col = lu_solve(ar, lu, piv, e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

// b_i = fl(exact sum_j A_ij x_j).
Vector<BigFloat> exact_rounded_product(const DenseMatrix<BigFloat>& a, const Vector<BigFloat>& x,
                                       PrecisionContext ctx) {
  Vector<BigFloat> b(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    BigFloat acc;
    for (std::size_t j = 0; j < a.cols(); ++j) acc = bf_add_exact(acc, bf_mul_exact(a(i, j), x[j]));
    b[i] = bf_round(acc, ctx);
  }
  return b;
}

void self_check(const GeneratedSystem& sys) {
  const PrecisionContext wide{sys.spec.gen_bits + 64};
  const BfArith ar{wide};
  const Vector<BigFloat> ax = mat_vec(ar, sys.a, sys.x_true);
  BigFloat worst_err, scale;
  for (std::size_t i = 0; i < ax.size(); ++i) {
    const BigFloat err = bf_abs(bf_sub(ax[i], sys.b[i], wide));
    if (bf_cmp(err, worst_err) > 0) worst_err = err;
    BigFloat row;
    for (std::size_t j = 0; j < sys.a.cols(); ++j) {
      row = bf_add(row, bf_abs(bf_mul(sys.a(i, j), sys.x_true[j], wide)), wide);
    }
    if (bf_cmp(row, scale) > 0) scale = row;
  }
  const BigFloat bound = bf_ldexp(scale, -(sys.spec.gen_bits - 10));
  if (bf_cmp(worst_err, bound) > 0) {
    throw Error(ErrorCode::kInternal, "build_system: A x_true does not reproduce b");
  }
}

}  // namespace

GeneratedSystem build_system(const ProblemSpec& spec) {
  validate(spec);
  const std::size_t n = spec.n;
  const PrecisionContext ctx{spec.gen_bits};
  const BfArith ar{ctx};
  const Vector<BigFloat> d = gen_diag(n, spec.cond_exponent, spec.gen_bits);

  constexpr int kMaxRetries = 8;
  for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
    const std::uint64_t seed = spec.seed + static_cast<std::uint64_t>(attempt);
    const DenseMatrix<BigFloat> r = gen_random_matrix(n, seed, spec.gen_bits);
    DenseMatrix<BigFloat> r_inv;
    try {
      r_inv = invert(r, ar);
    } catch (const SingularError&) {
      continue;
    }
    // D R^-1: row i scaled by d_i.
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) r_inv(i, j) = bf_mul(d[i], r_inv(i, j), ctx);
    }
    GeneratedSystem sys;
    sys.spec = spec;
    sys.seed_used = seed;
    sys.a = mat_mul_blocked(ar, r, r_inv);
    sys.x_true = Vector<BigFloat>(n);
    for (std::size_t i = 0; i < n; ++i) {
      sys.x_true[i] = BigFloat::from_int(static_cast<std::int64_t>(i), spec.gen_bits);
    }
    sys.b = exact_rounded_product(sys.a, sys.x_true, ctx);
    self_check(sys);
    return sys;
  }
  throw SingularError(0, "build_system: random matrix singular after retries");
}

GeneratedSystem export_system(const GeneratedSystem& sys, int bits) {
  const PrecisionContext ctx{bits};
  GeneratedSystem out;
  out.spec = sys.spec;
  out.seed_used = sys.seed_used;
  out.a = round_to(sys.a, ctx);
  out.b = round_to(sys.b, ctx);
  out.x_true = round_to(sys.x_true, ctx);
  return out;
}

}  // namespace mpcore
