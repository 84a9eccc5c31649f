#pragma once

// Ill-conditioned benchmark systems A = R D R^-1 with a geometric diagonal D,
// known solution x = (0, 1, ..., n-1) and b = A x, all built in BigFloat.

#include <array>
#include <cstdint>

#include "mpcore/bigfloat.hpp"
#include "mpcore/matrix.hpp"

namespace mpcore {

/// xoshiro256** seeded by four splitmix64 outputs.
class Xoshiro256ss {
 public:
  explicit Xoshiro256ss(std::uint64_t seed);
  std::uint64_t next();

 private:
  std::array<std::uint64_t, 4> s_;
};

std::uint64_t splitmix64_next(std::uint64_t& state);

struct ProblemSpec {
  std::size_t n = 200;
  std::uint64_t seed = 1;
  /// d_i = 10^(-cond_exponent * (i-1) / n).
  int cond_exponent = 26;
  int gen_bits = 512;
};

struct GeneratedSystem {
  DenseMatrix<BigFloat> a;
  Vector<BigFloat> b;
  Vector<BigFloat> x_true;
  ProblemSpec spec;
  /// Seed actually used (differs from spec.seed only after singular retries).
  std::uint64_t seed_used = 0;
};

/// Throws DomainError for n < 2, negative cond_exponent or gen_bits < 64.
void validate(const ProblemSpec& spec);

/// d_i = 10^(-c (i-1) / n), i = 1..n, within a few ulps at gen_bits.
Vector<BigFloat> gen_diag(std::size_t n, int c, int gen_bits);

/// Entries (u / 2^63) - 1 for successive 64-bit outputs u, row-major. Each
/// value is exact in 64 bits, so the result does not depend on gen_bits.
DenseMatrix<BigFloat> gen_random_matrix(std::size_t n, std::uint64_t seed, int gen_bits);

/// R^-1 comes from LU and n solves, A = R (D R^-1), and b is the exact
/// product A x_true rounded once. Retries with seed + 1 (up to 8 times) when
/// R is singular, then throws SingularError. A second product at
/// gen_bits + 64 must satisfy max_i |A x_true - b|_i <= 2^-(gen_bits-10)
/// max_i (|A| |x_true|)_i, else Error(kInternal).
GeneratedSystem build_system(const ProblemSpec& spec);

/// A, b and x_true rounded to `bits` for a consumer working at that precision.
GeneratedSystem export_system(const GeneratedSystem& sys, int bits);

}  // namespace mpcore
