#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "mpcore/arith.hpp"
#include "mpcore/linalg.hpp"
#include "mpcore/testgen.hpp"
#include "oracle.hpp"

using namespace mpcore;

namespace {

struct VectorFile {
  std::vector<std::pair<std::uint64_t, std::vector<std::uint64_t>>> raw;
  struct Entries {
    std::size_t n;
    std::uint64_t seed;
    std::vector<long long> numerators;
  };
  std::vector<Entries> entries;
};

VectorFile load_vectors() {
  std::ifstream in(MPCORE_TEST_DATA_DIR "/xoshiro256ss_vectors.txt");
  REQUIRE(in.good());
  VectorFile f;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "raw") {
      std::uint64_t seed, v;
      ls >> seed;
      std::vector<std::uint64_t> out;
      while (ls >> v) out.push_back(v);
      f.raw.emplace_back(seed, out);
    } else if (kind == "entries") {
      VectorFile::Entries e;
      long long v;
      ls >> e.n >> e.seed;
      while (ls >> v) e.numerators.push_back(v);
      f.entries.push_back(e);
    }
  }
  return f;
}

// |a - want| <= ulps * ulp(want) at `bits`.
bool within_ulps(const BigFloat& a, const oracle::Mp& want, int bits, long ulps) {
  oracle::Mp d(4000), bound(64);
  mpfr_sub(d.get(), oracle::from_bigfloat(a).get(), want.get(), MPFR_RNDN);
  mpfr_set_si(bound.get(), ulps, MPFR_RNDN);
  mpfr_mul_2si(bound.get(), bound.get(), mpfr_get_exp(want.get()) - bits, MPFR_RNDN);
  return mpfr_cmpabs(d.get(), bound.get()) <= 0;
}

// 10^(num / den) with the exponent rounded at 700 bits.
oracle::Mp pow10_real(long num, unsigned long den) {
  oracle::Mp e(700), r(700);
  mpfr_set_si(e.get(), num, MPFR_RNDN);
  mpfr_div_ui(e.get(), e.get(), den, MPFR_RNDN);
  mpfr_ui_pow(r.get(), 10, e.get(), MPFR_RNDN);
  return r;
}

}  // namespace

TEST_CASE("generator matches the reference vectors") {
  const VectorFile f = load_vectors();
  REQUIRE(f.raw.size() >= 3);
  for (const auto& [seed, outs] : f.raw) {
    Xoshiro256ss g(seed);
    for (std::uint64_t want : outs) CHECK(g.next() == want);
  }
  REQUIRE(!f.entries.empty());
  for (const auto& e : f.entries) {
    const auto r = gen_random_matrix(e.n, e.seed, 512);
    REQUIRE(e.numerators.size() == e.n * e.n);
    for (std::size_t i = 0; i < e.n * e.n; ++i) {
      const long long num = e.numerators[i];
      const std::uint64_t mag = num < 0 ? static_cast<std::uint64_t>(-(num + 1)) + 1 : num;
      const BigFloat want = BigFloat::from_parts(num < 0, nat::from_u64(mag), -63, 0);
      CHECK(r.data()[i] == want);
    }
  }
}

TEST_CASE("random matrices are deterministic and in [-1, 1)") {
  const auto a = gen_random_matrix(9, 1234, 512);
  CHECK(a == gen_random_matrix(9, 1234, 512));
  CHECK(a == gen_random_matrix(9, 1234, 128));
  CHECK(!(a == gen_random_matrix(9, 1235, 512)));
  const BigFloat one = BigFloat::from_int(1);
  for (const auto& v : a.data()) {
    CHECK(bf_cmp(v, one) < 0);
    CHECK(bf_cmp(v, bf_neg(one)) >= 0);
  }
}

TEST_CASE("geometric diagonal") {
  const auto d4 = gen_diag(4, 26, 512);
  CHECK(d4[0] == BigFloat::from_int(1));
  const long exps[] = {0, -65, -130, -195};  // tenths
  for (int i = 0; i < 4; ++i) CHECK(within_ulps(d4[i], pow10_real(exps[i], 10), 512, 4));

  for (std::size_t n : {2, 7, 10, 13, 200}) {
    const auto d = gen_diag(n, 26, 512);
    for (std::size_t i = 0; i < n; i += 1 + n / 17) {
      CAPTURE(n);
      CAPTURE(i);
      CHECK(within_ulps(d[i], pow10_real(-26 * static_cast<long>(i), n), 512, 4));
    }
  }

  // d_1 / d_n = 10^(26 * 9 / 10) for n = 10.
  const auto d10 = gen_diag(10, 26, 512);
  const BigFloat ratio = bf_div(d10[0], d10[9], PrecisionContext{512});
  CHECK(within_ulps(ratio, pow10_real(234, 10), 512, 10));
  CHECK_THROWS_AS(gen_diag(1, 26, 512), DomainError);
}

TEST_CASE("built systems satisfy their construction") {
  ProblemSpec spec;
  spec.n = 8;
  spec.seed = 3;
  const GeneratedSystem sys = build_system(spec);
  CHECK(sys.seed_used == 3);
  for (std::size_t i = 0; i < spec.n; ++i) CHECK(sys.x_true[i] == BigFloat::from_int(static_cast<long>(i)));

  // b against an MPFR product, and A R = R D.
  const std::size_t n = spec.n;
  const auto r = gen_random_matrix(n, sys.seed_used, spec.gen_bits);
  const auto d = gen_diag(n, spec.cond_exponent, spec.gen_bits);
  double worst_b = 0, worst_ar = 0;
  for (std::size_t i = 0; i < n; ++i) {
    oracle::Mp acc(3000), term(3000), scale(3000);
    for (std::size_t j = 0; j < n; ++j) {
      mpfr_mul(term.get(), oracle::from_bigfloat(sys.a(i, j)).get(),
               oracle::from_bigfloat(sys.x_true[j]).get(), MPFR_RNDN);
      mpfr_add(acc.get(), acc.get(), term.get(), MPFR_RNDN);
      mpfr_abs(term.get(), term.get(), MPFR_RNDN);
      mpfr_add(scale.get(), scale.get(), term.get(), MPFR_RNDN);
    }
    worst_b = std::max(worst_b, oracle::rel_err(oracle::from_bigfloat(sys.b[i]), acc));
    for (std::size_t j = 0; j < n; ++j) {
      oracle::Mp ar(3000), rd(3000);
      for (std::size_t k = 0; k < n; ++k) {
        mpfr_mul(term.get(), oracle::from_bigfloat(sys.a(i, k)).get(),
                 oracle::from_bigfloat(r(k, j)).get(), MPFR_RNDN);
        mpfr_add(ar.get(), ar.get(), term.get(), MPFR_RNDN);
      }
      mpfr_mul(rd.get(), oracle::from_bigfloat(r(i, j)).get(), oracle::from_bigfloat(d[j]).get(),
               MPFR_RNDN);
      mpfr_sub(ar.get(), ar.get(), rd.get(), MPFR_RNDN);
      worst_ar = std::max(worst_ar, std::fabs(mpfr_get_d(ar.get(), MPFR_RNDN)));
    }
  }
  CHECK(worst_b <= std::ldexp(1.0, -(spec.gen_bits - 10)));
  // R and D are O(1); the construction error is set by gen_bits times the
  // conditioning of R.
  CHECK(worst_ar <= std::ldexp(1.0, -(spec.gen_bits - 40)));

  const GeneratedSystem again = build_system(spec);
  CHECK(again.a == sys.a);
  CHECK(again.b == sys.b);

  const GeneratedSystem low = export_system(sys, 424);
  for (const auto& v : low.a.data()) CHECK(v.significant_bits() <= 424);
  CHECK(low.x_true == sys.x_true);
}

TEST_CASE("zero exponent gives a near-identity system") {
  ProblemSpec spec;
  spec.n = 6;
  spec.seed = 11;
  spec.cond_exponent = 0;
  const GeneratedSystem sys = build_system(spec);
  const BfArith bar{PrecisionContext{512}};
  for (std::size_t i = 0; i < spec.n; ++i) {
    for (std::size_t j = 0; j < spec.n; ++j) {
      const BigFloat want = BigFloat::from_int(i == j ? 1 : 0);
      CHECK(bf_cmp(bf_abs(bf_sub(sys.a(i, j), want, bar.ctx)), bf_ldexp(want.is_zero() ? BigFloat::from_int(1) : want, -480)) <= 0);
    }
  }
  auto a = to_multicomp<2>(sys.a);
  const McArith<2> ar;
  const auto piv = lu_factor_pp(ar, a);
  const auto x = lu_solve(ar, a, piv, to_multicomp<2>(sys.b));
  const BigFloat err = max_rel_err(to_bigfloat_exact<2>(x), sys.x_true);
  CHECK(bf_cmp(err, bf_ldexp(BigFloat::from_int(1), -100)) <= 0);
}

TEST_CASE("spec validation") {
  ProblemSpec spec;
  spec.n = 1;
  CHECK_THROWS_AS(validate(spec), DomainError);
  CHECK_THROWS_AS(build_system(spec), DomainError);
  spec.n = 4;
  spec.gen_bits = 32;
  CHECK_THROWS_AS(validate(spec), DomainError);
  spec.gen_bits = 512;
  spec.cond_exponent = -1;
  CHECK_THROWS_AS(validate(spec), DomainError);
}
