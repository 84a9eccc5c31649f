#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "doctest.h"
#include "mpcore/bigfloat.hpp"
#include "properties.hpp"

using namespace mpcore;

namespace {

BigFloat bf(double x) { return bf_from_binary64(x); }

BigFloat random_bf(std::mt19937_64& g, int max_limbs = 8, int exp_range = 300) {
  nat::Nat m(1 + g() % max_limbs);
  for (auto& l : m) l = g();
  if (g() % 5 == 0) m.back() |= 1ULL << 63;
  if (g() % 6 == 0) m.front() = 0;  // low zero bits
  nat::trim(m);
  if (m.empty()) m = nat::from_u64(1);
  const std::int64_t e = static_cast<std::int64_t>(g() % (2 * exp_range)) - exp_range;
  return BigFloat::from_parts(g() & 1, m, e, 0);
}

// Exact MPFR result of op rounded once to p bits.
template <typename F>
oracle::Mp mpfr_op(F f, const BigFloat& a, const BigFloat& b, int p) {
  oracle::Mp r(p);
  f(r.get(), oracle::from_bigfloat(a).get(), oracle::from_bigfloat(b).get(), MPFR_RNDN);
  return r;
}

bool layout_ok(const BigFloat& a, int p) {
  if (a.is_zero()) return !a.is_negative();
  const auto& m = a.mantissa();
  return (m.back() >> 63) == 1 && m.front() != 0 && a.significant_bits() <= p;
}

// |got - exact| < ulp(got) at p bits; `exact` comes from MPFR at p + 200 bits.
bool faithful(const BigFloat& got, const oracle::Mp& exact, int p) {
  oracle::Mp d(p + 400);
  mpfr_sub(d.get(), oracle::from_bigfloat(got).get(), exact.get(), MPFR_RNDN);
  if (mpfr_zero_p(d.get())) return true;
  const long ulp_exp = static_cast<long>(got.top_exponent()) - p;
  return mpfr_get_exp(d.get()) <= ulp_exp;
}

}  // namespace

TEST_CASE("add, sub, mul: examples") {
  const PrecisionContext p212{212};
  const BigFloat r = bf_add(bf(1.0), bf(0x1p-200), p212);
  CHECK(r == bf_add_exact(bf(1.0), bf(0x1p-200)));
  CHECK(r.significant_bits() == 201);
  CHECK(bf_mul(bf(1.5), bf(2.0), PrecisionContext{2}) == bf(3.0));
  CHECK(bf_sub(bf(1.0), bf(0x1p-300), PrecisionContext{106}) == bf(1.0));
  CHECK(r.precision() == 212);
}

TEST_CASE("div, sqrt: examples and errors") {
  const PrecisionContext p{106};
  CHECK(bf_div(bf(6), bf(3), p) == bf(2));
  CHECK(bf_sqrt(bf(4), p) == bf(2));
  CHECK(bf_sqrt(BigFloat{}, p).is_zero());
  CHECK_THROWS_AS(bf_div(bf(1), BigFloat{}, p), DivideByZeroError);
  CHECK_THROWS_AS(bf_sqrt(bf(-1), p), DomainError);
  // 1/3 at 106 bits against 1/3 at 300 bits rounded to 106.
  const BigFloat lo = bf_div(bf(1), bf(3), PrecisionContext{106});
  const BigFloat hi = bf_round(bf_div(bf(1), bf(3), PrecisionContext{300}), p);
  const BigFloat diff = bf_abs(bf_sub_exact(lo, hi));
  CHECK(bf_cmp(diff, bf_ldexp(BigFloat::from_int(1), lo.top_exponent() - 106)) <= 0);
}

TEST_CASE("exponent range exhaustion is an overflow") {
  const BigFloat big = bf_ldexp(BigFloat::from_int(1), (std::int64_t{1} << 61));
  CHECK_THROWS_AS(bf_mul(big, big, PrecisionContext{53}), OverflowError);
}

TEST_CASE("precision context rejects p < 2") {
  CHECK_THROWS(PrecisionContext{1});
  CHECK_NOTHROW(PrecisionContext{2});
}

TEST_CASE("add, sub, mul are correctly rounded") {
  std::mt19937_64 g(17);
  const int precs[] = {2, 3, 53, 64, 106, 159, 212, 424, 500};
  long mismatches = 0, bad_layout = 0;
  for (int t = 0; t < 6000; ++t) {
    const int p = precs[t % std::size(precs)];
    const BigFloat a = random_bf(g);
    BigFloat b = random_bf(g);
    if (t % 5 == 0) b = bf_add_exact(bf_neg(a), random_bf(g, 2, 10));  // cancellation
    if (t % 11 == 0) b = bf_ldexp(BigFloat::from_int(1), a.top_exponent() - p - 1);  // exact tie
    const PrecisionContext ctx{p};
    const BigFloat s = bf_add(a, b, ctx), d = bf_sub(a, b, ctx), m = bf_mul(a, b, ctx);
    mismatches += !oracle::equal(oracle::from_bigfloat(s), mpfr_op(mpfr_add, a, b, p));
    mismatches += !oracle::equal(oracle::from_bigfloat(d), mpfr_op(mpfr_sub, a, b, p));
    mismatches += !oracle::equal(oracle::from_bigfloat(m), mpfr_op(mpfr_mul, a, b, p));
    bad_layout += !layout_ok(s, p) + !layout_ok(d, p) + !layout_ok(m, p);
  }
  CHECK(mismatches == 0);
  CHECK(bad_layout == 0);
}

TEST_CASE("div and sqrt are faithful") {
  std::mt19937_64 g(18);
  long unfaithful = 0;
  for (int t = 0; t < 3000; ++t) {
    const int p = 2 + static_cast<int>(g() % 500);
    const BigFloat a = random_bf(g), b = random_bf(g);
    const BigFloat q = bf_div(a, b, PrecisionContext{p});
    const BigFloat r = bf_sqrt(bf_abs(a), PrecisionContext{p});
    oracle::Mp eq(p + 200), er(p + 200);
    mpfr_div(eq.get(), oracle::from_bigfloat(a).get(), oracle::from_bigfloat(b).get(), MPFR_RNDN);
    mpfr_sqrt(er.get(), oracle::from_bigfloat(bf_abs(a)).get(), MPFR_RNDN);
    unfaithful += !faithful(q, eq, p) + !faithful(r, er, p);
    unfaithful += !layout_ok(q, p) + !layout_ok(r, p);
  }
  CHECK(unfaithful == 0);
}

TEST_CASE("exact results are returned exactly") {
  std::mt19937_64 g(19);
  for (int t = 0; t < 2000; ++t) {
    const BigFloat a = random_bf(g, 2, 100), b = random_bf(g, 2, 100);
    const BigFloat prod = bf_mul_exact(a, b);
    CHECK(bf_mul(a, b, PrecisionContext{static_cast<int>(prod.significant_bits()) + 1}) == prod);
    const BigFloat sum = bf_add_exact(a, b);
    if (!sum.is_zero()) {
      CHECK(bf_add(a, b, PrecisionContext{static_cast<int>(sum.significant_bits()) + 1}) == sum);
      CHECK(bf_div(prod, b, PrecisionContext{static_cast<int>(a.significant_bits()) + 1}) == a);
    }
    const BigFloat sq = bf_mul_exact(a, a);
    CHECK(bf_sqrt(sq, PrecisionContext{static_cast<int>(a.significant_bits()) + 1}) == bf_abs(a));
  }
}

TEST_CASE("re-rounding a wider result stays within one ulp") {
  std::mt19937_64 g(20);
  for (int t = 0; t < 1000; ++t) {
    const int p1 = 10 + static_cast<int>(g() % 300);
    const int p2 = p1 + 1 + static_cast<int>(g() % 200);
    const BigFloat a = random_bf(g), b = random_bf(g);
    const BigFloat direct = bf_div(a, b, PrecisionContext{p1});
    const BigFloat rerounded = bf_round(bf_div(a, b, PrecisionContext{p2}), PrecisionContext{p1});
    const BigFloat diff = bf_abs(bf_sub_exact(direct, rerounded));
    CHECK(bf_cmp(diff, bf_ldexp(BigFloat::from_int(1), direct.top_exponent() - p1)) <= 0);
  }
}

TEST_CASE("binary64 conversions") {
  oracle::Mp tenth(53);
  mpfr_set_d(tenth.get(), 0.1, MPFR_RNDN);
  CHECK(oracle::equal(oracle::from_bigfloat(bf(0.1)), tenth));
  CHECK(bf(0.1) != bf_parse_decimal("0.1", PrecisionContext{200}));
  CHECK(bf_to_binary64(bf_add(bf(1), bf(0x1p-60), PrecisionContext{212})) == 1.0);
  CHECK(bf_to_binary64(BigFloat{}) == 0.0);
  CHECK_THROWS_AS(bf(std::numeric_limits<double>::infinity()), OverflowError);
  CHECK_THROWS_AS(bf_to_binary64(bf_ldexp(bf(1), 1024)), OverflowError);

  std::mt19937_64 g(21);
  for (int t = 0; t < 20000; ++t) {
    const double x = std::bit_cast<double>(g());
    if (!std::isfinite(x)) continue;
    CHECK(bf_to_binary64(bf(x)) == x);
  }
  // Rounding from wide values (subnormal results included) agrees with MPFR.
  for (int t = 0; t < 5000; ++t) {
    const BigFloat a = random_bf(g, 4, 1100);
    double want = 0;
    {
      // The documented MPFR recipe for binary64 semantics: round to 53 bits,
      // then clamp the exponent range and subnormalize using the ternary.
      oracle::Mp d(53);
      int inex = mpfr_set(d.get(), oracle::from_bigfloat(a).get(), MPFR_RNDN);
      const mpfr_exp_t emin = mpfr_get_emin(), emax = mpfr_get_emax();
      mpfr_set_emin(-1073);
      mpfr_set_emax(1024);
      inex = mpfr_check_range(d.get(), inex, MPFR_RNDN);
      mpfr_subnormalize(d.get(), inex, MPFR_RNDN);
      want = mpfr_get_d(d.get(), MPFR_RNDN);
      mpfr_set_emin(emin);
      mpfr_set_emax(emax);
    }
    if (!std::isfinite(want)) {
      CHECK_THROWS_AS(bf_to_binary64(a), OverflowError);
    } else {
      CHECK(bf_to_binary64(a) == want);
    }
  }
}

TEST_CASE("multi-component conversions") {
  const BigFloat x = bf_add(bf(1), bf(0x1p-60), PrecisionContext{212});
  CHECK(bf_to_multicomp<2>(x) == DD{{1.0, 0x1p-60}});
  CHECK(bf_to_multicomp<3>(BigFloat{}) == TD{});
  CHECK(bf_from_multicomp<3>(TD{}, PrecisionContext{424}).is_zero());
  CHECK(bf_from_multicomp<2>(DD{{1.0, 0x1p-60}}, PrecisionContext{424}) == x);

  const PrecisionContext p300{300};
  const BigFloat third = bf_div(bf(1), bf(3), p300);
  const TD t = bf_to_multicomp<3>(third);
  oracle::Mp diff(1000);
  mpfr_sub(diff.get(), oracle::from_multicomp(t).get(), oracle::from_bigfloat(third).get(),
           MPFR_RNDN);
  CHECK(std::fabs(mpfr_get_d(diff.get(), MPFR_RNDN)) <= 0x1p-158 / 3);
  CHECK(props::canonical_by_oracle(t));

  CHECK_THROWS_AS(bf_to_multicomp<2>(bf_ldexp(bf(1), 1100)), OverflowError);
}

TEST_CASE_TEMPLATE("multi-component round trip", T, std::integral_constant<int, 2>,
                   std::integral_constant<int, 3>, std::integral_constant<int, 4>) {
  constexpr int K = T::value;
  std::mt19937_64 g(40 + K);
  for (int t = 0; t < 3000; ++t) {
    const auto m = oracle::random_multicomp<K>(g, t % oracle::kRandomModes, 300);
    const BigFloat b = bf_from_multicomp<K>(m, PrecisionContext{2400});
    CHECK(oracle::equal(oracle::from_bigfloat(b), oracle::from_multicomp(m)));
    CHECK(bf_to_multicomp<K>(b) == m);
    // Greedy split of a wide value: each component is the rounding of what
    // is left, and the result is canonical.
    const BigFloat w = random_bf(g, 6, 200);
    const auto s = bf_to_multicomp<K>(w);
    CHECK(props::canonical_by_oracle(s));
    CHECK(oracle::rel_err(oracle::from_multicomp(s), oracle::from_bigfloat(w)) <=
          std::ldexp(1.0, -53 * K));
  }
}

TEST_CASE("decimal and hex text") {
  const PrecisionContext p{106};
  CHECK(bf_parse_decimal("1e0", p) == bf(1));
  CHECK(bf_parse_decimal("0.5", p) == bf(0.5));
  CHECK(bf_parse_decimal("-12.5e-1", p) == bf(-1.25));
  CHECK(bf_parse_decimal("+.25", p) == bf(0.25));
  CHECK(bf_parse_decimal("7.", p) == bf(7));
  CHECK(bf_parse_hex("-0x1.8p+3", p) == bf(-12));
  CHECK(bf_parse("0x1p-1074", p) == bf(std::numeric_limits<double>::denorm_min()));
  CHECK(bf_format_hex(bf(-12)) == "-0x1.8p+3");
  CHECK(bf_format_hex(BigFloat{}) == "0x0p+0");
  CHECK(bf_format_decimal(bf(1), 5) == "1.0000e+0");
  CHECK(bf_format_decimal(bf(-0.015625), 3) == "-1.56e-2");
  for (const char* bad : {"", "abc", "1e", "1.2.3", "--1", "0x", "0x1.8q3", "1e5x", "."}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(bf_parse(bad, p), ParseError);
  }
}

TEST_CASE("decimal parsing is correctly rounded") {
  std::mt19937_64 g(22);
  for (int t = 0; t < 3000; ++t) {
    std::string s = (g() & 1) ? "-" : "";
    const int digits = 1 + static_cast<int>(g() % 80);
    for (int i = 0; i < digits; ++i) {
      s.push_back(static_cast<char>('0' + g() % 10));
      if (i == 0 && digits > 1 && (g() & 1)) s.push_back('.');
    }
    s += "e" + std::to_string(static_cast<int>(g() % 400) - 200);
    const int p = 2 + static_cast<int>(g() % 450);
    oracle::Mp want(p);
    mpfr_strtofr(want.get(), s.c_str(), nullptr, 10, MPFR_RNDN);
    CAPTURE(s);
    CAPTURE(p);
    CHECK(oracle::equal(oracle::from_bigfloat(bf_parse_decimal(s, PrecisionContext{p})), want));
  }
}

TEST_CASE("decimal text round trips at 424 bits") {
  std::mt19937_64 g(23);
  const PrecisionContext p{424};
  const int digits = decimal_digits_for(424);
  CHECK(digits == 130);
  for (int t = 0; t < 500; ++t) {
    const BigFloat a = bf_round(random_bf(g, 8, 400), p);
    CHECK(bf_parse_decimal(bf_format_decimal(a, digits), p) == a);
    CHECK(bf_parse_hex(bf_format_hex(a), p) == a);
  }
}

TEST_CASE("compare, abs, neg") {
  CHECK(bf_cmp(bf(1), bf(2)) == std::strong_ordering::less);
  CHECK(bf_cmp(bf(-1), BigFloat{}) == std::strong_ordering::less);
  CHECK(bf_abs(bf(-3)) == bf(3));
  const BigFloat z = bf_neg(BigFloat{});
  CHECK(z.is_zero());
  CHECK(!z.is_negative());
  std::mt19937_64 g(24);
  for (int t = 0; t < 2000; ++t) {
    const BigFloat a = random_bf(g), b = (t % 3) ? random_bf(g) : a;
    const int want = mpfr_cmp(oracle::from_bigfloat(a).get(), oracle::from_bigfloat(b).get());
    const auto c = bf_cmp(a, b);
    CHECK((c < 0) == (want < 0));
    CHECK((c == 0) == (want == 0));
  }
}
