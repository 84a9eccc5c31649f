#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "mpcore/mcfloat.hpp"
#include "properties.hpp"

using namespace mpcore;

namespace {

template <int K>
MultiComp<K> mc(std::initializer_list<double> cs) {
  MultiComp<K> m;
  int i = 0;
  for (double v : cs) m.c[i++] = v;
  return m;
}

template <int K>
bool bits_equal(const MultiComp<K>& a, const MultiComp<K>& b) {
  for (int i = 0; i < K; ++i) {
    if (std::bit_cast<std::uint64_t>(a.c[i]) != std::bit_cast<std::uint64_t>(b.c[i])) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("precision tags pair components with mantissa bits") {
  CHECK(precision_tag(2).bits == 106);
  CHECK(precision_tag(3).bits == 159);
  CHECK(precision_tag(4).bits == 212);
  CHECK(DD::kBits == 106);
}

TEST_CASE("renormalize: examples") {
  const double r1[] = {1.0, 0.0, 0.0};
  CHECK(renormalize<2>(r1) == mc<2>({1.0, 0.0}));
  const double r2[] = {1.0, 0x1p-60, 0x1p-120};
  CHECK(renormalize<3>(r2) == mc<3>({1.0, 0x1p-60, 0x1p-120}));
  const double r3[] = {0x1p-60, 1.0};
  CHECK(renormalize<2>(r3) == mc<2>({1.0, 0x1p-60}));
}

TEST_CASE("renormalize: rejects bad input") {
  const double few[] = {1.0};
  CHECK_THROWS_AS(renormalize<2>(few), DimensionError);
  const double inf[] = {1.0, std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(renormalize<2>(inf), OverflowError);
  const double big[] = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
  CHECK_THROWS_AS(renormalize<2>(big), OverflowError);
}

TEST_CASE("renormalize: result matches the exact sum of arbitrary raw terms") {
  std::mt19937_64 g(7);
  for (int t = 0; t < 2000; ++t) {
    std::vector<double> raw(4 + g() % 10);
    for (auto& v : raw) v = props::random_double(g, -60, 0);
    const auto r = renormalize<4>(raw);
    CHECK(props::canonical_by_oracle(r));
    oracle::Mp want(oracle::kWide);
    for (double v : raw) mpfr_add_d(want.get(), want.get(), v, MPFR_RNDN);
    CHECK(oracle::rel_err(oracle::from_multicomp(r), want) <= 0x1p-205);
  }
}

TEST_CASE("arithmetic: exact small cases") {
  CHECK(mc_mul(mc<2>({2, 0}), mc<2>({3, 0})) == mc<2>({6, 0}));
  CHECK(mc_add(mc<2>({1, 0}), mc<2>({0x1p-100, 0})) == mc<2>({1, 0x1p-100}));
  CHECK(mc_sub(mc<3>({1, 0, 0}), mc<3>({1, 0, 0})) == MultiComp<3>{});
  CHECK(mc_div(mc<2>({6, 0}), mc<2>({3, 0})) == mc<2>({2, 0}));
}

TEST_CASE("arithmetic: quad one third against a 300-bit oracle") {
  const QD q = mc_div(from_binary64<4>(1.0), from_binary64<4>(3.0));
  oracle::Mp third(300);
  mpfr_set_ui(third.get(), 1, MPFR_RNDN);
  mpfr_div_ui(third.get(), third.get(), 3, MPFR_RNDN);
  CHECK(oracle::rel_err(oracle::from_multicomp(q), third) <= 0x1p-205);
  CHECK(props::canonical_by_oracle(q));
}

TEST_CASE("arithmetic: division by zero and overflow are errors") {
  CHECK_THROWS_AS(mc_div(from_binary64<2>(1.0), DD{}), DivideByZeroError);
  const double big = std::numeric_limits<double>::max();
  CHECK_THROWS_AS(mc_add(from_binary64<3>(big), from_binary64<3>(big)), OverflowError);
  CHECK_THROWS_AS(mc_mul(from_binary64<2>(0x1p600), from_binary64<2>(0x1p600)), OverflowError);
  CHECK_THROWS_AS(mc_div(from_binary64<4>(0x1p1000), from_binary64<4>(0x1p-100)), OverflowError);
}

TEST_CASE("sqrt: examples and domain") {
  CHECK(mc_sqrt(mc<2>({4, 0})) == mc<2>({2, 0}));
  CHECK(mc_sqrt(DD{}) == DD{});
  const TD r = mc_sqrt(mc<3>({2, 0, 0}));
  oracle::Mp root2(400);
  mpfr_sqrt_ui(root2.get(), 2, MPFR_RNDN);
  CHECK(oracle::rel_err(oracle::from_multicomp(r), root2) <= 0x1p-150);
  CHECK_THROWS_AS(mc_sqrt(mc<2>({-1, 0})), DomainError);
}

TEST_CASE("compare, abs, neg and binary64 conversions") {
  CHECK(mc_cmp(mc<2>({1, 0x1p-60}), mc<2>({1, 0})) == std::strong_ordering::greater);
  CHECK(mc_abs(mc<2>({-1, 0x1p-60})) == mc<2>({1, -0x1p-60}));
  CHECK(to_binary64(mc<3>({5, 0x1p-60, 0})) == 5.0);
  CHECK(from_binary64<4>(2.5) == mc<4>({2.5, 0, 0, 0}));
  CHECK(!std::signbit(mc_neg(DD{}).c[0]));
  CHECK(!std::signbit(mc_neg(DD{}).c[1]));
}

TEST_CASE("canonical form: the half-ulp tail shapes") {
  // c0 has an odd mantissa and c1 is exactly half an ulp of it, with c2
  // pulling the sum below the midpoint: this is canonical.
  const TD below = mc<3>({1.0 + 0x1p-52, 0x1p-53, -0x1p-120});
  CHECK(props::canonical_by_oracle(below));
  CHECK(is_normalized(below));
  const double raw[] = {below.c[0], below.c[1], below.c[2]};
  CHECK(bits_equal(renormalize<3>(raw), below));

  // Same tail on an even c0 with c2 pushing past the midpoint: the sum
  // rounds up, so the first component must move.
  const TD pushed = mc<3>({1.0, 0x1p-53, 0x1p-120});
  CHECK(!props::canonical_by_oracle(pushed));
  CHECK(!is_normalized(pushed));
  const double raw2[] = {pushed.c[0], pushed.c[1], pushed.c[2]};
  const TD fixed = renormalize<3>(raw2);
  CHECK(props::canonical_by_oracle(fixed));
  CHECK(fixed.c[0] == 1.0 + 0x1p-52);
  CHECK(oracle::equal(oracle::from_multicomp(fixed), oracle::from_multicomp(pushed)));

  // Arithmetic on the canonical tie shape stays canonical.
  CHECK(props::canonical_by_oracle(mc_add(below, from_binary64<3>(0x1p-80))));
  CHECK(props::canonical_by_oracle(mc_mul(below, below)));
}

TEST_CASE("is_normalized rejects overlap, -0 and interior zeros") {
  CHECK(!is_normalized(mc<2>({1.0, 1.0})));
  CHECK(!is_normalized(mc<2>({1.0, -0.0})));
  CHECK(!is_normalized(mc<3>({1.0, 0.0, 0x1p-80})));
  CHECK(!is_normalized(mc<2>({std::numeric_limits<double>::infinity(), 0})));
  CHECK(is_normalized(mc<4>({1.0, 0x1p-60, -0x1p-120, 0x1p-180})));
}

TEST_CASE_TEMPLATE("normalization is idempotent and agrees with the oracle", T,
                   std::integral_constant<int, 2>, std::integral_constant<int, 3>,
                   std::integral_constant<int, 4>) {
  constexpr int K = T::value;
  std::mt19937_64 g(99 + K);
  for (int t = 0; t < 5000; ++t) {
    const auto a = oracle::random_multicomp<K>(g, t % oracle::kRandomModes);
    REQUIRE(props::canonical_by_oracle(a));
    CHECK(is_normalized(a));
    CHECK(bits_equal(renormalize<K>(a.c), a));
  }
}

TEST_CASE_TEMPLATE("arithmetic stays within the relative error envelope", T,
                   std::integral_constant<int, 2>, std::integral_constant<int, 3>,
                   std::integral_constant<int, 4>) {
  constexpr int K = T::value;
  const props::EnvelopeStats st = props::envelope<K>(2000, 1000 + K);
  INFO("worst add/sub/mul/div/sqrt: " << st.worst[0] << " " << st.worst[1] << " " << st.worst[2]
                                      << " " << st.worst[3] << " " << st.worst[4]);
  CHECK(st.failures == 0);
  CHECK(st.noncanonical == 0);
}

TEST_CASE_TEMPLATE("ring sanity", T, std::integral_constant<int, 2>,
                   std::integral_constant<int, 3>, std::integral_constant<int, 4>) {
  constexpr int K = T::value;
  std::mt19937_64 g(500 + K);
  const auto one = from_binary64<K>(1.0);
  for (int t = 0; t < 3000; ++t) {
    const auto a = oracle::random_multicomp<K>(g, t % oracle::kRandomModes);
    const auto b = oracle::random_multicomp<K>(g, (t + 1) % oracle::kRandomModes);
    CHECK(bits_equal(mc_mul(a, one), a));
    // (a + b) - b rounds twice; each rounding is within the envelope of the
    // larger operand's magnitude.
    const auto back = mc_sub(mc_add(a, b), b);
    const double scale = std::max(std::fabs(a.c[0]), std::fabs(b.c[0]));
    oracle::Mp diff(oracle::kWide);
    mpfr_sub(diff.get(), oracle::from_multicomp(back).get(), oracle::from_multicomp(a).get(),
             MPFR_RNDN);
    CHECK(std::fabs(mpfr_get_d(diff.get(), MPFR_RNDN)) <= 2 * props::op_bound<K>() * scale);
  }
}

TEST_CASE_TEMPLATE("comparison is a total order consistent with subtraction", T,
                   std::integral_constant<int, 2>, std::integral_constant<int, 3>,
                   std::integral_constant<int, 4>) {
  constexpr int K = T::value;
  std::mt19937_64 g(800 + K);
  std::vector<MultiComp<K>> v;
  for (int t = 0; t < 400; ++t) {
    auto a = oracle::random_multicomp<K>(g, t % oracle::kRandomModes, 4);
    v.push_back(a);
    if (t % 3 == 0) v.push_back(mc_add(a, from_binary64<K>(std::ldexp(a.c[0], -100))));
  }
  for (std::size_t i = 0; i < v.size(); i += 7) {
    for (std::size_t j = 0; j < v.size(); j += 3) {
      const auto c = mc_cmp(v[i], v[j]);
      const double d = mc_sub(v[i], v[j]).c[0];
      CHECK((c < 0) == (d < 0));
      CHECK((c == 0) == (d == 0));
      CHECK((mc_cmp(v[j], v[i]) < 0) == (c > 0));
      // Agrees with the exact values.
      const int exact = mpfr_cmp(oracle::from_multicomp(v[i]).get(),
                                 oracle::from_multicomp(v[j]).get());
      CHECK((c < 0) == (exact < 0));
    }
  }
}
