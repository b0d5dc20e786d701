#include <gtest/gtest.h>

#include "gerbe/rings.hpp"

namespace gerbe {
namespace {

ExponentQ E(uint32_t p, uint64_t n, uint32_t k = 0) { return ExponentQ(p, n, k); }

TEST(ExponentQ, CanonicalForm) {
  EXPECT_EQ(E(2, 4, 3), E(2, 1, 1));
  EXPECT_EQ(E(2, 4, 3).str(), "1/2^1");
  EXPECT_EQ(E(3, 0, 5).k(), 0u);
  EXPECT_EQ(ExponentQ::parse(2, "3/2^2"), E(2, 3, 2));
  EXPECT_EQ(ExponentQ::parse(3, "2/9"), E(3, 2, 2));
  EXPECT_THROW(ExponentQ::parse(2, "1/3"), std::invalid_argument);
}

TEST(ExponentQ, ExactArithmetic) {
  EXPECT_EQ(E(2, 1, 2) + E(2, 1, 2), E(2, 1, 1));
  EXPECT_EQ(E(3, 1, 1).times_p(), E(3, 1));
  EXPECT_LT(E(2, 3, 2), E(2, 1));
  EXPECT_EQ(E(2, 7, 2).floor_div(E(2, 1, 1)), 3u);
  EXPECT_EQ(witt_depth(E(2, 1, 2), E(2, 1), 99), 2);
  EXPECT_EQ(witt_depth(E(2, 0), E(2, 1), 99), 99);
}

TEST(MakeRing, DefiningInstances) {
  auto R = make_ring(2, 1, E(2, 1), 6);
  EXPECT_TRUE(R.semiperfect());
  EXPECT_EQ(R.kind, RingKind::monogenic_qrsp);
  auto P = make_ring(3, 1, std::nullopt, 6);
  EXPECT_TRUE(P.perfect());
  EXPECT_THROW(make_ring(2, 1, E(2, 1, 1), 6), std::invalid_argument);
  EXPECT_THROW(make_ring(2, 1, E(2, 3, 3), 2), std::invalid_argument);
  EXPECT_THROW(make_ring(4, 1, E(2, 1), 2), std::invalid_argument);
  EXPECT_EQ(RingHandle::from_json(R.to_json()), R);
}

TEST(Frobenius, Examples) {
  auto R = make_ring(2, 1, E(2, 1), 6);
  auto x = [&](uint64_t n, uint32_t k) { return GradedElement::monomial(R, E(2, n, k)); };
  EXPECT_TRUE(frobenius(x(1, 1)).is_zero());
  EXPECT_EQ(frobenius(x(1, 2) + x(1, 1)), x(1, 1));
  EXPECT_EQ(frobenius(GradedElement::constant(R, 1)), GradedElement::constant(R, 1));
}

TEST(KernelOfFrobenius, Thresholds) {
  EXPECT_EQ(*kernel_of_frobenius_power(make_ring(2, 1, E(2, 1), 6), 1).threshold, E(2, 1, 1));
  EXPECT_EQ(*kernel_of_frobenius_power(make_ring(3, 1, E(3, 1), 6), 2).threshold, E(3, 1, 2));
  EXPECT_TRUE(kernel_of_frobenius_power(make_ring(2, 1, E(2, 1), 6), 0).is_zero());
}

TEST(KernelOfFrobenius, ExactPowerOnThreshold) {
  for (uint32_t p : {2u, 3u})
    for (int m = 1; m <= 3; ++m) {
      auto R = make_ring(p, 1, E(p, 1), 6);
      auto I = kernel_of_frobenius_power(R, m);
      auto g = GradedElement::monomial(R, *I.threshold);
      GradedElement f = g;
      for (int i = 0; i < m - 1; ++i) f = frobenius(f);
      EXPECT_FALSE(f.is_zero()) << "F^" << m - 1 << " kills the threshold, p=" << p;
      EXPECT_TRUE(frobenius(f).is_zero());
    }
}

TEST(WeightWindow, Enumeration) {
  auto R = make_ring(2, 1, E(2, 1), 2);
  auto w = weight_window(R, E(2, 1));
  std::vector<ExponentQ> want{E(2, 0), E(2, 1, 2), E(2, 1, 1), E(2, 3, 2)};
  EXPECT_EQ(w, want);
  EXPECT_EQ(weight_window(R, E(2, 0)).size(), 1u);
  auto P = make_ring(3, 1, std::nullopt, 1);
  auto wp = weight_window(P, E(3, 1));
  std::vector<ExponentQ> wantp{E(3, 0), E(3, 1, 1), E(3, 2, 1), E(3, 1)};
  EXPECT_EQ(wp, wantp);
}

TEST(Precision, DenominatorCapRaises) {
  auto R = make_ring(2, 1, E(2, 1), 2);
  EXPECT_THROW(GradedElement::monomial(R, E(2, 1, 3)), precision_error);
}

class RingLaws : public ::testing::TestWithParam<std::tuple<uint32_t, int, bool>> {};

TEST_P(RingLaws, FrobeniusHomomorphismAndAxioms) {
  auto [p, n, cut] = GetParam();
  auto R = make_ring(p, n, cut ? std::optional<ExponentQ>(E(p, 1)) : std::nullopt, 3);
  auto basis = weight_window(R, E(p, 2));
  std::mt19937_64 rng(1234 + p * 10 + n);
  for (int it = 0; it < 200; ++it) {
    auto a = random_element(R, basis, rng), b = random_element(R, basis, rng), c = random_element(R, basis, rng);
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ(a + (b - b), a);
    if (n == 1) {
      EXPECT_EQ(frobenius(a * b), frobenius(a) * frobenius(b));
      EXPECT_EQ(frobenius(a + b), frobenius(a) + frobenius(b));
      EXPECT_EQ(frobenius(a), a.pow(p));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Rings, RingLaws,
                         ::testing::Values(std::make_tuple(2u, 1, true), std::make_tuple(3u, 1, true),
                                           std::make_tuple(2u, 1, false), std::make_tuple(3u, 2, true)));

TEST(Semiperfect, FrobeniusSurjectiveOnClosedWindow) {
  for (uint32_t p : {2u, 3u}) {
    auto R = make_ring(p, 1, E(p, 1), 3);
    // window closed under a -> a/p: exponents with denominator <= p^2, preimages use p^3
    for (auto& a : weight_window(make_ring(p, 1, E(p, 1), 2), E(p, 1))) {
      auto pre = GradedElement::monomial(R, a.div_p());
      EXPECT_EQ(frobenius(pre), GradedElement::monomial(R, a));
    }
  }
}

TEST(Serialization, ElementRoundTrip) {
  auto R = make_ring(3, 2, E(3, 1), 4);
  auto e = GradedElement::monomial(R, E(3, 2, 2), 5) + GradedElement::constant(R, 7);
  auto j = e.to_json();
  EXPECT_EQ(j.dump(), R"([["0",7],["2/3^2",5]])");
  EXPECT_EQ(GradedElement::from_json(R, j), e);
}

}  // namespace
}  // namespace gerbe
