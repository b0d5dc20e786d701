#include <gtest/gtest.h>

#include "gerbe/crys.hpp"

namespace gerbe {
namespace {

Weight E(uint32_t p, uint64_t n, uint32_t k = 0) { return Weight(p, n, k); }

TEST(WittFrame, PerfectFrameAxioms) {
  for (uint32_t p : {2u, 3u}) {
    auto F = witt_perfect_frame(p, 6);
    auto rep = validate_frame(*F, make_window(p, 2, E(p, 2)));
    EXPECT_TRUE(rep.pass()) << rep.to_json().dump();
  }
}

TEST(WittFrame, TruncatedFrameAxioms) {
  auto S = CrysSetup::make(2, 1, E(2, 1), 3, E(2, 2));
  auto C = build_crys(S);
  auto W = S.window();
  for (auto F : {C.W, C.Wn, C.WRn, C.sW}) {
    auto rep = validate_frame(*F, W);
    EXPECT_TRUE(rep.pass()) << F->name() << " " << rep.to_json().dump();
  }
}

// Killing the Frobenius lift on degree 0 is caught at the first weight where x^a -> x^{pa} matters.
TEST(WittFrame, SabotagedSigmaIsRejected) {
  auto F = std::make_shared<SabotagedSigmaFrame>(witt_perfect_frame(2, 5));
  auto rep = validate_frame(*F, make_window(2, 1, E(2, 1), -1, 1));
  ASSERT_FALSE(rep.pass());
  const Check* c = rep.find("frobenius_lift");
  ASSERT_NE(c, nullptr);
  EXPECT_FALSE(c->pass);
  EXPECT_EQ(c->witness.at("weight").get<std::string>(), "1/2^1");
}

TEST(WittFrame, DegreeOneMatchesVerschiebung) {
  // lambda V[x^{pa}] in W(R^flat) against the frame generator g_{1,a}: sigma_1 = V^{-1} followed by F,
  // so sigma_1(g_{1,a}) = [x^{pa}] and t.g_{1,a} = p[x^a] = V F [x^a]
  const uint32_t p = 2;
  RingHandle R = make_ring(p, 1, std::nullopt, 4);
  auto F = witt_perfect_frame(p, 4);
  std::mt19937_64 rng(5);
  for (int it = 0; it < 50; ++it) {
    Weight a(p, rng() % 16, 3);
    int64_t lam = 1 + rng() % 15;
    WittVector v = verschiebung_W(homogeneous_vector(R, a.times_p(), lam, 4));
    WittVector pv = witt_scalar(homogeneous_vector(R, a, lam, 4), p);
    // t g_{1,a} = p g_{0,a} and tau_1 = p: both match V[x^{pa}] = p[x^a]
    EXPECT_EQ(homogeneous_coefficient(v, a), homogeneous_coefficient(pv, a));
    EXPECT_EQ(F->t_map(1, a) % 16, 2);
    EXPECT_EQ(F->tau(1, a) % 16, 2);
  }
}

TEST(Ideals, PowerIdealsAndZero) {
  auto S = CrysSetup::make(2, 1, E(2, 1), 3, E(2, 2));
  auto C = build_crys(S);
  auto W = S.window();
  EXPECT_TRUE(validate_ideal(FrameIdeal::ppow(C.W, 1), W).pass());
  EXPECT_TRUE(validate_ideal(FrameIdeal::zero(C.W), W).pass());
  auto q = quotient_frame(FrameIdeal::ppow(C.W, 2), W, "W_2");
  EXPECT_TRUE(q.frame_report.pass()) << q.frame_report.to_json().dump();
  EXPECT_TRUE(q.projection_report.pass());
}

TEST(Ideals, NonStableIdealRejected) {
  auto F = witt_perfect_frame(2, 5);
  // kills degree 0 only at weight 0: not stable under sigma (a=0 -> 0 fine) nor absorbing
  FrameIdeal bad{"bad", F, [](int i, const Weight& a) { return (i == 0 && a.is_zero()) ? 1 : 0; }};
  EXPECT_THROW(quotient_frame(bad, make_window(2, 1, E(2, 1)), "bad"), std::invalid_argument);
}

TEST(Leveled, ZeroIdealVacuous) {
  auto F = witt_perfect_frame(2, 6);
  auto L = leveled_data(FrameIdeal::zero(F), make_window(2, 2, E(2, 2)));
  EXPECT_TRUE(L.leveled);
  EXPECT_TRUE(L.nilpotent_mod_p);
  EXPECT_EQ(sigma_dot_coeff(FrameIdeal::zero(F), E(2, 1)), 0);
}

// W(R[F]) in W(R): V[x] = 0 while [x^{1/2}] survives, so tau_1 is not onto K_0 at weight 1/2
TEST(Leveled, FrobeniusKernelIdealNotLeveled) {
  auto S = CrysSetup::make(2, 1, E(2, 1), 3, E(2, 2));
  auto C = build_crys(S);
  auto L = leveled_data(C.WJ, S.window());
  EXPECT_FALSE(L.leveled);
  EXPECT_EQ(L.level_witness.at("weight").get<std::string>(), "1/2^1");
}

// pA in the Witt frame of a perfect ring is not leveled: tau_1(pA_1) = p^2 A_0
TEST(Leveled, PAOfPerfectFrameNotLeveled) {
  auto F = witt_perfect_frame(2, 6);
  auto L = leveled_data(FrameIdeal::ppow(F, 1), make_window(2, 1, E(2, 1), 0, 1));
  EXPECT_FALSE(L.leveled);
  EXPECT_THROW(sigma_dot_coeff(FrameIdeal::ppow(F, 1), E(2, 1)), std::domain_error);
}

TEST(FrameElems, ArithmeticLaws) {
  auto F = witt_perfect_frame(3, 5);
  auto ws = window_weights(3, 1, E(3, 1));
  std::mt19937_64 rng(2);
  for (int it = 0; it < 40; ++it) {
    FElem x = fe::random(*F, -1, ws, rng), y = fe::random(*F, 0, ws, rng), z = fe::random(*F, 1, ws, rng);
    EXPECT_EQ(fe::mul(*F, fe::mul(*F, x, y), z), fe::mul(*F, x, fe::mul(*F, y, z)));
    EXPECT_EQ(fe::sigma(*F, fe::mul(*F, x, y)), fe::mul(*F, fe::sigma(*F, x), fe::sigma(*F, y)));
    EXPECT_EQ(fe::tau_inv(*F, fe::tau(*F, x), -1), x);
  }
}

}  // namespace
}  // namespace gerbe
