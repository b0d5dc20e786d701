#include <gtest/gtest.h>

#include "gerbe/crys.hpp"

namespace gerbe {
namespace {

Weight E(uint32_t p, uint64_t n, uint32_t k = 0) { return Weight(p, n, k); }

PDExpr random_expr(uint32_t p, std::mt19937_64& rng) {
  PDExpr ex;
  int terms = 1 + rng() % 3;
  for (int t = 0; t < terms; ++t) {
    PDTerm term;
    term.coeff = 1 + rng() % 7;
    term.s = Weight(p, rng() % (2 * p * p), 1);
    int g = rng() % 3;
    for (int k = 0; k < g; ++k) term.gammas.push_back(rng() % (p * p + 2));
    ex.push_back(term);
  }
  return ex;
}

TEST(PD, XiSquaredIsTwoGammaTwo) {
  PDEngine P(2, E(2, 1), 6);
  PDElement xi = P.teich(E(2, 1));
  PDElement sq = P.mul(xi, xi);
  ASSERT_EQ(sq.t.size(), 1u);
  auto& [mo, v] = *sq.t.begin();
  EXPECT_EQ(mo.b, E(2, 0));
  EXPECT_EQ(mo.e, std::vector<uint32_t>({1}));
  EXPECT_EQ(v, 2);  // vanishes mod 2
  EXPECT_EQ(P.gamma(2), P.basis(E(2, 2)));
}

TEST(PD, DeltaCarries) {
  PDEngine P(2, E(2, 1), 6);
  PDElement d1 = P.gamma(2);
  // delta_1^2 = (4!/2!^2) delta_2 = 6 delta_2
  EXPECT_EQ(P.mul(d1, d1), P.scale(P.gamma(4), 6));
  PDEngine Q(3, E(3, 1), 5);
  PDElement e1 = Q.gamma(3);
  // delta_1^3 = 9!/(3!)^3 delta_2 = 1680 delta_2
  EXPECT_EQ(Q.mul(Q.mul(e1, e1), e1), Q.scale(Q.gamma(9), 1680));
}

TEST(PD, NormalFormIdempotent) {
  std::mt19937_64 rng(11);
  for (uint32_t p : {2u, 3u}) {
    PDEngine P(p, E(p, 1), 6);
    for (int it = 0; it < 100; ++it) {
      PDElement x = P.normal_form(random_expr(p, rng));
      EXPECT_EQ(P.renormalize(x), x);
    }
  }
}

TEST(PD, OracleSoundness) {
  std::mt19937_64 rng(7);
  int checked = 0;
  for (uint32_t p : {2u, 3u})
    for (const Weight& c : {E(p, 1), Weight(p, p + 1, 1)}) {
      PDEngine P(p, c, 7);
      for (int it = 0; it < 150; ++it) {
        PDExpr ex = random_expr(p, rng);
        json w;
        ASSERT_TRUE(oracle_agrees(oracle_value(P, P.normal_form(ex)), oracle_value(ex, p, c), P, &w)) << w.dump();
        ++checked;
      }
    }
  EXPECT_GE(checked, 300);
}

TEST(PD, FrobeniusAgainstOracle) {
  std::mt19937_64 rng(3);
  for (uint32_t p : {2u, 3u}) {
    PDEngine P(p, E(p, 1), 7);
    for (int it = 0; it < 60; ++it) {
      PDExpr ex = random_expr(p, rng);
      // phi on the oracle side: x^a -> x^{pa}, rational coefficients fixed
      RatValue want;
      for (auto& [w, q] : oracle_value(ex, p, E(p, 1))) rat_add(want, w.times_p(), q);
      json wit;
      EXPECT_TRUE(oracle_agrees(oracle_value(P, P.phi(P.normal_form(ex))), want, P, &wit)) << wit.dump();
    }
  }
}

TEST(PD, DividedFrobeniusOfXi) {
  for (uint32_t p : {2u, 3u, 5u}) {
    PDEngine P(p, E(p, 1), 5);
    PDElement got = P.divided_frobenius(P.gamma(1));
    EXPECT_EQ(got, P.scale(P.gamma(p), padic::to_res(padic::factorial(p - 1), P.modulus())));
  }
  PDEngine P(2, E(2, 1), 5);
  EXPECT_THROW(P.divided_frobenius(P.teich(Weight(2, 1, 1))), std::domain_error);
}

// ---- the crystalline diagram ----

class CrysDiagram : public ::testing::TestWithParam<std::tuple<uint32_t, int>> {};

TEST_P(CrysDiagram, FramesAndHoms) {
  auto [p, n] = GetParam();
  auto S = CrysSetup::make(p, n, E(p, 1), 2, E(p, 2));
  auto C = build_crys(S);
  auto W = S.window();
  for (auto F : {C.Acrys, C.An, C.Bn, C.W, C.Wn, C.sW}) {
    auto rep = validate_frame(*F, W);
    EXPECT_TRUE(rep.pass()) << F->name() << " " << rep.to_json().dump();
  }
  for (auto* H : {&C.rho, &C.rho_tilde, &C.rho_n, &C.pi_n, &C.pibar_n, &C.srho, &C.spibar_n, &C.kappa, &C.kappa_n}) {
    auto rep = validate_hom(*H, W);
    EXPECT_TRUE(rep.pass()) << H->name << " " << rep.to_json().dump();
  }
  for (auto* K : {&C.N, &C.Nn, &C.Nbar, &C.sNn, &C.WJ, &C.WJhat}) {
    auto rep = validate_ideal(*K, W);
    EXPECT_TRUE(rep.pass()) << K->name << " " << rep.to_json().dump();
  }
}

TEST_P(CrysDiagram, ExactSequences) {
  auto [p, n] = GetParam();
  auto S = CrysSetup::make(p, n, E(p, 1), 2, E(p, 2));
  auto C = build_crys(S);
  auto R = exact_sequence_reports(C, S.window());
  EXPECT_TRUE(R.report.pass()) << R.report.to_json().dump();
}

TEST_P(CrysDiagram, LeveledIdeals) {
  auto [p, n] = GetParam();
  auto S = CrysSetup::make(p, n, E(p, 1), 2, E(p, 2));
  auto C = build_crys(S);
  auto W = S.window();
  auto Ln = leveled_data(C.Nn, W);
  EXPECT_TRUE(Ln.leveled) << Ln.to_json().dump();
  auto Ls = leveled_data(C.sNn, W);
  EXPECT_TRUE(Ls.leveled) << Ls.to_json().dump();
  EXPECT_TRUE(Ls.nilpotent_mod_p) << Ls.to_json().dump();
}

TEST_P(CrysDiagram, TheoremC) {
  auto [p, n] = GetParam();
  auto S = CrysSetup::make(p, n, E(p, 1), 2, E(p, 2));
  auto C = build_crys(S);
  auto rep = theoremC_compare(C, S.window(0, 1));
  EXPECT_TRUE(rep.pass) << rep.to_json().dump();
}

INSTANTIATE_TEST_SUITE_P(Small, CrysDiagram,
                         ::testing::Values(std::make_tuple(2u, 1), std::make_tuple(2u, 2), std::make_tuple(3u, 1)));

TEST(Crys, RhoKillsDividedPowers) {
  auto S = CrysSetup::make(2, 1, E(2, 1), 3, E(2, 2));
  auto C = build_crys(S);
  for (uint64_t m = 1; m <= 6; ++m) EXPECT_TRUE(rho_of(C, C.pd->gamma(m)).is_zero()) << m;
  FElem r = rho_of(C, C.pd->teich(Weight(2, 1, 1)));
  EXPECT_EQ(r.at(Weight(2, 1, 1)), 1);
}

// kappa o F = phi o kappa through Witt vector arithmetic of the perfect ring
TEST(Crys, KappaIntertwinesFrobenius) {
  const uint32_t p = 2;
  auto S = CrysSetup::make(p, 1, E(p, 1), 3, E(p, 2));
  auto C = build_crys(S);
  RingHandle R = make_ring(p, 1, std::nullopt, 4);
  std::mt19937_64 rng(9);
  for (int it = 0; it < 50; ++it) {
    Weight a(p, rng() % 24, 3);
    int64_t lam = 1 + rng() % 31;
    WittVector v = homogeneous_vector(R, a, lam, 4);
    WittVector fv = frobenius_W(v);
    int64_t lam_f = homogeneous_coefficient(fv, a.times_p());
    PDElement lhs = C.pd->teich(a.times_p(), lam_f);
    PDElement rhs = C.pd->phi(C.pd->teich(a, lam));
    // agreement mod p^4, the Witt length
    PDElement d = C.pd->add(lhs, C.pd->scale(rhs, -1));
    for (auto& [mo, c] : d.t) EXPECT_EQ(c % 16, 0) << a.str();
    // and kappa as a frame scalar: [x^a] = D_a beta_a
    FElem k = C.kappa.apply(fe::gen(*C.Wflat, 0, a, lam));
    EXPECT_EQ(felem_to_pd(C, k), C.pd->teich(a, lam));
  }
}

TEST(Crys, NilMembership) {
  auto S = CrysSetup::make(2, 1, E(2, 1), 3, E(2, 2));
  auto C = build_crys(S);
  // [x^{3/2}] lies in N (rho kills it) and is sigma-dot nilpotent
  auto r = n_nil_membership(C, C.pd->teich(Weight(2, 3, 1)));
  EXPECT_TRUE(r.is_nilpotent);
  EXPECT_THROW(n_nil_membership(C, C.pd->teich(Weight(2, 1, 1))), std::domain_error);
}

TEST(Crys, SetupErrors) {
  EXPECT_THROW(CrysSetup::make(4, 1, E(2, 1), 3, E(2, 2)), std::invalid_argument);
  EXPECT_THROW(CrysSetup::make(2, 0, E(2, 1), 3, E(2, 2)), std::invalid_argument);
  EXPECT_THROW(CrysSetup::make(2, 1, Weight(2, 1, 1), 3, E(2, 2)), std::invalid_argument);
  auto S = CrysSetup::make(2, 1, E(2, 1), 3, E(2, 2));
  EXPECT_THROW(S.window(-1, 5), precision_error);
}

}  // namespace
}  // namespace gerbe
