#include <gtest/gtest.h>

#include "gerbe/witt.hpp"

namespace gerbe {
namespace {

ExponentQ E(uint32_t p, uint64_t n, uint32_t k = 0) { return ExponentQ(p, n, k); }

// p=2, L=2: S_1 = a1 + b1 - a0 b0 (coefficients over Z; -1 = 1 mod 2)
TEST(Tables, SmallCasesMatchHandDerivation) {
  const auto& T = build_tables(2, 2);
  Poly a0 = Poly::var(4, 0), a1 = Poly::var(4, 1), b0 = Poly::var(4, 2), b1 = Poly::var(4, 3);
  EXPECT_EQ(T.S[0], a0 + b0);
  EXPECT_EQ(T.S[1], a1 + b1 - a0 * b0);
  EXPECT_EQ(T.P[0], a0 * b0);
  const auto& T3 = build_tables(3, 2);
  Poly c0 = Poly::var(4, 0), c1 = Poly::var(4, 1), d0 = Poly::var(4, 2), d1 = Poly::var(4, 3);
  EXPECT_EQ(T3.P[1], c0.pow(3) * d1 + c1 * d0.pow(3) + (c1 * d1).scale(3));
  const auto& T1 = build_tables(5, 1);
  EXPECT_EQ(T1.S[0], Poly::var(2, 0) + Poly::var(2, 1));
  EXPECT_THROW(compute_tables(2, 5), precision_error);
}

TEST(Tables, GhostIdentitiesSymbolic) {
  for (uint32_t p : {2u, 3u})
    for (int L : {2, 3}) {
      const auto& T = build_tables(p, L);
      std::vector<Poly> a, b;
      for (int i = 0; i < L; ++i) {
        a.push_back(Poly::var(2 * L, i));
        b.push_back(Poly::var(2 * L, L + i));
      }
      for (int j = 0; j < L; ++j) {
        EXPECT_EQ(ghost_poly(T.S, j, p), ghost_poly(a, j, p) + ghost_poly(b, j, p));
        EXPECT_EQ(ghost_poly(T.P, j, p), ghost_poly(a, j, p) * ghost_poly(b, j, p));
      }
    }
}

TEST(Tables, JsonCacheRoundTrip) {
  auto dir = std::filesystem::temp_directory_path() / "gerbe_table_cache_test";
  std::filesystem::remove_all(dir);
  auto T = compute_tables(3, 2);
  auto back = WittPolynomialTable::from_json(json::parse(T.to_json().dump()));
  EXPECT_EQ(back.S, T.S);
  EXPECT_EQ(back.P, T.P);
  EXPECT_EQ(back.F, T.F);
}

TEST(GhostOracle, RandomIntegerLifts) {
  std::mt19937_64 rng(7);
  for (uint32_t p : {2u, 3u})
    for (int L : {2, 3}) {
      const auto& T = build_tables(p, L);
      std::uniform_int_distribution<int> d(-20, 20);
      for (int it = 0; it < 60; ++it) {
        std::vector<bigint> a(L + 1), b(L);
        for (auto& x : a) x = d(rng);
        for (auto& x : b) x = d(rng);
        std::vector<bigint> aL(a.begin(), a.begin() + L);
        for (auto op : {WittOp::add, WittOp::mul, WittOp::ver})
          EXPECT_EQ(table_eval(op, aL, b, T), ghost_oracle(op, aL, b, p, L));
        EXPECT_EQ(table_eval(WittOp::frob, a, b, T), ghost_oracle(WittOp::frob, a, b, p, L));
      }
    }
}

TEST(WittPrimeField, FixedVectors) {
  auto F2 = make_prime_field(2);
  WittVector one = witt_one(F2, 2);
  WittVector s = witt_add(one, one);
  EXPECT_TRUE(s[0].is_zero());
  EXPECT_EQ(s[1], GradedElement::constant(F2, 1));

  auto F3 = make_prime_field(3);
  WittVector t1 = teichmuller(GradedElement::constant(F3, 1), 2), t2 = teichmuller(GradedElement::constant(F3, 2), 2);
  EXPECT_TRUE(witt_add(t1, t2).is_zero());

  WittVector v1 = verschiebung_W(one);
  EXPECT_TRUE(v1[0].is_zero());
  EXPECT_EQ(v1[1], GradedElement::constant(F2, 1));
  EXPECT_EQ(frobenius_W(v1), witt_scalar(one, 2));
  EXPECT_TRUE(witt_add(one, witt_one(F2, 2)) == witt_scalar(one, 2));
}

TEST(WittPrimeField, IsomorphicToIntegersModPowers) {
  for (uint32_t p : {2u, 3u})
    for (int L : {2, 3}) {
      auto F = make_prime_field(p);
      int64_t m = padic::pw(p, L);
      for (int64_t x = 0; x < m; ++x)
        for (int64_t y = 0; y < m; y += 3) {
          auto u = homogeneous_vector(F, E(p, 0), x, L), v = homogeneous_vector(F, E(p, 0), y, L);
          EXPECT_EQ(homogeneous_coefficient(witt_add(u, v), E(p, 0)), (x + y) % m);
          EXPECT_EQ(homogeneous_coefficient(witt_mul(u, v), E(p, 0)), (x * y) % m);
        }
    }
}

TEST(WittGraded, TeichmullerScaling) {
  auto R = make_ring(2, 1, std::nullopt, 6);
  auto x = [&](uint64_t n, uint32_t k) { return GradedElement::monomial(R, E(2, n, k)); };
  WittVector a(R, {x(1, 2) + x(1, 1), x(3, 2)});
  WittVector t = teichmuller(x(1, 1), 2);
  WittVector prod = witt_mul(t, a);
  EXPECT_EQ(prod[0], x(1, 1) * a[0]);
  EXPECT_EQ(prod[1], x(1, 0) * a[1]);
  EXPECT_EQ(witt_mul(witt_one(R, 2), a), a);
}

class WittLaws : public ::testing::TestWithParam<std::tuple<uint32_t, int>> {};

TEST_P(WittLaws, FVProjectionAndMultiplicativity) {
  auto [p, L] = GetParam();
  auto R = make_ring(p, 1, E(p, 2), 3);
  auto basis = weight_window(R, E(p, 1));
  std::mt19937_64 rng(99 + p + L);
  auto rnd = [&] {
    std::vector<GradedElement> c;
    for (int i = 0; i < L; ++i) c.push_back(random_element(R, basis, rng, 2));
    return WittVector(R, c);
  };
  WittVector pp = witt_scalar(witt_one(R, L), p);
  for (int it = 0; it < 40; ++it) {
    auto u = rnd(), v = rnd();
    EXPECT_EQ(frobenius_W(verschiebung_W(u)), witt_mul(pp, u));
    EXPECT_EQ(verschiebung_W(frobenius_W(u)), witt_mul(pp, u));
    EXPECT_EQ(frobenius_W(witt_mul(u, v)), witt_mul(frobenius_W(u), frobenius_W(v)));
    EXPECT_EQ(verschiebung_W(witt_mul(frobenius_W(u), v)), witt_mul(u, verschiebung_W(v)));
    EXPECT_EQ(frobenius_W(u), frobenius_W_table(u));
    EXPECT_TRUE(witt_add(u, witt_neg(u)).is_zero());
  }
}

TEST_P(WittLaws, VnProjectionFormula) {
  auto [p, L] = GetParam();
  auto R = make_ring(p, 1, E(p, 2), 3);
  auto basis = weight_window(R, E(p, 1));
  std::mt19937_64 rng(5 + p * L);
  for (int it = 0; it < 50; ++it) {
    std::vector<GradedElement> ca, cb;
    for (int i = 0; i < L; ++i) {
      ca.push_back(random_element(R, basis, rng, 2));
      cb.push_back(random_element(R, basis, rng, 2));
    }
    WittVector a(R, ca), b(R, cb);
    for (int n = 1; n < L; ++n) {
      WittVector Vna = a, Fnb = b;
      for (int i = 0; i < n; ++i) {
        Vna = verschiebung_W(Vna);
        Fnb = frobenius_W(Fnb);
      }
      WittVector rhs = witt_mul(a, Fnb);
      for (int i = 0; i < n; ++i) rhs = verschiebung_W(rhs);
      EXPECT_EQ(witt_mul(Vna, b), rhs);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Witt, WittLaws,
                         ::testing::Values(std::make_tuple(2u, 2), std::make_tuple(2u, 3), std::make_tuple(3u, 2),
                                           std::make_tuple(3u, 3)));

TEST(WittGraded, WeightDiscipline) {
  auto R = make_ring(2, 1, E(2, 1), 4);
  auto u = homogeneous_vector(R, E(2, 1, 3), 5, 3);
  EXPECT_TRUE(u.respects_weight());
  auto v = homogeneous_vector(R, E(2, 1, 3), 3, 3);
  EXPECT_TRUE(witt_add(u, v).respects_weight());
  EXPECT_TRUE(witt_mul(u, v).respects_weight());
  EXPECT_EQ(*witt_mul(u, v).weight(), E(2, 1, 2));
  EXPECT_TRUE(frobenius_W(u).respects_weight());
  EXPECT_TRUE(verschiebung_W(u).respects_weight());
  EXPECT_THROW(verschiebung_W(homogeneous_vector(R, E(2, 1, 4), 1, 2)), precision_error);
}

TEST(HatIdeal, BasisWithinWindow) {
  auto R = make_ring(2, 1, E(2, 1), 2);
  auto I = kernel_of_frobenius_power(R, 1);
  auto win = window_weights(2, 2, E(2, 1));
  auto basis = hat_ideal(I, R, win, 2);
  int pos0 = 0, pos1 = 0;
  for (auto& e : basis) {
    EXPECT_TRUE(e.vec.respects_weight());
    if (e.position == 0) ++pos0;
    else ++pos1;
  }
  EXPECT_EQ(pos0, 2);  // [x^{1/2}], [x^{3/4}]
  EXPECT_EQ(pos1, 1);  // V[x^{1/2}] of weight 1/4
  EXPECT_TRUE(hat_ideal(zero_ideal(), R, win, 2).empty());
}

}  // namespace
}  // namespace gerbe
