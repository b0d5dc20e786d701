#include <gtest/gtest.h>

#include <random>

#include "gerbe/snf.hpp"

namespace gerbe {
namespace {

TEST(SNF, SmallHandCases) {
  AdditiveMap f{2, {2}, {2}, {{2}}, {}, {}};
  EXPECT_EQ(cokernel_divisors(f), std::vector<int>({1}));
  EXPECT_EQ(kernel_log_order(f), 1);
  auto g = kernel_generators(f);
  auto all = enumerate_subgroup(g, f.src, 2);
  EXPECT_EQ(all.size(), 2u);
  // Z/9 -> Z/3 x Z/9, x -> (x, 3x)
  AdditiveMap h{3, {2}, {1, 2}, {{1}, {3}}, {}, {}};
  EXPECT_TRUE(h.well_defined());
  EXPECT_EQ(kernel_log_order(h), 1);  // {0, 3, 6}
  EXPECT_EQ(cokernel_divisors(h), std::vector<int>({2}));  // (0,1) has order 9 modulo (1,3)
}

TEST(SNF, TransformsReproduceDiagonal) {
  std::mt19937_64 rng(4);
  for (int it = 0; it < 30; ++it) {
    const uint32_t p = it % 2 ? 3 : 2;
    const int M = 4;
    const int64_t m = padic::pw(p, M);
    size_t r = 1 + rng() % 4, c = 1 + rng() % 4;
    IMat A(r, IVec(c));
    for (auto& row : A)
      for (auto& x : row) x = (int64_t)(rng() % m) * (rng() % 2 ? 1 : (int64_t)p);
    SNF s = smith(A, p, M);
    // P A Q is diagonal with the reported valuations
    for (size_t i = 0; i < r; ++i)
      for (size_t j = 0; j < c; ++j) {
        int64_t v = 0;
        for (size_t k = 0; k < r; ++k)
          for (size_t l = 0; l < c; ++l)
            v = padic::mod(v + padic::mulmod(padic::mulmod(s.P[i][k], padic::mod(A[k][l], m), m), s.Q[l][j], m), m);
        if (i != j) EXPECT_EQ(v, 0);
        else EXPECT_EQ(v == 0 ? M : padic::vp(v, p), s.val[i]);
      }
  }
}

// brute force over the whole source group
TEST(SNF, KernelAndCokernelAgainstEnumeration) {
  std::mt19937_64 rng(8);
  for (int it = 0; it < 60; ++it) {
    const uint32_t p = it % 3 ? 2 : 3;
    AdditiveMap f;
    f.p = p;
    size_t J = 1 + rng() % 3, K = 1 + rng() % 3;
    for (size_t j = 0; j < J; ++j) f.src.push_back(1 + rng() % 3);
    for (size_t k = 0; k < K; ++k) f.tgt.push_back(1 + rng() % 3);
    f.A.assign(K, IVec(J, 0));
    for (size_t k = 0; k < K; ++k)
      for (size_t j = 0; j < J; ++j) {
        // scale into a well-defined entry
        int need = std::max(0, f.tgt[k] - f.src[j]);
        f.A[k][j] = padic::pw(p, need) * (int64_t)(rng() % padic::pw(p, f.tgt[k]));
      }
    ASSERT_TRUE(f.well_defined());
    std::vector<IVec> unit;
    for (size_t j = 0; j < J; ++j) {
      IVec e(J, 0);
      e[j] = 1;
      unit.push_back(e);
    }
    auto all = enumerate_subgroup(unit, f.src, p);
    std::set<IVec> img;
    size_t ker = 0;
    for (auto& x : all) {
      IVec y = f.apply(x);
      img.insert(y);
      bool z = std::all_of(y.begin(), y.end(), [](int64_t v) { return v == 0; });
      ker += z;
    }
    EXPECT_EQ(padic::pw(p, kernel_log_order(f)), (int64_t)ker);
    EXPECT_EQ(padic::pw(p, image_log_order(f)), (int64_t)img.size());
    auto kg = enumerate_subgroup(kernel_generators(f), f.src, p);
    EXPECT_EQ(kg.size(), ker);
    for (auto& x : kg) {
      IVec y = f.apply(x);
      EXPECT_TRUE(std::all_of(y.begin(), y.end(), [](int64_t v) { return v == 0; }));
    }
  }
}

TEST(SNF, GroupTypeFromTorsionCounts) {
  // Z/2 x Z/8: |G[2]| = 4, |G[4]| = 8, |G[8]| = 16
  EXPECT_EQ(type_from_torsion_counts({2, 3, 4}), std::vector<int>({1, 3}));
  EXPECT_EQ(type_from_torsion_counts({3, 3}), std::vector<int>({1, 1, 1}));
  EXPECT_TRUE(type_from_torsion_counts({}).empty());
}

}  // namespace
}  // namespace gerbe
