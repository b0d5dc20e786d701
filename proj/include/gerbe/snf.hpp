#ifndef GERBE_SNF_HPP
#define GERBE_SNF_HPP

#include <algorithm>
#include <set>
#include <vector>

#include "exponent.hpp"
#include "json.hpp"

namespace gerbe {

using IMat = std::vector<std::vector<int64_t>>;
using IVec = std::vector<int64_t>;

// Smith form over Z/p^M: P A Q = diag(p^{val[r]} u_r) with P, Q invertible.  val[r] = M for zero.
struct SNF {
  std::vector<int> val;
  IMat P, Q;
  int rank() const {
    int r = 0;
    for (int v : val) r += v < M ? 1 : 0;
    return r;
  }
  int M = 0;
};

inline IMat identity_mat(size_t n) {
  IMat I(n, IVec(n, 0));
  for (size_t i = 0; i < n; ++i) I[i][i] = 1;
  return I;
}

inline SNF smith(IMat A, uint32_t p, int M) {
  const int64_t m = padic::pw(p, M);
  const size_t rows = A.size(), cols = rows ? A[0].size() : 0;
  SNF s;
  s.M = M;
  s.P = identity_mat(rows);
  s.Q = identity_mat(cols);
  for (auto& r : A)
    for (auto& x : r) x = padic::mod(x, m);
  auto v = [&](int64_t x) { return x == 0 ? M : padic::vp(x, p); };
  size_t n = std::min(rows, cols);
  for (size_t t = 0; t < n; ++t) {
    int best = M;
    size_t bi = t, bj = t;
    for (size_t i = t; i < rows && best > 0; ++i)
      for (size_t j = t; j < cols; ++j) {
        int vv = v(A[i][j]);
        if (vv < best) {
          best = vv, bi = i, bj = j;
          if (best == 0) break;
        }
      }
    if (best >= M) {
      for (size_t r = t; r < n; ++r) s.val.push_back(M);
      break;
    }
    std::swap(A[t], A[bi]);
    std::swap(s.P[t], s.P[bi]);
    if (bj != t) {
      for (auto& r : A) std::swap(r[t], r[bj]);
      for (auto& r : s.Q) std::swap(r[t], r[bj]);
    }
    int64_t pv = padic::pw(p, best);
    int64_t uinv = padic::inv(A[t][t] / pv, m);
    for (size_t i = t + 1; i < rows; ++i) {
      if (A[i][t] == 0) continue;
      int64_t f = padic::mulmod(A[i][t] / pv, uinv, m);
      for (size_t j = t; j < cols; ++j) A[i][j] = padic::mod(A[i][j] - padic::mulmod(f, A[t][j], m), m);
      for (size_t j = 0; j < rows; ++j) s.P[i][j] = padic::mod(s.P[i][j] - padic::mulmod(f, s.P[t][j], m), m);
    }
    for (size_t j = t + 1; j < cols; ++j) {
      if (A[t][j] == 0) continue;
      int64_t f = padic::mulmod(A[t][j] / pv, uinv, m);
      for (size_t i = 0; i < rows; ++i) A[i][j] = padic::mod(A[i][j] - padic::mulmod(f, A[i][t], m), m);
      for (size_t i = 0; i < cols; ++i) s.Q[i][j] = padic::mod(s.Q[i][j] - padic::mulmod(f, s.Q[i][t], m), m);
    }
    s.val.push_back(best);
  }
  while (s.val.size() < n) s.val.push_back(M);
  return s;
}

// Additive map between finite abelian p-groups: source prod Z/p^{src[j]}, target prod Z/p^{tgt[k]},
// A[k][j] = k-th coordinate of the image of the j-th generator.
struct AdditiveMap {
  uint32_t p = 2;
  std::vector<int> src, tgt;
  IMat A;
  std::vector<nlohmann::json> src_label, tgt_label;

  int work_precision() const {
    int M = 1;
    for (int x : src) M = std::max(M, x);
    for (int x : tgt) M = std::max(M, x);
    return M + 1;
  }
  // p^{src[j]} A[k][j] = 0 mod p^{tgt[k]}
  bool well_defined() const {
    for (size_t k = 0; k < tgt.size(); ++k)
      for (size_t j = 0; j < src.size(); ++j) {
        int64_t x = A[k][j];
        if (x == 0 || tgt[k] == 0) continue;
        if (padic::vp(x, p) + src[j] < tgt[k]) return false;
      }
    return true;
  }
  IVec apply(const IVec& x) const {
    IVec y(tgt.size(), 0);
    for (size_t k = 0; k < tgt.size(); ++k) {
      int64_t m = padic::pw(p, tgt[k]);
      int64_t s = 0;
      for (size_t j = 0; j < src.size(); ++j) s = padic::mod(s + padic::mulmod(padic::mod(A[k][j], m), padic::mod(x[j], m), m), m);
      y[k] = s;
    }
    return y;
  }
};

inline int total_log(const std::vector<int>& v) {
  int s = 0;
  for (int x : v) s += x;
  return s;
}

// Elementary divisor exponents of coker f (nonzero ones, ascending).
inline std::vector<int> cokernel_divisors(const AdditiveMap& f) {
  const size_t K = f.tgt.size(), J = f.src.size();
  int M = f.work_precision();
  IMat R(K, IVec(J + K, 0));
  for (size_t k = 0; k < K; ++k) {
    for (size_t j = 0; j < J; ++j) R[k][j] = f.A[k][j];
    R[k][J + k] = padic::pw(f.p, f.tgt[k]);
  }
  std::vector<int> out;
  if (K == 0) return out;
  SNF s = smith(R, f.p, M);
  for (int v : s.val)
    if (v > 0) out.push_back(v);
  std::sort(out.begin(), out.end());
  return out;
}

inline int image_log_order(const AdditiveMap& f) { return total_log(f.tgt) - total_log(cokernel_divisors(f)); }
inline int kernel_log_order(const AdditiveMap& f) { return total_log(f.src) - image_log_order(f); }

// Generators of ker f as vectors in prod Z/p^{src[j]}.
inline std::vector<IVec> kernel_generators(const AdditiveMap& f) {
  const size_t K = f.tgt.size(), J = f.src.size();
  int M = f.work_precision();
  int64_t m = padic::pw(f.p, M);
  std::vector<IVec> gens;
  if (J == 0) return gens;
  IMat B(std::max<size_t>(K, 1), IVec(J, 0));
  for (size_t k = 0; k < K; ++k)
    for (size_t j = 0; j < J; ++j) B[k][j] = padic::mulmod(padic::pw(f.p, M - f.tgt[k]), padic::mod(f.A[k][j], m), m);
  SNF s = smith(B, f.p, M);
  for (size_t r = 0; r < J; ++r) {
    int vr = r < s.val.size() ? s.val[r] : M;
    int64_t scale = padic::pw(f.p, M - vr);
    IVec g(J);
    bool nz = false;
    for (size_t j = 0; j < J; ++j) {
      int64_t mj = padic::pw(f.p, f.src[j]);
      g[j] = padic::mod(padic::mulmod(s.Q[j][r], scale, m), mj);
      nz |= g[j] != 0;
    }
    if (nz) gens.push_back(g);
  }
  return gens;
}

// All elements of the subgroup generated by gens inside prod Z/p^{ord[j]}; throws past the cap.
inline std::vector<IVec> enumerate_subgroup(const std::vector<IVec>& gens, const std::vector<int>& ord, uint32_t p,
                                            size_t cap = 1u << 20) {
  std::set<IVec> S{IVec(ord.size(), 0)};
  for (auto& g : gens) {
    std::set<IVec> T = S;
    std::vector<IVec> frontier(S.begin(), S.end());
    while (!frontier.empty()) {
      std::vector<IVec> next;
      for (auto& x : frontier) {
        IVec y(x.size());
        for (size_t j = 0; j < x.size(); ++j) y[j] = padic::mod(x[j] + g[j], padic::pw(p, ord[j]));
        if (T.insert(y).second) {
          next.push_back(y);
          if (T.size() > cap) throw std::length_error("subgroup enumeration cap exceeded");
        }
      }
      frontier.swap(next);
    }
    S.swap(T);
  }
  return {S.begin(), S.end()};
}

// Abelian p-group type from |G[p^k]| for k = 1, 2, ...: returns exponents of cyclic factors, ascending.
inline std::vector<int> type_from_torsion_counts(const std::vector<int>& log_counts) {
  // log_counts[k-1] = log_p |G[p^k]|; number of factors of order >= p^k is the k-th difference
  std::vector<int> ge;
  int prev = 0;
  for (int c : log_counts) {
    ge.push_back(c - prev);
    prev = c;
  }
  std::vector<int> out;
  for (size_t k = 0; k < ge.size(); ++k) {
    int next = k + 1 < ge.size() ? ge[k + 1] : 0;
    for (int r = 0; r < ge[k] - next; ++r) out.push_back((int)k + 1);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace gerbe

#endif
