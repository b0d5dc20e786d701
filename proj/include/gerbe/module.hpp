#ifndef GERBE_MODULE_HPP
#define GERBE_MODULE_HPP

#include "gmat.hpp"

namespace gerbe {

// Free graded module M = sum_j A e_j with e_j in degree degs[j], so M_i = sum_j A_{i - degs[j]}.
// The structure map F: M^sigma -> M^tau sends e_j^sigma to sum_k Fmat(k, j) e_k^tau (Fmat over A_0).
struct FrameModule {
  FramePtr A;
  std::vector<int> degs;
  GMat Fmat;
  std::string name = "M";

  size_t rank() const { return degs.size(); }
  // window: F bijective on M^sigma -> M^tau
  bool is_window() const {
    try {
      gm::inverse0(*A, Fmat);
      return true;
    } catch (const std::domain_error&) {
      return false;
    }
  }
  // effective: every basis degree >= 0
  bool effective() const {
    return std::all_of(degs.begin(), degs.end(), [](int d) { return d >= 0; });
  }
  json to_json() const { return json{{"name", name}, {"frame", A->name()}, {"degrees", degs}, {"F", Fmat.to_json()}}; }
};

inline FrameModule tautological_module(FramePtr A) {
  return {A, {0}, gm::identity(*A, Cochar::trivial(1)), "A"};
}

// M(m): same F, basis degrees lowered by m, so M(m)_i = M_{i+m}.
inline FrameModule shift(const FrameModule& M, int m) {
  FrameModule r = M;
  for (auto& d : r.degs) d -= m;
  r.name = M.name + "(" + std::to_string(m) + ")";
  return r;
}

inline FrameModule base_change(const FrameModule& M, const FrameHom& h) {
  if (h.src.get() != M.A.get()) throw std::invalid_argument("base change along a map from another frame");
  FrameModule r{h.dst, M.degs, gm::map(h, M.Fmat), M.name + "@" + h.dst->name()};
  return r;
}

// Basis e_j (x) e'_k in degree d_j + d'_k, F (x) F'.
inline FrameModule tensor(const FrameModule& M, const FrameModule& N, bool require_window = false) {
  if (M.A.get() != N.A.get()) throw std::invalid_argument("tensor over different frames");
  if (require_window && !(M.is_window() && N.is_window())) throw std::invalid_argument("tensor factor is not a window");
  const Frame& A = *M.A;
  size_t m = M.rank(), n = N.rank();
  FrameModule r{M.A, {}, gm::zero(Cochar::trivial(m * n)), M.name + "(x)" + N.name};
  for (size_t j = 0; j < m; ++j)
    for (size_t k = 0; k < n; ++k) r.degs.push_back(M.degs[j] + N.degs[k]);
  for (size_t j = 0; j < m; ++j)
    for (size_t k = 0; k < n; ++k)
      for (size_t a = 0; a < m; ++a)
        for (size_t b = 0; b < n; ++b)
          r.Fmat.at(a * n + b, j * n + k) = fe::mul(A, M.Fmat.at(a, j), N.Fmat.at(b, k));
  return r;
}

// gamma_F(y) = F(y^sigma) - y^tau on a column y with y_j in A_{i - degs[j]}.
inline std::vector<FElem> gamma_F(const FrameModule& M, int i, const std::vector<FElem>& y) {
  const Frame& A = *M.A;
  std::vector<FElem> out(M.rank(), fe::zero(0));
  for (size_t j = 0; j < M.rank(); ++j) {
    if (y[j].deg != i - M.degs[j]) throw std::invalid_argument("component of wrong degree");
    FElem s = fe::sigma(A, y[j]);
    for (size_t k = 0; k < M.rank(); ++k) out[k] = fe::add(A, out[k], fe::mul(A, M.Fmat.at(k, j), s));
    out[j] = fe::sub(A, out[j], fe::tau(A, y[j]));
  }
  return out;
}

// Two-term complex [ (M (x) K)_i -> M^tau (x) K_0 ] on the window weights, as an additive map of
// finite abelian groups.  Image components above the window are dropped (window quotient); the
// count of dropped nonzero components is reported in `dropped`.
struct GammaComplex {
  AdditiveMap map;
  int dropped = 0;
  json to_json() const {
    return json{{"source_orders", map.src}, {"target_orders", map.tgt}, {"dropped_components", dropped}};
  }
};

inline GammaComplex gamma_complex(const FrameModule& M, int i, const FrameIdeal& K, const std::vector<Weight>& weights) {
  const Frame& A = *M.A;
  if (K.host.get() != M.A.get()) throw std::invalid_argument("ideal of another frame");
  GammaComplex G;
  G.map.p = A.p();
  std::map<std::pair<size_t, Weight>, size_t> tindex;
  for (size_t k = 0; k < M.rank(); ++k)
    for (auto& b : weights) {
      int sz = K.size(0, b);
      if (sz <= 0) continue;
      tindex[{k, b}] = G.map.tgt.size();
      G.map.tgt.push_back(sz);
      G.map.tgt_label.push_back(json{{"coord", k}, {"weight", b.str()}});
    }
  std::set<Weight> wset(weights.begin(), weights.end());
  std::vector<IVec> cols;
  for (size_t j = 0; j < M.rank(); ++j) {
    int d = i - M.degs[j];
    for (auto& a : weights) {
      int sz = K.size(d, a);
      if (sz <= 0) continue;
      std::vector<FElem> y(M.rank());
      for (size_t k = 0; k < M.rank(); ++k) y[k] = fe::zero(i - M.degs[k]);
      y[j] = fe::gen(A, d, a, ppow_res(A.p(), K.depth(d, a), A.cap()));
      auto img = gamma_F(M, i, y);
      IVec col(G.map.tgt.size(), 0);
      for (size_t k = 0; k < M.rank(); ++k)
        for (auto& [b, v] : fe::reduce(A, img[k]).c) {
          if (!wset.count(b)) {
            ++G.dropped;
            continue;
          }
          int dep = K.depth(0, b);
          if (dep >= A.len(0, b)) continue;
          if (detail::val(v, A.p(), A.cap()) < dep) throw std::logic_error("gamma image leaves the ideal");
          col[tindex.at({k, b})] = padic::mod(v / padic::pw(A.p(), dep), padic::pw(A.p(), A.len(0, b) - dep));
        }
      cols.push_back(col);
      G.map.src.push_back(sz);
      G.map.src_label.push_back(json{{"coord", j}, {"deg", d}, {"weight", a.str()}});
    }
  }
  G.map.A.assign(G.map.tgt.size(), IVec(cols.size(), 0));
  for (size_t c = 0; c < cols.size(); ++c)
    for (size_t r = 0; r < G.map.tgt.size(); ++r) G.map.A[r][c] = cols[c][r];
  return G;
}

inline GammaComplex gamma_complex(const FrameModule& M, int i, const std::vector<Weight>& weights) {
  return gamma_complex(M, i, FrameIdeal{"A", M.A, [](int, const Weight&) { return 0; }}, weights);
}

}  // namespace gerbe

#endif
