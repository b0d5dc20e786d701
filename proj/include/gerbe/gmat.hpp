#ifndef GERBE_GMAT_HPP
#define GERBE_GMAT_HPP

#include "frame_check.hpp"
#include "snf.hpp"

namespace gerbe {

// Diagonal cocharacter of GL_h.
struct Cochar {
  std::vector<int> mu;

  size_t h() const { return mu.size(); }
  // degree of entry (r, s) of G(A)_mu
  int deg(size_t r, size_t s) const { return mu[s] - mu[r]; }
  bool one_bounded() const {
    if (mu.empty()) return true;
    auto [lo, hi] = std::minmax_element(mu.begin(), mu.end());
    return *hi - *lo <= 1;
  }
  static Cochar trivial(size_t h) { return Cochar{std::vector<int>(h, 0)}; }
  bool operator==(const Cochar&) const = default;
  json to_json() const { return mu; }
};

// h x h matrix with entry (r, s) in A_{mu_s - mu_r}.  mu = 0 gives matrices over A_0.
struct GMat {
  Cochar mu;
  std::vector<FElem> e;

  size_t h() const { return mu.h(); }
  FElem& at(size_t r, size_t s) { return e[r * h() + s]; }
  const FElem& at(size_t r, size_t s) const { return e[r * h() + s]; }
  bool operator==(const GMat& o) const { return mu == o.mu && e == o.e; }
  bool is_zero() const {
    return std::all_of(e.begin(), e.end(), [](const FElem& x) { return x.is_zero(); });
  }
  json to_json() const {
    json rows = json::array();
    for (size_t r = 0; r < h(); ++r) {
      json row = json::array();
      for (size_t s = 0; s < h(); ++s) row.push_back(at(r, s).to_json());
      rows.push_back(row);
    }
    return rows;
  }
};

namespace gm {

inline GMat zero(const Cochar& mu) {
  GMat m{mu, {}};
  for (size_t r = 0; r < mu.h(); ++r)
    for (size_t s = 0; s < mu.h(); ++s) m.e.push_back(fe::zero(mu.deg(r, s)));
  return m;
}

inline GMat identity(const Frame& F, const Cochar& mu) {
  GMat m = zero(mu);
  for (size_t r = 0; r < mu.h(); ++r) m.at(r, r) = fe::one(F);
  return m;
}

inline GMat reduce(const Frame& F, const GMat& a) {
  GMat r = a;
  for (auto& x : r.e) x = fe::reduce(F, x);
  return r;
}

inline GMat add(const Frame& F, const GMat& a, const GMat& b) {
  GMat r = a;
  for (size_t k = 0; k < r.e.size(); ++k) r.e[k] = fe::add(F, a.e[k], b.e[k]);
  return r;
}
inline GMat sub(const Frame& F, const GMat& a, const GMat& b) {
  GMat r = a;
  for (size_t k = 0; k < r.e.size(); ++k) r.e[k] = fe::sub(F, a.e[k], b.e[k]);
  return r;
}

inline GMat mul(const Frame& F, const GMat& a, const GMat& b) {
  if (a.h() != b.h()) throw std::invalid_argument("matrix sizes differ");
  // (mu_k - mu_r) + (mu_s - mu_k) = mu_s - mu_r needs one grading on both sides; flat gradings all agree
  auto flat = [](const Cochar& c) {
    return std::all_of(c.mu.begin(), c.mu.end(), [&](int x) { return x == c.mu[0]; });
  };
  Cochar mu = a.mu;
  if (flat(a.mu) && flat(b.mu)) mu = Cochar::trivial(a.h());
  else if (!(a.mu == b.mu)) throw std::invalid_argument("incompatible gradings");
  GMat r = zero(mu);
  const size_t h = a.h();
  for (size_t i = 0; i < h; ++i)
    for (size_t j = 0; j < h; ++j) {
      FElem acc = fe::zero(mu.deg(i, j));
      for (size_t k = 0; k < h; ++k) {
        if (a.at(i, k).is_zero() || b.at(k, j).is_zero()) continue;
        FElem t = fe::mul(F, a.at(i, k), b.at(k, j));
        if (t.deg != acc.deg) throw std::logic_error("degree mismatch in graded product");
        acc = fe::add(F, acc, t);
      }
      r.at(i, j) = acc;
    }
  return r;
}

inline GMat sigma(const Frame& F, const GMat& a) {
  GMat r = zero(Cochar::trivial(a.h()));
  for (size_t k = 0; k < a.e.size(); ++k) r.e[k] = fe::sigma(F, a.e[k]);
  return r;
}
inline GMat tau(const Frame& F, const GMat& a) {
  GMat r = zero(Cochar::trivial(a.h()));
  for (size_t k = 0; k < a.e.size(); ++k) r.e[k] = fe::tau(F, a.e[k]);
  return r;
}

// Entrywise frame homomorphism.
inline GMat map(const FrameHom& H, const GMat& a) {
  GMat r = a;
  for (auto& x : r.e) x = fe::reduce(*H.dst, H.apply(x));
  return r;
}

// Same coefficients read in another frame with the same generators (lifts along scalar-1 maps).
inline GMat transport(const Frame& to, const GMat& a) {
  GMat r = a;
  for (auto& x : r.e) x = fe::reduce(to, x);
  return r;
}

// weight-0 coefficients mod p^cap
inline IMat weight_zero(const Frame& F, const GMat& a) {
  const size_t h = a.h();
  IMat m(h, IVec(h, 0));
  Weight z = Weight::zero(F.p());
  for (size_t r = 0; r < h; ++r)
    for (size_t s = 0; s < h; ++s) m[r][s] = a.at(r, s).at(z);
  return m;
}

// Inverse of a unit matrix over Z/p^cap (unit pivots after row swaps).
inline std::optional<IMat> inverse_mod(IMat A, uint32_t p, int cap) {
  const int64_t m = padic::pw(p, cap);
  const size_t h = A.size();
  IMat I = identity_mat(h);
  for (size_t c = 0; c < h; ++c) {
    size_t piv = h;
    for (size_t r = c; r < h; ++r)
      if (padic::mod(A[r][c], p) != 0) {
        piv = r;
        break;
      }
    if (piv == h) return std::nullopt;
    std::swap(A[c], A[piv]);
    std::swap(I[c], I[piv]);
    int64_t u = padic::inv(padic::mod(A[c][c], m), m);
    for (size_t j = 0; j < h; ++j) {
      A[c][j] = padic::mulmod(padic::mod(A[c][j], m), u, m);
      I[c][j] = padic::mulmod(padic::mod(I[c][j], m), u, m);
    }
    for (size_t r = 0; r < h; ++r) {
      if (r == c || A[r][c] == 0) continue;
      int64_t f = padic::mod(A[r][c], m);
      for (size_t j = 0; j < h; ++j) {
        A[r][j] = padic::mod(A[r][j] - padic::mulmod(f, A[c][j], m), m);
        I[r][j] = padic::mod(I[r][j] - padic::mulmod(f, I[c][j], m), m);
      }
    }
  }
  return I;
}

inline GMat from_weight_zero(const Frame& F, const IMat& m) {
  GMat r = zero(Cochar::trivial(m.size()));
  for (size_t i = 0; i < m.size(); ++i)
    for (size_t j = 0; j < m.size(); ++j) fe::add_term(F, r.at(i, j), Weight::zero(F.p()), m[i][j]);
  return r;
}

// Inverse of a matrix over A_0: invert the weight-0 part, then a terminating geometric series in the
// positive-weight part.  Throws if the weight-0 part is singular mod p or the series does not terminate.
inline GMat inverse0(const Frame& F, const GMat& a, int max_terms = 512) {
  const size_t h = a.h();
  auto u = inverse_mod(weight_zero(F, a), F.p(), F.cap());
  if (!u) throw std::domain_error("matrix not invertible: weight-0 part singular mod p");
  GMat U = from_weight_zero(F, *u);
  GMat I = identity(F, Cochar::trivial(h));
  GMat N = sub(F, mul(F, U, a), I);  // U a = 1 + N, N of positive weight
  GMat term = I, sum = I;
  for (int k = 1; k <= max_terms; ++k) {
    term = mul(F, term, N);
    for (auto& x : term.e) x = fe::neg(F, x);
    if (term.is_zero()) return mul(F, sum, U);
    sum = add(F, sum, term);
  }
  throw std::domain_error("inverse series did not terminate");
}

inline bool is_identity(const Frame& F, const GMat& a) {
  return reduce(F, a) == identity(F, a.mu);
}

// ---- P^- x U^+ for 1-bounded mu (two adjacent weights) ----

struct Decomposition {
  GMat pminus, uplus;
};

// h = p^- u^+ with u^+ = 1 + (degree-1 block), p^- with zero degree-1 block.
inline Decomposition decompose(const Frame& F, const GMat& hm) {
  const Cochar& mu = hm.mu;
  if (!mu.one_bounded()) throw std::invalid_argument("decomposition needs a 1-bounded cocharacter");
  const size_t h = hm.h();
  std::vector<size_t> hi, lo;  // rows carrying the larger / smaller weight
  int top = *std::max_element(mu.mu.begin(), mu.mu.end());
  for (size_t i = 0; i < h; ++i) (mu.mu[i] == top ? hi : lo).push_back(i);
  if (lo.empty()) return {hm, identity(F, mu)};
  // D = h(lo, lo) over A_0, C = h(lo, hi) in degree 1
  GMat D = zero(Cochar::trivial(lo.size()));
  for (size_t i = 0; i < lo.size(); ++i)
    for (size_t j = 0; j < lo.size(); ++j) D.at(i, j) = hm.at(lo[i], lo[j]);
  GMat Dinv;
  try {
    Dinv = inverse0(F, D);
  } catch (const std::domain_error&) {
    throw std::domain_error("decomposition fails: lower diagonal block not invertible");
  }
  GMat u = identity(F, mu);
  for (size_t i = 0; i < lo.size(); ++i)
    for (size_t j = 0; j < hi.size(); ++j) {
      FElem acc = fe::zero(1);
      for (size_t k = 0; k < lo.size(); ++k) acc = fe::add(F, acc, fe::mul(F, Dinv.at(i, k), hm.at(lo[k], hi[j])));
      u.at(lo[i], hi[j]) = acc;
    }
  // p^- = h u^{-1}, u^{-1} = 1 - (degree-1 block)
  GMat uinv = identity(F, mu);
  for (size_t i = 0; i < lo.size(); ++i)
    for (size_t j = 0; j < hi.size(); ++j) uinv.at(lo[i], hi[j]) = fe::neg(F, u.at(lo[i], hi[j]));
  GMat pm = mul(F, hm, uinv);
  for (size_t i = 0; i < lo.size(); ++i)
    for (size_t j = 0; j < hi.size(); ++j)
      if (!fe::reduce(F, pm.at(lo[i], hi[j])).is_zero()) throw std::logic_error("decomposition residue");
  return {pm, u};
}

// Inverse in G(A)_mu for 1-bounded mu, through the decomposition.
inline GMat inverse(const Frame& F, const GMat& hm) {
  bool flat = std::all_of(hm.mu.mu.begin(), hm.mu.mu.end(), [&](int x) { return x == hm.mu.mu[0]; });
  if (flat) {
    GMat r = inverse0(F, GMat{Cochar::trivial(hm.h()), hm.e});
    r.mu = hm.mu;
    return r;
  }
  auto [pm, u] = decompose(F, hm);
  const Cochar& mu = hm.mu;
  const size_t h = hm.h();
  int top = *std::max_element(mu.mu.begin(), mu.mu.end());
  std::vector<size_t> hi, lo;
  for (size_t i = 0; i < h; ++i) (mu.mu[i] == top ? hi : lo).push_back(i);
  auto block = [&](const GMat& m, const std::vector<size_t>& R, const std::vector<size_t>& S) {
    GMat b = zero(Cochar::trivial(R.size()));
    b.e.assign(R.size() * S.size(), fe::zero(0));
    for (size_t i = 0; i < R.size(); ++i)
      for (size_t j = 0; j < S.size(); ++j) b.e[i * S.size() + j] = m.at(R[i], S[j]);
    return b;
  };
  // p^- = [[A, B], [0, D]] on (hi, lo): inverse [[A^-1, -A^-1 B D^-1], [0, D^-1]]
  GMat A = block(pm, hi, hi), D = block(pm, lo, lo);
  GMat Ai = inverse0(F, A), Di = inverse0(F, D);
  GMat pinv = zero(mu);
  for (size_t i = 0; i < hi.size(); ++i)
    for (size_t j = 0; j < hi.size(); ++j) pinv.at(hi[i], hi[j]) = Ai.at(i, j);
  for (size_t i = 0; i < lo.size(); ++i)
    for (size_t j = 0; j < lo.size(); ++j) pinv.at(lo[i], lo[j]) = Di.at(i, j);
  for (size_t i = 0; i < hi.size(); ++i)
    for (size_t j = 0; j < lo.size(); ++j) {
      FElem acc = fe::zero(-1);
      for (size_t k = 0; k < hi.size(); ++k)
        for (size_t l = 0; l < lo.size(); ++l)
          acc = fe::add(F, acc, fe::mul(F, fe::mul(F, Ai.at(i, k), pm.at(hi[k], lo[l])), Di.at(l, j)));
      pinv.at(hi[i], lo[j]) = fe::neg(F, acc);
    }
  GMat uinv = identity(F, mu);
  for (size_t i = 0; i < lo.size(); ++i)
    for (size_t j = 0; j < hi.size(); ++j) uinv.at(lo[i], hi[j]) = fe::neg(F, u.at(lo[i], hi[j]));
  return mul(F, uinv, pinv);
}

// Random element of A_0-matrices with invertible weight-0 part, entries on the given weights.
inline GMat random_unit0(const Frame& F, size_t h, const std::vector<Weight>& weights, std::mt19937_64& rng,
                         int max_terms = 2) {
  for (;;) {
    GMat g = zero(Cochar::trivial(h));
    for (auto& x : g.e) x = fe::random(F, 0, weights, rng, max_terms);
    std::uniform_int_distribution<int64_t> c(0, F.modulus() - 1);
    for (size_t r = 0; r < h; ++r)
      for (size_t s = 0; s < h; ++s) fe::add_term(F, g.at(r, s), Weight::zero(F.p()), c(rng));
    if (inverse_mod(weight_zero(F, g), F.p(), F.cap())) return reduce(F, g);
  }
}

}  // namespace gm
}  // namespace gerbe

#endif
