#ifndef GERBE_GMU_HPP
#define GERBE_GMU_HPP

#include "module.hpp"

namespace gerbe {

// g * h = tau(h)^{-1} g sigma(h)
inline GMat act(const Frame& F, const GMat& g, const GMat& h) {
  GMat ti = gm::inverse0(F, gm::tau(F, h));
  return gm::reduce(F, gm::mul(F, gm::mul(F, ti, g), gm::sigma(F, h)));
}

// All elements of A_d supported on the window weights.
inline std::vector<FElem> enumerate_piece(const Frame& F, int d, const std::vector<Weight>& weights, size_t cap) {
  std::vector<FElem> out{fe::zero(d)};
  for (auto& a : weights) {
    int l = F.len(d, a);
    if (l <= 0) continue;
    int64_t n = padic::pw(F.p(), l);
    if (out.size() * (size_t)n > cap) throw std::length_error("enumeration cap exceeded");
    std::vector<FElem> next;
    for (auto& x : out)
      for (int64_t c = 0; c < n; ++c) {
        FElem y = x;
        fe::add_term(F, y, a, c);
        next.push_back(y);
      }
    out.swap(next);
  }
  return out;
}

inline std::vector<GMat> enumerate_matrices(const Frame& F, const Cochar& mu, const std::vector<Weight>& weights,
                                            size_t cap) {
  std::vector<GMat> out{gm::zero(mu)};
  const size_t h = mu.h();
  for (size_t r = 0; r < h; ++r)
    for (size_t s = 0; s < h; ++s) {
      auto piece = enumerate_piece(F, mu.deg(r, s), weights, cap);
      if (out.size() * piece.size() > cap) throw std::length_error("enumeration cap exceeded");
      std::vector<GMat> next;
      for (auto& m : out)
        for (auto& x : piece) {
          GMat y = m;
          y.at(r, s) = x;
          next.push_back(y);
        }
      out.swap(next);
    }
  return out;
}

struct Orbit {
  GMat representative;
  size_t size = 0;
  size_t stabilizer_order = 0;
};

struct OrbitReport {
  size_t objects = 0;
  std::vector<Orbit> orbits;
  json window;
  json to_json() const {
    json o = json::array();
    for (auto& x : orbits) o.push_back(json{{"size", x.size}, {"stabilizer_order", x.stabilizer_order}});
    return json{{"objects", objects}, {"orbits", o}, {"window", window}};
  }
};

// Brute force over G(A_0) x G(A)_mu restricted to the window weights.
inline OrbitReport orbit_enumerate(const Frame& F, const Cochar& mu, const std::vector<Weight>& weights,
                                   size_t cap = 1000000) {
  auto invertible = [&](const GMat& m, bool graded) {
    try {
      graded ? gm::inverse(F, m) : gm::inverse0(F, m);
      return true;
    } catch (const std::domain_error&) {
      return false;
    }
  };
  std::vector<GMat> objs, mors;
  for (auto& m : enumerate_matrices(F, Cochar::trivial(mu.h()), weights, cap))
    if (invertible(m, false)) objs.push_back(m);
  for (auto& m : enumerate_matrices(F, mu, weights, cap))
    if (invertible(m, true)) mors.push_back(m);
  if (objs.size() * mors.size() > cap) throw std::length_error("action evaluation cap exceeded");
  OrbitReport rep;
  rep.objects = objs.size();
  json ws = json::array();
  for (auto& w : weights) ws.push_back(w.str());
  rep.window = json{{"weights", ws}, {"mu", mu.to_json()}};
  std::vector<bool> seen(objs.size(), false);
  auto index_of = [&](const GMat& g) -> size_t {
    for (size_t i = 0; i < objs.size(); ++i)
      if (objs[i] == g) return i;
    throw std::logic_error("action left the object set");
  };
  for (size_t i = 0; i < objs.size(); ++i) {
    if (seen[i]) continue;
    Orbit o{objs[i], 0, 0};
    for (auto& h : mors) {
      size_t j = index_of(act(F, objs[i], h));
      if (j == i) ++o.stabilizer_order;
      if (!seen[j]) {
        seen[j] = true;
        ++o.size;
      }
    }
    rep.orbits.push_back(o);
  }
  return rep;
}

// ---- ideals: gamma_g, sigma-dot, unique lifting ----

// tau_d^{-1} on K: an element of K_0 (degree 0) back to K_d.  d = 1 needs K leveled at each weight.
inline FElem tau_inv_ideal(const FrameIdeal& K, const FElem& v, int d) {
  const Frame& F = *K.host;
  if (d <= 0) return d == 0 ? fe::reduce(F, v) : fe::tau_inv(F, v, d);
  if (d != 1) throw std::invalid_argument("tau inverse on the ideal needs degree <= 1 (1-bounded mu)");
  const uint32_t p = F.p();
  const int cap = F.cap();
  const int64_t m = F.modulus();
  FElem r{1, {}};
  for (auto& [a, x] : fe::reduce(F, v).c) {
    int d0 = K.depth(0, a), d1 = K.depth(1, a);
    if (detail::val(x, p, cap) < d0) throw std::domain_error("element not in K_0 at weight " + a.str());
    int64_t t1 = F.tau(1, a);
    int vt = detail::val(t1, p, cap);
    if (std::min(F.len(0, a), d1 + vt) != d0) throw std::domain_error("tau_1 not bijective on K at " + a.str());
    int64_t unit = (t1 / padic::pw(p, vt)) % m;
    int64_t q = x / padic::pw(p, d0);
    fe::add_term(F, r, a, padic::mulmod(padic::mulmod(q, padic::inv(unit, m), m), ppow_res(p, d1, cap), m));
  }
  return fe::reduce(F, r);
}

inline GMat tau_inv_ideal(const FrameIdeal& K, const GMat& x0, const Cochar& mu) {
  GMat r = gm::zero(mu);
  const Frame& F = *K.host;
  for (size_t i = 0; i < mu.h(); ++i)
    for (size_t j = 0; j < mu.h(); ++j) {
      FElem v = x0.at(i, j);
      if (i == j) v = fe::sub(F, v, fe::one(F));
      FElem w = tau_inv_ideal(K, v, mu.deg(i, j));
      r.at(i, j) = i == j ? fe::add(F, w, fe::one(F)) : w;
    }
  return r;
}

// gamma_g(x) = tau(x)^{-1} sigma_g(x), sigma_g = Ad(g) o sigma
inline GMat gamma_g(const Frame& F, const GMat& g, const GMat& x) {
  GMat gi = gm::inverse0(F, g);
  GMat sg = gm::mul(F, gm::mul(F, g, gm::sigma(F, x)), gi);
  return gm::reduce(F, gm::mul(F, gm::inverse0(F, gm::tau(F, x)), sg));
}

// sigma-dot_g(x) = g sigma(tau^{-1}(x)) g^{-1} on G(K_0)
inline GMat dot_sigma_g(const FrameIdeal& K, const Cochar& mu, const GMat& g, const GMat& x) {
  const Frame& F = *K.host;
  GMat gi = gm::inverse0(F, g);
  return gm::reduce(F, gm::mul(F, gm::mul(F, g, gm::sigma(F, tau_inv_ideal(K, x, mu))), gi));
}

// gamma-dot_g(x) = x^{-1} sigma-dot_g(x)
inline GMat dot_gamma_g(const FrameIdeal& K, const Cochar& mu, const GMat& g, const GMat& x) {
  const Frame& F = *K.host;
  return gm::reduce(F, gm::mul(F, gm::inverse0(F, x), dot_sigma_g(K, mu, g, x)));
}

struct DotGammaInverse {
  GMat x;
  int steps = 0;  // m with sigma-dot^m(y^{-1}) = 1
};

// sigma-dot^{m-1}(y^{-1}) ... sigma-dot(y^{-1}) y^{-1}; throws when sigma-dot does not reach 1 within max_steps.
inline DotGammaInverse dot_gamma_inverse(const FrameIdeal& K, const Cochar& mu, const GMat& g, const GMat& y,
                                         int max_steps = 256) {
  const Frame& F = *K.host;
  GMat one = gm::identity(F, Cochar::trivial(mu.h()));
  GMat cur = gm::inverse0(F, y), acc = cur;
  for (int m = 1; m <= max_steps; ++m) {
    cur = dot_sigma_g(K, mu, g, cur);
    if (gm::reduce(F, cur) == one) return {gm::reduce(F, acc), m};
    acc = gm::mul(F, cur, acc);
  }
  throw std::domain_error("nilpotence certificate absent: sigma-dot did not reach 1");
}

// gamma_g^{-1} = tau^{-1} o gamma-dot_g^{-1}
inline GMat gamma_g_inverse(const FrameIdeal& K, const Cochar& mu, const GMat& g, const GMat& y) {
  return tau_inv_ideal(K, dot_gamma_inverse(K, mu, g, y).x, mu);
}

// Drop every component of weight outside the window; weights above a cap form an ideal stable under
// sigma and tau, so this is a frame quotient.
inline GMat truncate(const GMat& x, const std::set<Weight>& window) {
  GMat r = x;
  for (auto& e : r.e)
    for (auto it = e.c.begin(); it != e.c.end();) it = window.count(it->first) ? std::next(it) : e.c.erase(it);
  return r;
}

// All of g(K)_mu (graded) or g(K_0) (flat) supported on the window weights.
inline std::vector<GMat> enumerate_ideal_matrices(const FrameIdeal& K, const Cochar& mu, const std::vector<Weight>& weights,
                                                  bool flat, size_t cap) {
  const Frame& F = *K.host;
  std::vector<GMat> out{gm::zero(flat ? Cochar::trivial(mu.h()) : mu)};
  for (size_t r = 0; r < mu.h(); ++r)
    for (size_t s = 0; s < mu.h(); ++s)
      for (auto& a : weights) {
        int d = flat ? 0 : mu.deg(r, s);
        int sz = K.size(d, a);
        if (sz <= 0) continue;
        int64_t n = padic::pw(F.p(), sz), gen = ppow_res(F.p(), K.depth(d, a), F.cap());
        if (out.size() * (size_t)n > cap) throw std::length_error("enumeration cap exceeded");
        std::vector<GMat> next;
        for (auto& m : out)
          for (int64_t q = 0; q < n; ++q) {
            GMat y = m;
            fe::add_term(F, y.at(r, s), a, padic::mulmod(q, gen, F.modulus()));
            next.push_back(y);
          }
        out.swap(next);
      }
  return out;
}

// gamma_g : G(K)_mu -> G(K_0) on the window quotient: images stay in G(K_0), are pairwise distinct, and
// there are as many as |G(K_0)|, so the map is a bijection of finite sets.
inline Check gamma_bijectivity_check(const FrameIdeal& K, const Cochar& mu, const GMat& g, const std::vector<Weight>& weights,
                                     size_t cap = 1u << 14) {
  const Frame& F = *K.host;
  detail::CheckBuilder b("gamma_g_bijective");
  std::set<Weight> win(weights.begin(), weights.end());
  auto src = enumerate_ideal_matrices(K, mu, weights, false, cap);
  auto tgt = enumerate_ideal_matrices(K, mu, weights, true, cap);
  GMat one = gm::identity(F, Cochar::trivial(mu.h()));
  std::set<std::string> seen;
  for (auto& X : src) {
    GMat y = gm::reduce(F, truncate(gamma_g(F, g, gm::add(F, gm::identity(F, mu), X)), win));
    GMat Y = gm::reduce(F, gm::sub(F, y, one));
    for (size_t r = 0; r < mu.h() && !b.failed(); ++r)
      for (size_t s = 0; s < mu.h() && !b.failed(); ++s)
        for (auto& [a, v] : Y.at(r, s).c)
          if (detail::val(v, F.p(), F.cap()) < K.depth(0, a)) {
            b.fail(json{{"leaves_ideal", X.to_json()}});
            break;
          }
    if (!seen.insert(Y.to_json().dump()).second) b.fail(json{{"collision", X.to_json()}});
    if (b.failed()) break;
  }
  if (!b.failed() && seen.size() != tgt.size()) b.fail(json{{"source", src.size()}, {"target", tgt.size()}});
  return b.done();
}

// K K = 0 on the window: products of generators vanish.
inline Check square_zero_check(const FrameIdeal& K, const FrameWindow& W, const std::string& name = "square_zero") {
  const Frame& F = *K.host;
  detail::CheckBuilder b(name);
  for (int i = W.dmin; i <= W.dmax; ++i)
    for (int j = W.dmin; j <= W.dmax; ++j)
      for (auto& a : W.weights)
        for (auto& c : W.weights) {
          if (K.size(i, a) <= 0 || K.size(j, c) <= 0) continue;
          FElem x = fe::gen(F, i, a, ppow_res(F.p(), K.depth(i, a), F.cap()));
          FElem y = fe::gen(F, j, c, ppow_res(F.p(), K.depth(j, c), F.cap()));
          if (!fe::reduce(F, fe::mul(F, x, y)).is_zero())
            b.fail(json{{"x", detail::piece(i, a)}, {"y", detail::piece(j, c)}});
        }
  return b.done();
}

// exp(X) = 1 + X on a square-zero ideal
inline GMat exp_iso(const Frame& F, const GMat& X) { return gm::add(F, gm::identity(F, X.mu), X); }

inline GMat log_iso(const Frame& F, const GMat& x) { return gm::sub(F, x, gm::identity(F, x.mu)); }

// Lie^{G,mu}(g) for GL_h: basis E_rs in degree mu_r - mu_s (so coefficient degree mu_s - mu_r in M_0),
// F = Ad(g) in the E_rs basis.
inline FrameModule lie_realization(FramePtr A, const Cochar& mu, const GMat& g) {
  const Frame& F = *A;
  const size_t h = mu.h();
  GMat gi = gm::inverse0(F, g);
  FrameModule M{A, {}, gm::zero(Cochar::trivial(h * h)), "Lie"};
  for (size_t r = 0; r < h; ++r)
    for (size_t s = 0; s < h; ++s) M.degs.push_back(mu.mu[r] - mu.mu[s]);
  // Ad(g)(E_rs) = sum_{k,l} g_kr ginv_sl E_kl
  for (size_t r = 0; r < h; ++r)
    for (size_t s = 0; s < h; ++s)
      for (size_t k = 0; k < h; ++k)
        for (size_t l = 0; l < h; ++l) M.Fmat.at(k * h + l, r * h + s) = fe::mul(F, g.at(k, r), gi.at(s, l));
  return M;
}

// C^{g,mu}(K, g) = Gamma_0(Lie^{G,mu}(g) (x) K): the map sigma_g - tau on g(K)_mu -> g(K_0).
inline GammaComplex c_gmu_complex(const FrameIdeal& K, const Cochar& mu, const GMat& g, const std::vector<Weight>& weights) {
  return gamma_complex(lie_realization(K.host, mu, g), 0, K, weights);
}

// Ad'(gbar)(x) = g x g^{-1} for a lift g; IJ = 0 makes the result independent of the lift.
inline GMat ad_prime(const FrameIdeal& I, const FrameIdeal& J, const FrameWindow& W, const GMat& g_lift, const GMat& x) {
  const Frame& F = *I.host;
  detail::CheckBuilder b("IJ=0");
  for (auto& a : W.weights)
    for (auto& c : W.weights) {
      if (I.size(0, a) <= 0 || J.size(0, c) <= 0) continue;
      FElem u = fe::gen(F, 0, a, ppow_res(F.p(), I.depth(0, a), F.cap()));
      FElem v = fe::gen(F, 0, c, ppow_res(F.p(), J.depth(0, c), F.cap()));
      if (!fe::reduce(F, fe::mul(F, u, v)).is_zero()) b.fail(json{{"I", a.str()}, {"J", c.str()}});
    }
  if (b.failed()) throw std::invalid_argument("ad_prime needs IJ = 0");
  return gm::reduce(F, gm::mul(F, gm::mul(F, g_lift, x), gm::inverse0(F, g_lift)));
}

}  // namespace gerbe

#endif
