#ifndef GERBE_FRAME_CHECK_HPP
#define GERBE_FRAME_CHECK_HPP

#include "frame.hpp"

namespace gerbe {

struct FrameWindow {
  std::vector<Weight> weights;
  int dmin = -2, dmax = 2;
  int samples = 100;
  uint64_t seed = 1;

  json to_json() const {
    json w = json::array();
    for (auto& a : weights) w.push_back(a.str());
    return json{{"weights", w}, {"degrees", json::array({dmin, dmax})}, {"samples", samples}, {"seed", seed}};
  }
};

inline FrameWindow make_window(uint32_t p, int kmax, const Weight& wmax, int dmin = -2, int dmax = 2) {
  FrameWindow w;
  w.weights = window_weights(p, kmax, wmax);
  w.dmin = dmin;
  w.dmax = dmax;
  return w;
}

struct Check {
  std::string name;
  bool pass = true;
  json witness;
  json to_json() const {
    json j{{"name", name}, {"pass", pass}};
    if (!pass) j["witness"] = witness;
    return j;
  }
};

struct Report {
  std::string subject;
  json window;
  std::vector<Check> checks;

  bool pass() const {
    for (auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  const Check* find(const std::string& n) const {
    for (auto& c : checks)
      if (c.name == n) return &c;
    return nullptr;
  }
  json to_json() const {
    json a = json::array();
    for (auto& c : checks) a.push_back(c.to_json());
    return json{{"frame", subject}, {"window", window}, {"axioms", a}};
  }
};

namespace detail {

// Records the first failure of a named check.
class CheckBuilder {
 public:
  explicit CheckBuilder(std::string n) { c_.name = std::move(n); }
  void fail(json w) {
    if (c_.pass) {
      c_.pass = false;
      c_.witness = std::move(w);
    }
  }
  bool failed() const { return !c_.pass; }
  Check done() { return c_; }

 private:
  Check c_;
};

// residues equal modulo p^l
inline bool eq_mod(int64_t x, int64_t y, uint32_t p, int l) {
  if (l <= 0) return true;
  int64_t m = padic::pw(p, l);
  return padic::mod(x - y, m) == 0;
}

inline int val(int64_t x, uint32_t p, int cap) { return x == 0 ? cap : std::min(cap, padic::vp(x, p)); }

// scalar s gives a well-defined map Z/p^ls -> Z/p^lt
inline bool well_defined(int64_t s, int ls, int lt, uint32_t p, int cap) {
  if (lt <= 0) return true;
  return val(s, p, cap) + ls >= lt;
}

inline json piece(int i, const Weight& a) { return json{{"deg", i}, {"weight", a.str()}}; }

}  // namespace detail

// Checks the frame axioms on the generators of the window (plus random sums for the Frobenius-lift axiom).
inline Report validate_frame(const Frame& F, const FrameWindow& W) {
  using namespace detail;
  const uint32_t p = F.p();
  const int cap = F.cap();
  const int64_t m = F.modulus();
  Weight zero = Weight::zero(p);
  Report rep{F.name(), W.to_json(), {}};

  CheckBuilder wd("maps_well_defined");
  for (int i = W.dmin; i <= W.dmax; ++i)
    for (auto& a : W.weights) {
      int l = F.len(i, a);
      if (!well_defined(F.t_map(i, a), l, F.len(i - 1, a), p, cap)) wd.fail({{"map", "t"}, {"at", piece(i, a)}});
      if (!well_defined(F.sigma(i, a), l, F.len(0, F.sigma_target(i, a)), p, cap))
        wd.fail({{"map", "sigma"}, {"at", piece(i, a)}});
      if (!well_defined(F.tau(i, a), l, F.len(0, a), p, cap)) wd.fail({{"map", "tau"}, {"at", piece(i, a)}});
    }
  rep.checks.push_back(wd.done());

  CheckBuilder t0("tau0_identity");
  for (auto& a : W.weights)
    if (!eq_mod(F.tau(0, a), 1, p, F.len(0, a))) t0.fail(piece(0, a));
  rep.checks.push_back(t0.done());

  CheckBuilder tn("tau_negative_bijective");
  for (int i = std::min(W.dmin, -1); i < 0; ++i)
    for (auto& a : W.weights) {
      int l = F.len(0, a);
      if (F.len(i, a) != l || !eq_mod(padic::mulmod(F.tau(i, a), F.tau_inverse(i, a), m), 1, p, l))
        tn.fail(piece(i, a));
    }
  rep.checks.push_back(tn.done());

  CheckBuilder tt("t_is_tau_inverse_of_1");
  {
    int l = F.len(0, zero);
    if (!eq_mod(padic::mulmod(F.t_coeff(), F.tau(-1, zero), m), 1, p, l)) tt.fail(piece(-1, zero));
    for (int i = W.dmin + 1; i <= W.dmax; ++i)
      for (auto& a : W.weights) {
        int64_t prod = padic::mulmod(F.t_coeff(), F.mul(-1, zero, i, a), m);
        if (!eq_mod(prod, F.t_map(i, a), p, F.len(i - 1, a))) tt.fail({{"t*x != t(x)", piece(i, a)}});
      }
  }
  rep.checks.push_back(tt.done());

  CheckBuilder sp("sigma_t_equals_p");
  {
    Weight tg = F.sigma_target(-1, zero);
    int64_t s = padic::mulmod(F.t_coeff(), F.sigma(-1, zero), m);
    if (!(tg == zero) || !eq_mod(s, p, p, F.len(0, zero))) sp.fail(json{{"sigma(t)", s}});
  }
  rep.checks.push_back(sp.done());

  CheckBuilder fl("frobenius_lift");
  {
    auto check_elem = [&](const FElem& x) {
      FElem s = fe::sigma(F, x);
      FElem q = fe::pow(F, x, p);
      FElem d = fe::sub(F, s, q);
      for (auto& [a, v] : d.c)
        if (v % p != 0) {
          json w{{"element", x.to_json()}, {"sigma", s.to_json()}, {"x^p", q.to_json()}};
          if (x.c.size() == 1) w["weight"] = x.c.begin()->first.str();
          fl.fail(w);
          return;
        }
    };
    for (auto& a : W.weights) check_elem(fe::gen(F, 0, a));
    std::mt19937_64 rng(W.seed);
    for (int k = 0; k < W.samples && !fl.failed(); ++k) check_elem(fe::random(F, 0, W.weights, rng));
  }
  rep.checks.push_back(fl.done());

  CheckBuilder sm("sigma_multiplicative"), tm("tau_multiplicative"), cm("commutative"), un("unit");
  for (int i = W.dmin; i <= W.dmax; ++i)
    for (int j = W.dmin; j <= W.dmax; ++j) {
      if (i + j < W.dmin || i + j > W.dmax) continue;
      for (auto& a : W.weights)
        for (auto& b : W.weights) {
          Weight s = a + b;
          int64_t mab = F.mul(i, a, j, b);
          // sigma(g_a g_b) = sigma(g_a) sigma(g_b)
          Weight ta = F.sigma_target(i, a), tb = F.sigma_target(j, b), ts = F.sigma_target(i + j, s);
          int64_t lhs = padic::mulmod(mab, F.sigma(i + j, s), m);
          int64_t rhs = padic::mulmod(padic::mulmod(F.sigma(i, a), F.sigma(j, b), m), F.mul(0, ta, 0, tb), m);
          int lt = F.len(0, ts);
          if (!(ts == ta + tb)) {
            if (!eq_mod(lhs, 0, p, lt) || !eq_mod(rhs, 0, p, F.len(0, ta + tb)))
              sm.fail(json{{"x", piece(i, a)}, {"y", piece(j, b)}});
          } else if (!eq_mod(lhs, rhs, p, lt)) {
            sm.fail(json{{"x", piece(i, a)}, {"y", piece(j, b)}});
          }
          int64_t tl = padic::mulmod(mab, F.tau(i + j, s), m);
          int64_t tr = padic::mulmod(padic::mulmod(F.tau(i, a), F.tau(j, b), m), F.mul(0, a, 0, b), m);
          if (!eq_mod(tl, tr, p, F.len(0, s))) tm.fail(json{{"x", piece(i, a)}, {"y", piece(j, b)}});
          if (!eq_mod(mab, F.mul(j, b, i, a), p, F.len(i + j, s))) cm.fail(json{{"x", piece(i, a)}, {"y", piece(j, b)}});
          if (a.is_zero() && i == 0 && !eq_mod(mab, 1, p, F.len(j, b))) un.fail(piece(j, b));
        }
    }
  rep.checks.push_back(sm.done());
  rep.checks.push_back(tm.done());
  rep.checks.push_back(cm.done());
  rep.checks.push_back(un.done());

  CheckBuilder as("associative");
  {
    std::mt19937_64 rng(W.seed + 17);
    std::uniform_int_distribution<int> dg(W.dmin, W.dmax);
    std::uniform_int_distribution<size_t> wt(0, W.weights.size() - 1);
    int trials = std::max(W.samples * 10, 200);
    for (int k = 0; k < trials && !as.failed(); ++k) {
      int i = dg(rng), j = dg(rng), l = dg(rng);
      const Weight &a = W.weights[wt(rng)], &b = W.weights[wt(rng)], &c = W.weights[wt(rng)];
      int64_t left = padic::mulmod(F.mul(i, a, j, b), F.mul(i + j, a + b, l, c), m);
      int64_t right = padic::mulmod(F.mul(j, b, l, c), F.mul(i, a, j + l, b + c), m);
      if (!eq_mod(left, right, p, F.len(i + j + l, a + b + c)))
        as.fail(json{{"x", piece(i, a)}, {"y", piece(j, b)}, {"z", piece(l, c)}});
    }
  }
  rep.checks.push_back(as.done());

  // sigma(t x) = p sigma(x), tau(t x) = tau(x)
  CheckBuilder ts("t_compatible");
  for (int i = W.dmin + 1; i <= W.dmax; ++i)
    for (auto& a : W.weights) {
      int64_t tmap = F.t_map(i, a);
      Weight tg = F.sigma_target(i, a);
      int lt = F.len(0, tg);
      if (!eq_mod(padic::mulmod(tmap, F.sigma(i - 1, a), m), padic::mulmod(p, F.sigma(i, a), m), p, lt))
        ts.fail(json{{"sigma", piece(i, a)}});
      if (!eq_mod(padic::mulmod(tmap, F.tau(i - 1, a), m), F.tau(i, a), p, F.len(0, a)))
        ts.fail(json{{"tau", piece(i, a)}});
    }
  rep.checks.push_back(ts.done());

  // A_0 is graded with the weight-0 line a quotient of Z_p generated by 1, so 1 + p y is a unit
  // exactly when the weight-0 line is local with residue field F_p.
  CheckBuilder rad("p_in_radical");
  {
    int l = F.len(0, zero);
    if (l >= 1 && !eq_mod(F.mul(0, zero, 0, zero), 1, p, l)) rad.fail(json{{"weight0_generator_not_one", true}});
    if (l == 0) rad.fail(json{{"reason", "zero ring in weight 0"}});
  }
  rep.checks.push_back(rad.done());
  return rep;
}

// Weight-preserving frame homomorphism: g_{i,a} -> h(i,a) g'_{i,a}.
struct FrameHom {
  std::string name;
  FramePtr src, dst;
  std::function<int64_t(int, const Weight&)> h;

  FElem apply(const FElem& x) const {
    FElem r{x.deg, {}};
    int64_t m = dst->modulus();
    for (auto& [a, v] : x.c) fe::add_term(*dst, r, a, padic::mulmod(v, h(x.deg, a), m));
    return r;
  }
};

inline Report validate_hom(const FrameHom& H, const FrameWindow& W) {
  using namespace detail;
  const Frame &S = *H.src, &T = *H.dst;
  const uint32_t p = S.p();
  const int cap = std::max(S.cap(), T.cap());
  const int64_t m = std::min(S.modulus(), T.modulus());
  Report rep{H.name, W.to_json(), {}};
  CheckBuilder wd("well_defined"), un("unit"), tc("commutes_t"), sc("commutes_sigma"), tu("commutes_tau"),
      mc("multiplicative");
  Weight zero = Weight::zero(p);
  if (!eq_mod(H.h(0, zero), 1, p, T.len(0, zero))) un.fail(piece(0, zero));
  for (int i = W.dmin; i <= W.dmax; ++i)
    for (auto& a : W.weights) {
      int64_t hi = H.h(i, a);
      if (!well_defined(hi, S.len(i, a), T.len(i, a), p, cap)) wd.fail(piece(i, a));
      if (i > W.dmin) {
        int64_t l = padic::mulmod(H.h(i - 1, a), S.t_map(i, a), m), r = padic::mulmod(T.t_map(i, a), hi, m);
        if (!eq_mod(l, r, p, T.len(i - 1, a))) tc.fail(piece(i, a));
      }
      Weight st = S.sigma_target(i, a), tt = T.sigma_target(i, a);
      int64_t l = padic::mulmod(H.h(0, st), S.sigma(i, a), m), r = padic::mulmod(T.sigma(i, a), hi, m);
      if (!(st == tt) || !eq_mod(l, r, p, T.len(0, tt))) sc.fail(piece(i, a));
      l = padic::mulmod(H.h(0, a), S.tau(i, a), m);
      r = padic::mulmod(T.tau(i, a), hi, m);
      if (!eq_mod(l, r, p, T.len(0, a))) tu.fail(piece(i, a));
    }
  for (int i = W.dmin; i <= W.dmax; ++i)
    for (int j = W.dmin; j <= W.dmax; ++j) {
      if (i + j < W.dmin || i + j > W.dmax) continue;
      for (auto& a : W.weights)
        for (auto& b : W.weights) {
          int64_t l = padic::mulmod(H.h(i + j, a + b), S.mul(i, a, j, b), m);
          int64_t r = padic::mulmod(T.mul(i, a, j, b), padic::mulmod(H.h(i, a), H.h(j, b), m), m);
          if (!eq_mod(l, r, p, T.len(i + j, a + b))) mc.fail(json{{"x", piece(i, a)}, {"y", piece(j, b)}});
        }
    }
  for (auto* c : {&wd, &un, &tc, &sc, &tu, &mc}) rep.checks.push_back(c->done());
  return rep;
}

// Frame-ideal criterion: sigma(K) and tau(K) land in K_0, A K is in K, t^i: K_0 -> K_{-i} bijective.
inline Report validate_ideal(const FrameIdeal& K, const FrameWindow& W) {
  using namespace detail;
  const Frame& F = *K.host;
  const uint32_t p = F.p();
  const int cap = F.cap();
  Report rep{F.name() + "/" + K.name, W.to_json(), {}};
  CheckBuilder ss("sigma_stable"), tst("tau_stable"), hom("ideal_absorbs"), tb("t_powers_bijective");
  for (int i = W.dmin; i <= W.dmax; ++i)
    for (auto& a : W.weights) {
      int d = K.depth(i, a);
      if (d >= F.len(i, a)) continue;  // K_i(a) = 0
      Weight tg = F.sigma_target(i, a);
      if (d + val(F.sigma(i, a), p, cap) < K.depth(0, tg)) ss.fail(piece(i, a));
      if (d + val(F.tau(i, a), p, cap) < K.depth(0, a)) tst.fail(piece(i, a));
      for (int j = W.dmin; j <= W.dmax; ++j) {
        if (i + j < W.dmin || i + j > W.dmax) continue;
        for (auto& b : W.weights)
          if (d + val(F.mul(i, a, j, b), p, cap) < K.depth(i + j, a + b))
            hom.fail(json{{"k", piece(i, a)}, {"a", piece(j, b)}});
      }
    }
  // t: K_m -> K_{m-1} bijective for m <= 0
  for (int mdeg = 0; mdeg > W.dmin; --mdeg)
    for (auto& a : W.weights) {
      int lm = F.len(mdeg, a), ln = F.len(mdeg - 1, a);
      int dm = K.depth(mdeg, a), dn = K.depth(mdeg - 1, a);
      int v = val(F.t_map(mdeg, a), p, cap);
      bool ok = (lm - dm == ln - dn) && std::min(ln, dm + v) == dn;
      if (!ok) tb.fail(piece(mdeg, a));
    }
  for (auto* c : {&ss, &tst, &hom, &tb}) rep.checks.push_back(c->done());
  return rep;
}

struct QuotientResult {
  FramePtr frame;
  Report ideal_report, frame_report, projection_report;
};

inline QuotientResult quotient_frame(const FrameIdeal& K, const FrameWindow& W, const std::string& name = "") {
  QuotientResult r;
  r.ideal_report = validate_ideal(K, W);
  if (!r.ideal_report.pass()) throw std::invalid_argument("quotient by a failing ideal: " + K.name);
  r.frame = std::make_shared<QuotientFrame>(K.host, K, name.empty() ? K.host->name() + "/" + K.name : name);
  r.frame_report = validate_frame(*r.frame, W);
  FrameHom pr{"projection", K.host, r.frame, [](int, const Weight&) -> int64_t { return 1; }};
  r.projection_report = validate_hom(pr, W);
  return r;
}

// Leveled data of an ideal: per weight, K_0(a) is cyclic with generator k_a = p^{d0(a)} g_{0,a}, and
// sigma-dot(k_a) = c_a k_{pa}.  Nilpotence is tracked along the orbit a, pa, p^2 a, ...
struct LeveledData {
  bool leveled = true;
  json level_witness;
  bool nilpotent_mod_p = true;  // on K_0/p
  int bound_mod_p = 0;          // max steps to reach p K_0 over the window
  int bound_exact = 0;          // max steps to reach 0 exactly (p-power torsion case)
  json nil_witness;

  json to_json() const {
    json j{{"leveled", leveled}, {"nilpotent", nilpotent_mod_p}, {"bound_mod_p", bound_mod_p},
           {"bound_exact", bound_exact}};
    if (!leveled) j["witness"] = level_witness;
    if (leveled && !nilpotent_mod_p) j["witness"] = nil_witness;
    return j;
  }
};

// sigma-dot on K_0 generators: coefficient c with sigma-dot(k_a) = c k_{target}, valuation tracked.
inline int64_t sigma_dot_coeff(const FrameIdeal& K, const Weight& a) {
  const Frame& F = *K.host;
  const uint32_t p = F.p();
  const int cap = F.cap();
  int d0 = K.depth(0, a), d1 = K.depth(1, a);
  int64_t t1 = F.tau(1, a);
  int v = detail::val(t1, p, cap);
  if (std::min(F.len(0, a), d1 + v) != d0)
    throw std::domain_error("sigma-dot requested on a non-leveled ideal");
  if (d0 >= F.len(0, a)) return 0;
  int64_t m = padic::pw(p, cap);
  int64_t unit = (t1 / padic::pw(p, v)) % m;
  // tau_1^{-1}(p^{d0} g_0) = unit^{-1} p^{d1} g_1
  int64_t x = padic::mulmod(padic::inv(unit, m), ppow_res(p, d1, cap), m);
  Weight tg = F.sigma_target(1, a);
  int64_t s = padic::mulmod(x, F.sigma(1, a), m);  // in terms of g_{0,tg}
  int dt = K.depth(0, tg);
  if (dt >= F.len(0, tg)) return 0;
  int vs = detail::val(s, p, cap);
  if (vs < dt) throw std::logic_error("sigma(K_1) not inside K_0");
  return padic::mod(s / padic::pw(p, dt), m);
}

inline LeveledData leveled_data(const FrameIdeal& K, const FrameWindow& W, int step_cap = 64) {
  const Frame& F = *K.host;
  const uint32_t p = F.p();
  const int cap = F.cap();
  LeveledData L;
  for (auto& a : W.weights) {
    int l0 = F.len(0, a), l1 = F.len(1, a);
    int d0 = K.depth(0, a), d1 = K.depth(1, a);
    int v = detail::val(F.tau(1, a), p, cap);
    bool ok = (l1 - d1 == l0 - d0) && std::min(l0, d1 + v) == d0;
    if (!ok && L.leveled) {
      L.leveled = false;
      L.level_witness = json{{"weight", a.str()}, {"K1", l1 - d1}, {"K0", l0 - d0}, {"tau1_val", v}};
    }
  }
  if (!L.leveled) {
    L.nilpotent_mod_p = false;
    return L;
  }
  for (auto& a : W.weights) {
    // walk the orbit of the generator k_a; val = p-adic valuation of the accumulated coefficient
    Weight w = a;
    int acc = 0, steps = 0, steps_p = -1;
    bool done = false;
    while (!done) {
      int size = F.len(0, w) - K.depth(0, w);
      if (size <= 0 || acc >= size) { done = true; break; }
      if (steps_p < 0 && acc >= 1) steps_p = steps;
      if (steps >= step_cap) break;
      int64_t c = sigma_dot_coeff(K, w);
      Weight nw = F.sigma_target(1, w);
      if (c == 0) acc = kInfVal;
      else acc += detail::val(c, p, cap);
      if (nw == w && c != 0 && detail::val(c, p, cap) == 0 && acc == 0) {
        // sigma-dot-stable line with unit coefficient: never nilpotent
        L.nilpotent_mod_p = false;
        L.nil_witness = json{{"weight", w.str()}, {"stable_line", true}, {"coefficient", c}};
        break;
      }
      w = nw;
      ++steps;
    }
    if (!L.nilpotent_mod_p) break;
    if (steps_p < 0) steps_p = steps;
    if (!done) {
      L.nilpotent_mod_p = false;
      L.nil_witness = json{{"weight", a.str()}, {"steps_exceeded", step_cap}};
      break;
    }
    L.bound_mod_p = std::max(L.bound_mod_p, steps_p);
    L.bound_exact = std::max(L.bound_exact, steps);
  }
  return L;
}

}  // namespace gerbe

#endif
