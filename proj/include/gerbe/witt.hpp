#ifndef GERBE_WITT_HPP
#define GERBE_WITT_HPP

#include <filesystem>
#include <fstream>
#include <mutex>

#include "rings.hpp"

namespace gerbe {

// Integer polynomial in nv variables, dense exponent vectors as keys.
struct Poly {
  using Mono = std::vector<uint32_t>;
  int nv = 0;
  std::map<Mono, bigint> t;

  Poly() = default;
  explicit Poly(int n) : nv(n) {}
  static Poly var(int n, int i) {
    Poly r(n);
    Mono m(n, 0);
    m[i] = 1;
    r.t[m] = 1;
    return r;
  }
  static Poly constant(int n, const bigint& c) {
    Poly r(n);
    if (c != 0) r.t[Mono(n, 0)] = c;
    return r;
  }
  void add(const Mono& m, const bigint& c) {
    auto& v = t[m];
    v += c;
    if (v == 0) t.erase(m);
  }
  Poly operator+(const Poly& o) const {
    Poly r = *this;
    for (auto& [m, c] : o.t) r.add(m, c);
    return r;
  }
  Poly operator-(const Poly& o) const {
    Poly r = *this;
    for (auto& [m, c] : o.t) r.add(m, -c);
    return r;
  }
  Poly operator*(const Poly& o) const {
    Poly r(nv);
    for (auto& [m, c] : t)
      for (auto& [n, d] : o.t) {
        Mono s(nv);
        for (int i = 0; i < nv; ++i) s[i] = m[i] + n[i];
        r.add(s, c * d);
      }
    return r;
  }
  Poly scale(const bigint& s) const {
    Poly r(nv);
    if (s == 0) return r;
    for (auto& [m, c] : t) r.t[m] = c * s;
    return r;
  }
  Poly pow(uint64_t e) const {
    Poly r = constant(nv, 1), b = *this;
    while (e) {
      if (e & 1) r = r * b;
      e >>= 1;
      if (e) b = b * b;
    }
    return r;
  }
  // exact division; throws if some coefficient is not divisible
  Poly div_exact(const bigint& d) const {
    Poly r(nv);
    for (auto& [m, c] : t) {
      if (c % d != 0) throw std::logic_error("inexact division in Witt polynomial recursion");
      r.t[m] = c / d;
    }
    return r;
  }
  bool operator==(const Poly& o) const { return nv == o.nv && t == o.t; }

  bigint eval(const std::vector<bigint>& x) const {
    bigint s = 0;
    for (auto& [m, c] : t) {
      bigint term = c;
      for (int i = 0; i < nv; ++i)
        if (m[i]) term *= boost::multiprecision::pow(x[i], m[i]);
      s += term;
    }
    return s;
  }

  json to_json() const {
    json arr = json::array();
    for (auto& [m, c] : t) arr.push_back(json::array({m, c.str()}));
    return arr;
  }
  static Poly from_json(int nv, const json& j) {
    Poly r(nv);
    for (auto& e : j) r.t[e.at(0).get<Mono>()] = bigint(e.at(1).get<std::string>());
    return r;
  }
};

// w_j(X) = sum_{i<=j} p^i X_i^{p^{j-i}}
template <class T, class Pow, class Scale>
T ghost_generic(const std::vector<T>& x, int j, uint32_t p, Pow powf, Scale scalef) {
  T s = scalef(powf(x[0], padic::pw(p, j)), 1);
  for (int i = 1; i <= j; ++i) s = s + scalef(powf(x[i], padic::pw(p, j - i)), padic::pw(p, i));
  return s;
}

inline Poly ghost_poly(const std::vector<Poly>& x, int j, uint32_t p) {
  return ghost_generic(
      x, j, p, [](const Poly& a, int64_t e) { return a.pow(e); },
      [](const Poly& a, int64_t s) { return a.scale(s); });
}

// Solve w_j(X) = G_j recursively; every division is exact over Z.
inline std::vector<Poly> unghost_poly(const std::vector<Poly>& G, uint32_t p) {
  std::vector<Poly> X;
  for (size_t j = 0; j < G.size(); ++j) {
    Poly r = G[j];
    for (size_t i = 0; i < j; ++i) r = r - X[i].pow(padic::pw(p, j - i)).scale(padic::pw(p, i));
    X.push_back(r.div_exact(padic::pw(p, j)));
  }
  return X;
}

struct WittPolynomialTable {
  uint32_t p = 2;
  int L = 1;
  std::vector<Poly> S, P, F, V;  // S,P in 2L vars (a then b); F in L+1 vars; V in L vars

  json to_json() const {
    auto arr = [](const std::vector<Poly>& v) {
      json a = json::array();
      for (auto& q : v) a.push_back(q.to_json());
      return a;
    };
    return json{{"p", p}, {"L", L}, {"S", arr(S)}, {"P", arr(P)}, {"F", arr(F)}, {"V", arr(V)}};
  }
  static WittPolynomialTable from_json(const json& j) {
    WittPolynomialTable t;
    t.p = j.at("p").get<uint32_t>();
    t.L = j.at("L").get<int>();
    auto rd = [](const json& a, int nv) {
      std::vector<Poly> v;
      for (auto& q : a) v.push_back(Poly::from_json(nv, q));
      return v;
    };
    t.S = rd(j.at("S"), 2 * t.L);
    t.P = rd(j.at("P"), 2 * t.L);
    t.F = rd(j.at("F"), t.L + 1);
    t.V = rd(j.at("V"), t.L);
    return t;
  }
};

constexpr int kWittLengthCap = 4;

inline WittPolynomialTable compute_tables(uint32_t p, int L) {
  if (L < 1) throw std::invalid_argument("Witt length must be >= 1");
  if (L > kWittLengthCap) throw precision_error("Witt length above cap " + std::to_string(kWittLengthCap));
  WittPolynomialTable t;
  t.p = p;
  t.L = L;
  int nv = 2 * L;
  std::vector<Poly> a, b;
  for (int i = 0; i < L; ++i) {
    a.push_back(Poly::var(nv, i));
    b.push_back(Poly::var(nv, L + i));
  }
  std::vector<Poly> gs, gp;
  for (int j = 0; j < L; ++j) {
    Poly wa = ghost_poly(a, j, p), wb = ghost_poly(b, j, p);
    gs.push_back(wa + wb);
    gp.push_back(wa * wb);
  }
  t.S = unghost_poly(gs, p);
  t.P = unghost_poly(gp, p);
  std::vector<Poly> c;
  for (int i = 0; i <= L; ++i) c.push_back(Poly::var(L + 1, i));
  std::vector<Poly> gf;
  for (int j = 0; j < L; ++j) gf.push_back(ghost_poly(c, j + 1, p));
  t.F = unghost_poly(gf, p);
  t.V.push_back(Poly(L));
  for (int j = 1; j < L; ++j) t.V.push_back(Poly::var(L, j - 1));
  return t;
}

// Write-once cache keyed by (p, L): in memory, mirrored to `dir` when set.
class TableCache {
 public:
  static TableCache& instance() {
    static TableCache c;
    return c;
  }
  void set_directory(const std::string& dir) {
    std::lock_guard<std::mutex> g(m_);
    dir_ = dir;
  }
  const WittPolynomialTable& get(uint32_t p, int L) {
    std::lock_guard<std::mutex> g(m_);
    auto key = std::make_pair(p, L);
    auto it = mem_.find(key);
    if (it != mem_.end()) return it->second;
    WittPolynomialTable t;
    std::string path = dir_.empty() ? "" : dir_ + "/witt_p" + std::to_string(p) + "_L" + std::to_string(L) + ".json";
    if (!path.empty() && std::filesystem::exists(path)) {
      std::ifstream in(path);
      t = WittPolynomialTable::from_json(json::parse(in));
    } else {
      t = compute_tables(p, L);
      if (!path.empty()) {
        std::filesystem::create_directories(dir_);
        std::ofstream out(path);
        out << t.to_json().dump();
      }
    }
    return mem_.emplace(key, std::move(t)).first->second;
  }

 private:
  std::mutex m_;
  std::string dir_;
  std::map<std::pair<uint32_t, int>, WittPolynomialTable> mem_;
};

inline const WittPolynomialTable& build_tables(uint32_t p, int L) { return TableCache::instance().get(p, L); }

// ---- ghost-side oracle over integer lifts ----

inline std::vector<bigint> ghost_vector(const std::vector<bigint>& a, uint32_t p) {
  std::vector<bigint> w;
  for (size_t j = 0; j < a.size(); ++j) {
    bigint s = 0;
    for (size_t i = 0; i <= j; ++i) s += boost::multiprecision::pow(bigint(p), (unsigned)i) *
                                         boost::multiprecision::pow(a[i], (unsigned)padic::pw(p, (int)(j - i)));
    w.push_back(s);
  }
  return w;
}

inline std::vector<bigint> unghost_vector(const std::vector<bigint>& w, uint32_t p) {
  std::vector<bigint> x;
  for (size_t j = 0; j < w.size(); ++j) {
    bigint r = w[j];
    for (size_t i = 0; i < j; ++i)
      r -= boost::multiprecision::pow(bigint(p), (unsigned)i) *
           boost::multiprecision::pow(x[i], (unsigned)padic::pw(p, (int)(j - i)));
    bigint d = boost::multiprecision::pow(bigint(p), (unsigned)j);
    if (r % d != 0) throw std::logic_error("ghost vector is not integral");
    x.push_back(r / d);
  }
  return x;
}

enum class WittOp { add, mul, frob, ver };

// Reference result computed in ghost coordinates.  For frob, a has length L+1.
inline std::vector<bigint> ghost_oracle(WittOp op, const std::vector<bigint>& a, const std::vector<bigint>& b,
                                        uint32_t p, int L) {
  auto wa = ghost_vector(a, p);
  std::vector<bigint> w(L);
  switch (op) {
    case WittOp::add: {
      auto wb = ghost_vector(b, p);
      for (int j = 0; j < L; ++j) w[j] = wa[j] + wb[j];
      break;
    }
    case WittOp::mul: {
      auto wb = ghost_vector(b, p);
      for (int j = 0; j < L; ++j) w[j] = wa[j] * wb[j];
      break;
    }
    case WittOp::frob:
      for (int j = 0; j < L; ++j) w[j] = wa[j + 1];
      break;
    case WittOp::ver:
      w[0] = 0;
      for (int j = 1; j < L; ++j) w[j] = wa[j - 1] * p;
      break;
  }
  return unghost_vector(w, p);
}

// Same operation through the universal polynomials.
inline std::vector<bigint> table_eval(WittOp op, const std::vector<bigint>& a, const std::vector<bigint>& b,
                                      const WittPolynomialTable& T) {
  std::vector<bigint> out;
  std::vector<bigint> ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  for (int j = 0; j < T.L; ++j) {
    switch (op) {
      case WittOp::add: out.push_back(T.S[j].eval(ab)); break;
      case WittOp::mul: out.push_back(T.P[j].eval(ab)); break;
      case WittOp::frob: out.push_back(T.F[j].eval(a)); break;
      case WittOp::ver: out.push_back(T.V[j].eval(a)); break;
    }
  }
  return out;
}

// ---- Witt vectors over graded rings ----

class WittVector {
 public:
  WittVector() = default;
  WittVector(const RingHandle& R, int L) : R_(R), c_(L, GradedElement(R)) {}
  WittVector(const RingHandle& R, std::vector<GradedElement> coords, std::optional<ExponentQ> w = std::nullopt)
      : R_(R), c_(std::move(coords)), w_(w) {}

  const RingHandle& base() const { return R_; }
  int length() const { return (int)c_.size(); }
  const GradedElement& operator[](int i) const { return c_[i]; }
  GradedElement& operator[](int i) { return c_[i]; }
  const std::vector<GradedElement>& coords() const { return c_; }
  std::optional<ExponentQ> weight() const { return w_; }
  void set_weight(std::optional<ExponentQ> w) { w_ = w; }
  bool is_zero() const {
    for (auto& x : c_)
      if (!x.is_zero()) return false;
    return true;
  }
  bool operator==(const WittVector& o) const { return R_ == o.R_ && c_ == o.c_; }

  // coordinate i homogeneous of weight d p^i
  bool respects_weight() const {
    if (!w_) return true;
    ExponentQ d = *w_;
    for (int i = 0; i < length(); ++i) {
      if (!c_[i].homogeneous_of(d)) return false;
      if (i + 1 < length()) d = d.times_p();
    }
    return true;
  }

  json to_json() const {
    json arr = json::array();
    for (auto& x : c_) arr.push_back(x.to_json());
    return arr;
  }

 private:
  RingHandle R_;
  std::vector<GradedElement> c_;
  std::optional<ExponentQ> w_;
};

namespace detail {

inline GradedElement eval_poly(const Poly& q, const std::vector<GradedElement>& x, const RingHandle& R) {
  GradedElement s(R);
  int64_t m = R.modulus();
  std::vector<std::map<uint32_t, GradedElement>> cache(x.size());
  auto power = [&](int i, uint32_t e) -> const GradedElement& {
    auto it = cache[i].find(e);
    if (it != cache[i].end()) return it->second;
    return cache[i].emplace(e, x[i].pow(e)).first->second;
  };
  for (auto& [mono, c] : q.t) {
    int64_t cr = padic::to_res(c, m);
    if (cr == 0) continue;
    GradedElement term = GradedElement::constant(R, cr);
    for (int i = 0; i < q.nv && !term.is_zero(); ++i)
      if (mono[i]) term = term * power(i, mono[i]);
    s = s + term;
  }
  return s;
}

inline void check_pair(const WittVector& u, const WittVector& v) {
  if (!(u.base() == v.base())) throw std::invalid_argument("Witt vectors over different bases");
  if (u.length() != v.length()) throw std::invalid_argument("Witt length mismatch");
}

}  // namespace detail

inline WittVector witt_add(const WittVector& u, const WittVector& v) {
  detail::check_pair(u, v);
  const auto& T = build_tables(u.base().p, u.length());
  std::vector<GradedElement> x = u.coords();
  x.insert(x.end(), v.coords().begin(), v.coords().end());
  WittVector r(u.base(), u.length());
  for (int j = 0; j < u.length(); ++j) r[j] = detail::eval_poly(T.S[j], x, u.base());
  if (u.weight() && v.weight() && *u.weight() == *v.weight()) r.set_weight(u.weight());
  return r;
}

inline WittVector witt_mul(const WittVector& u, const WittVector& v) {
  detail::check_pair(u, v);
  const auto& T = build_tables(u.base().p, u.length());
  std::vector<GradedElement> x = u.coords();
  x.insert(x.end(), v.coords().begin(), v.coords().end());
  WittVector r(u.base(), u.length());
  for (int j = 0; j < u.length(); ++j) r[j] = detail::eval_poly(T.P[j], x, u.base());
  if (u.weight() && v.weight()) r.set_weight(*u.weight() + *v.weight());
  return r;
}

inline WittVector witt_neg(const WittVector& u) {
  // -1 = (p-1, p-1, ...) for odd p; for p = 2 solve u + x = 0 coordinatewise.
  const RingHandle& R = u.base();
  WittVector r(R, u.length());
  const auto& T = build_tables(R.p, u.length());
  for (int j = 0; j < u.length(); ++j) {
    // S_j(u, x) = u_j + x_j + (terms in lower coordinates); pick x_j to make it vanish
    std::vector<GradedElement> x = u.coords();
    x.insert(x.end(), r.coords().begin(), r.coords().end());
    GradedElement s = detail::eval_poly(T.S[j], x, R);
    r[j] = r[j] - s;
  }
  if (u.weight()) r.set_weight(u.weight());
  return r;
}

inline WittVector witt_sub(const WittVector& u, const WittVector& v) { return witt_add(u, witt_neg(v)); }

inline WittVector teichmuller(const GradedElement& r, int L, std::optional<ExponentQ> w = std::nullopt) {
  WittVector v(r.ring(), L);
  v[0] = r;
  if (!w && r.terms().size() == 1) w = r.terms().begin()->first;
  if (r.is_zero()) w = std::nullopt;
  v.set_weight(w);
  return v;
}

inline WittVector witt_one(const RingHandle& R, int L) {
  return teichmuller(GradedElement::constant(R, 1), L, ExponentQ::zero(R.p));
}

// Coordinatewise on characteristic-p bases.
inline WittVector frobenius_W(const WittVector& u) {
  if (u.base().n != 1) throw std::invalid_argument("coordinatewise Frobenius needs a characteristic-p base");
  WittVector r(u.base(), u.length());
  for (int i = 0; i < u.length(); ++i) r[i] = frobenius(u[i]);
  if (u.weight()) r.set_weight(u.weight()->times_p());
  return r;
}

inline WittVector verschiebung_W(const WittVector& u) {
  WittVector r(u.base(), u.length());
  for (int i = 1; i < u.length(); ++i) r[i] = u[i - 1];
  if (u.weight()) {
    ExponentQ w = u.weight()->div_p();
    if (w.k() > (uint32_t)u.base().kmax) throw precision_error("V pushes weight " + w.str() + " past kmax");
    r.set_weight(w);
  }
  return r;
}

// Frobenius through the universal polynomials (characteristic-p cross-check).
inline WittVector frobenius_W_table(const WittVector& u) {
  const RingHandle& R = u.base();
  const auto& T = build_tables(R.p, u.length());
  std::vector<GradedElement> x = u.coords();
  x.push_back(GradedElement(R));  // top coordinate does not reach the first L outputs mod p
  WittVector r(R, u.length());
  for (int j = 0; j < u.length(); ++j) r[j] = detail::eval_poly(T.F[j], x, R);
  if (u.weight()) r.set_weight(u.weight()->times_p());
  return r;
}

inline WittVector witt_scalar(const WittVector& u, int64_t m) {
  WittVector acc(u.base(), u.length());
  WittVector base = u;
  if (m < 0) {
    base = witt_neg(u);
    m = -m;
  }
  while (m) {
    if (m & 1) acc = witt_add(acc, base);
    m >>= 1;
    if (m) base = witt_add(base, base);
  }
  if (u.weight()) acc.set_weight(u.weight());
  return acc;
}

// Homogeneous weight-d vectors over a characteristic-p ring are lambda [x^d] with lambda in Z/p^L:
// coordinate i = lambda_i x^{d p^i} and lambda = sum p^i omega(lambda_i).
inline int64_t teichmuller_lift(int64_t a, uint32_t p, int L) {
  int64_t m = padic::pw(p, L);
  return padic::powmod(a, (uint64_t)padic::pw(p, L - 1), m);
}

inline int64_t homogeneous_coefficient(const WittVector& u, const ExponentQ& d) {
  const RingHandle& R = u.base();
  if (R.n != 1) throw std::invalid_argument("homogeneous decoding needs a characteristic-p base");
  int L = u.length();
  int64_t m = padic::pw(R.p, L), s = 0;
  ExponentQ w = d;
  for (int i = 0; i < L; ++i) {
    for (auto& [a, c] : u[i].terms())
      if (!(a == w)) throw std::invalid_argument("vector is not homogeneous of weight " + d.str());
    int64_t li = u[i].coeff(w);
    s = padic::mod(s + padic::mulmod(padic::pw(R.p, i), teichmuller_lift(li, R.p, L), m), m);
    if (i + 1 < L) w = w.times_p();
  }
  return s;
}

// Inverse of homogeneous_coefficient: greedy Teichmuller digits.
inline WittVector homogeneous_vector(const RingHandle& R, const ExponentQ& d, int64_t lambda, int L) {
  int64_t m = padic::pw(R.p, L);
  lambda = padic::mod(lambda, m);
  WittVector v(R, L);
  ExponentQ w = d;
  for (int i = 0; i < L; ++i) {
    int64_t digit = padic::mod(lambda, R.p);
    if (R.admits(w)) v[i] = GradedElement::monomial(R, w, digit);
    lambda = padic::mod(lambda - teichmuller_lift(digit, R.p, L), m);
    lambda /= R.p;
    m /= R.p;
    if (i + 1 < L) w = w.times_p();
  }
  v.set_weight(d);
  return v;
}

// Within a weight window, hat-W of a nilpotent ideal is spanned by V^i[x^{d p^i}] with x^{d p^i} in the ideal.
struct HatBasisEntry {
  ExponentQ weight;
  int position;
  WittVector vec;
};

inline std::vector<HatBasisEntry> hat_ideal(const IdealBasis& b, const RingHandle& R,
                                            const std::vector<ExponentQ>& window, int L) {
  std::vector<HatBasisEntry> out;
  if (b.is_zero()) return out;
  if (R.kind != RingKind::monogenic_qrsp) throw std::invalid_argument("hat ideal needs a nilpotent ideal of a cut ring");
  for (auto& d : window) {
    if (d.is_zero()) continue;
    ExponentQ w = d;
    for (int i = 0; i < L; ++i) {
      if (b.contains_exponent(w) && R.admits(w)) {
        WittVector v(R, L);
        v[i] = GradedElement::monomial(R, w, 1);
        v.set_weight(d);
        out.push_back({d, i, v});
      }
      w = w.times_p();
    }
  }
  return out;
}

}  // namespace gerbe

#endif
