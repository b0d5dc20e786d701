#ifndef GERBE_PD_HPP
#define GERBE_PD_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <set>

#include "frame.hpp"

namespace gerbe {

using rational = boost::multiprecision::cpp_rational;

// Normal-form monomial [x^b] * prod_{i>=1} delta_i^{e_i} with 0 <= b < c p and 0 <= e_i < p,
// where xi = [x^c] and delta_i = gamma_{p^i}(xi).  Trailing zero digits are trimmed.
struct PDMono {
  Weight b;
  std::vector<uint32_t> e;  // e[0] is the exponent of delta_1

  auto operator<=>(const PDMono& o) const {
    if (auto c = b <=> o.b; c != 0) return c;
    return e <=> o.e;
  }
  bool operator==(const PDMono& o) const { return b == o.b && e == o.e; }
  void trim() {
    while (!e.empty() && e.back() == 0) e.pop_back();
  }
  json to_json() const { return json::array({b.str(), e}); }
};

struct PDElement {
  std::map<PDMono, int64_t> t;  // coefficients mod p^N
  bool is_zero() const { return t.empty(); }
  bool operator==(const PDElement& o) const { return t == o.t; }
};

// A raw product coeff * [x^s] * prod gamma_{m_k}(xi), before normalisation.
struct PDTerm {
  int64_t coeff = 1;
  Weight s;
  std::vector<uint64_t> gammas;
};
using PDExpr = std::vector<PDTerm>;

class PDEngine {
 public:
  // N = working precision exponent; c = the cut (xi = [x^c]).
  PDEngine(uint32_t p, Weight c, int N) : p_(p), c_(c), N_(N), m_(padic::pw(p, N)) {
    if (N < 1) throw std::invalid_argument("PD working precision must be >= 1");
  }
  uint32_t p() const { return p_; }
  const Weight& cut() const { return c_; }
  int precision() const { return N_; }
  int64_t modulus() const { return m_; }

  // delta_i^p = C_i delta_{i+1},  C_i = (p^{i+1})! / ((p^i)!)^p   (v_p(C_i) = 1)
  int64_t carry_delta(int i) const {
    bigint num = padic::factorial(padic::pw(p_, i + 1));
    bigint den = boost::multiprecision::pow(padic::factorial(padic::pw(p_, i)), p_);
    return padic::to_res(num / den, m_);
  }
  // phi(delta_i) = D_i delta_{i+1},  D_i = (p^{i+1})! / (p^i)!
  int64_t phi_delta(int i) const {
    return padic::to_res(padic::factorial(padic::pw(p_, i + 1)) / padic::factorial(padic::pw(p_, i)), m_);
  }
  int64_t p_factorial() const { return padic::to_res(padic::factorial(p_), m_); }

  Weight weight(const PDMono& mo) const {
    Weight w = mo.b;
    for (size_t i = 0; i < mo.e.size(); ++i)
      if (mo.e[i]) w = w + c_.times_int((uint64_t)mo.e[i] * (uint64_t)padic::pw(p_, (int)i + 1));
    return w;
  }

  // Adds coeff * [x^b] prod delta^e (unnormalised digits allowed) to out, applying the carry rules.
  void add_raw(PDElement& out, int64_t coeff, Weight b, std::vector<uint64_t> e) const {
    coeff = padic::mod(coeff, m_);
    if (coeff == 0) return;
    Weight cp = c_.times_int(p_);
    while (!(b < cp)) {
      b = b - cp;
      coeff = padic::mulmod(coeff, p_factorial(), m_);  // xi^p = p! delta_1
      if (e.empty()) e.push_back(0);
      e[0] += 1;
      if (coeff == 0) return;
    }
    for (size_t i = 0; i < e.size(); ++i) {
      while (e[i] >= p_) {
        e[i] -= p_;
        coeff = padic::mulmod(coeff, carry_delta((int)i + 1), m_);
        if (i + 1 == e.size()) e.push_back(0);
        e[i + 1] += 1;
        if (coeff == 0) return;
      }
    }
    PDMono mo{b, {}};
    for (auto x : e) mo.e.push_back((uint32_t)x);
    mo.trim();
    int64_t v = padic::mod((out.t.count(mo) ? out.t[mo] : 0) + coeff, m_);
    if (v == 0) out.t.erase(mo);
    else out.t[mo] = v;
  }

  PDElement one() const {
    PDElement r;
    add_raw(r, 1, Weight::zero(p_), {});
    return r;
  }

  PDElement add(const PDElement& x, const PDElement& y) const {
    PDElement r = x;
    for (auto& [mo, v] : y.t) add_raw(r, v, mo.b, widen(mo.e));
    return r;
  }
  PDElement scale(const PDElement& x, int64_t s) const {
    PDElement r;
    for (auto& [mo, v] : x.t) add_raw(r, padic::mulmod(v, padic::mod(s, m_), m_), mo.b, widen(mo.e));
    return r;
  }
  PDElement mul(const PDElement& x, const PDElement& y) const {
    PDElement r;
    for (auto& [a, u] : x.t)
      for (auto& [b, v] : y.t) {
        std::vector<uint64_t> e(std::max(a.e.size(), b.e.size()), 0);
        for (size_t i = 0; i < a.e.size(); ++i) e[i] += a.e[i];
        for (size_t i = 0; i < b.e.size(); ++i) e[i] += b.e[i];
        add_raw(r, padic::mulmod(u, v, m_), a.b + b.b, e);
      }
    return r;
  }

  // gamma_m(xi) = (prod_{i>=1} (p^i)!^{m_i} / m!) [x^{c m_0}] prod delta_i^{m_i}, the ratio a p-adic unit.
  PDElement gamma(uint64_t m) const {
    std::vector<uint64_t> dig;
    for (uint64_t x = m; x; x /= p_) dig.push_back(x % p_);
    bigint num = 1;
    for (size_t i = 1; i < dig.size(); ++i)
      num *= boost::multiprecision::pow(padic::factorial(padic::pw(p_, (int)i)), (unsigned)dig[i]);
    bigint den = padic::factorial(m);
    int vn = padic::vp(num, p_), vd = padic::vp(den, p_);
    if (vn != vd) throw std::logic_error("gamma digit ratio is not a unit");
    bigint pv = boost::multiprecision::pow(bigint(p_), (unsigned)vn);
    int64_t u = padic::mulmod(padic::to_res(num / pv, m_), padic::inv(padic::to_res(den / pv, m_), m_), m_);
    PDElement r;
    std::vector<uint64_t> e;
    for (size_t i = 1; i < dig.size(); ++i) e.push_back(dig[i]);
    add_raw(r, u, c_.times_int(dig.empty() ? 0 : dig[0]), e);
    return r;
  }

  PDElement teich(const Weight& s, int64_t coeff = 1) const {
    PDElement r;
    add_raw(r, coeff, s, {});
    return r;
  }

  PDElement normal_form(const PDExpr& ex) const {
    PDElement r;
    for (auto& term : ex) {
      PDElement x = teich(term.s, term.coeff);
      for (auto m : term.gammas) x = mul(x, gamma(m));
      r = add(r, x);
    }
    return r;
  }
  PDElement renormalize(const PDElement& x) const {
    PDElement r;
    for (auto& [mo, v] : x.t) add_raw(r, v, mo.b, widen(mo.e));
    return r;
  }

  // phi([x^b]) = [x^{pb}], phi(delta_i) = D_i delta_{i+1}, identity on coefficients
  PDElement phi(const PDElement& x) const {
    PDElement r;
    for (auto& [mo, v] : x.t) {
      int64_t c = v;
      std::vector<uint64_t> e(mo.e.size() + 1, 0);
      for (size_t i = 0; i < mo.e.size(); ++i) {
        e[i + 1] = mo.e[i];
        for (uint32_t k = 0; k < mo.e[i]; ++k) c = padic::mulmod(c, phi_delta((int)i + 1), m_);
      }
      add_raw(r, c, mo.b.times_p(), e);
    }
    return r;
  }

  // phi(x) / p; the result is meaningful mod p^{N-1}.  Throws if phi(x) is not divisible by p.
  PDElement divided_frobenius(const PDElement& x) const {
    PDElement y = phi(x), r;
    for (auto& [mo, v] : y.t) {
      if (v % p_ != 0) throw std::domain_error("divided Frobenius: element outside the ideal");
      add_raw(r, v / p_, mo.b, widen(mo.e));
    }
    return r;
  }

  // Basis element beta_a of the weight-a line: a = c m + r, m = sum e_i p^i, b = c e_0 + r.
  PDMono basis_mono(const Weight& a) const {
    uint64_t m = a.floor_div(c_);
    Weight r = a - c_.times_int(m);
    PDMono mo{r, {}};
    uint64_t e0 = m % p_;
    mo.b = r + c_.times_int(e0);
    for (uint64_t x = m / p_; x; x /= p_) mo.e.push_back((uint32_t)(x % p_));
    mo.trim();
    return mo;
  }
  PDElement basis(const Weight& a) const {
    PDElement r;
    r.t[basis_mono(a)] = 1;
    return r;
  }

  // Coefficient of beta_a in an element homogeneous of weight a.
  int64_t coordinate(const PDElement& x, const Weight& a) const {
    PDMono mo = basis_mono(a);
    int64_t v = 0;
    for (auto& [k, c] : x.t) {
      if (!(weight(k) == a)) throw std::logic_error("element not homogeneous of weight " + a.str());
      if (!(k == mo)) throw std::logic_error("non-normal monomial in weight " + a.str());
      v = c;
    }
    return v;
  }

  json to_json(const PDElement& x) const {
    json arr = json::array();
    for (auto& [mo, v] : x.t) {
      GradedElement coeff = GradedElement::monomial(make_ring(p_, N_, std::nullopt, (int)mo.b.k()), mo.b, v);
      arr.push_back(json{{"monomial", mo.e}, {"coeff", coeff.to_json()}});
    }
    return arr;
  }

 private:
  static std::vector<uint64_t> widen(const std::vector<uint32_t>& e) { return {e.begin(), e.end()}; }
  uint32_t p_;
  Weight c_;
  int N_;
  int64_t m_;
};

// ---- rational oracle: compute in W(R^flat)[1/p] with gamma_m(xi) := xi^m / m! ----

// Per weight, the rational multiple of [x^weight].
using RatValue = std::map<Weight, rational>;

inline void rat_add(RatValue& r, const Weight& w, const rational& q) {
  auto& v = r[w];
  v += q;
  if (v == 0) r.erase(w);
}

inline RatValue oracle_value(const PDExpr& ex, uint32_t p, const Weight& c) {
  if (c.p() != p) throw std::invalid_argument("cut uses a different prime");
  RatValue r;
  for (auto& term : ex) {
    Weight w = term.s;
    rational q = term.coeff;
    for (auto m : term.gammas) {
      w = w + c.times_int(m);
      q /= rational(padic::factorial(m));
    }
    rat_add(r, w, q);
  }
  return r;
}

inline RatValue oracle_value(const PDEngine& E, const PDElement& x) {
  RatValue r;
  for (auto& [mo, v] : x.t) {
    bigint den = 1;
    for (size_t i = 0; i < mo.e.size(); ++i)
      den *= boost::multiprecision::pow(padic::factorial(padic::pw(E.p(), (int)i + 1)), mo.e[i]);
    rat_add(r, E.weight(mo), rational(bigint(v), den));
  }
  return r;
}

inline int vp_rational(const rational& q, uint32_t p) {
  if (q == 0) return kInfVal;
  return padic::vp(boost::multiprecision::numerator(q), p) - padic::vp(boost::multiprecision::denominator(q), p);
}

// e(a) = v_p(floor(a/c)!): the denominator exponent of the weight-a line.
inline int pd_denominator_exp(const Weight& a, const Weight& c, uint32_t p) {
  return padic::vp_factorial(a.floor_div(c), p);
}

// Both values agree up to the working precision, per weight: v_p(q - q') >= N - e(a).
inline bool oracle_agrees(const RatValue& x, const RatValue& y, const PDEngine& E, json* witness = nullptr) {
  std::set<Weight> ws;
  for (auto& [w, q] : x) ws.insert(w);
  for (auto& [w, q] : y) ws.insert(w);
  for (auto& w : ws) {
    rational a = x.count(w) ? x.at(w) : rational(0), b = y.count(w) ? y.at(w) : rational(0);
    int v = vp_rational(a - b, E.p());
    if (v < E.precision() - pd_denominator_exp(w, E.cut(), E.p())) {
      if (witness) *witness = json{{"weight", w.str()}, {"lhs", a.str()}, {"rhs", b.str()}};
      return false;
    }
  }
  return true;
}

}  // namespace gerbe

#endif
