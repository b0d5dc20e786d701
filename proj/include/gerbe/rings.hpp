#ifndef GERBE_RINGS_HPP
#define GERBE_RINGS_HPP

#include <map>
#include <optional>
#include <random>
#include <vector>
#include "json.hpp"

#include "exponent.hpp"

namespace gerbe {

using json = nlohmann::json;

enum class RingKind { perfect, monogenic_qrsp, finite_table };

// (Z/p^n)[x^{1/p^inf}] / (x^c).  c = nullopt means no cut (the perfect ring).
// finite_table is the prime field (exponent 0 only).
struct RingHandle {
  uint32_t p = 2;
  int n = 1;
  std::optional<ExponentQ> cut;
  int kmax = 6;
  RingKind kind = RingKind::perfect;

  bool semiperfect() const { return n == 1; }
  bool perfect() const { return kind != RingKind::monogenic_qrsp; }
  int64_t modulus() const { return padic::pw(p, n); }
  bool operator==(const RingHandle& o) const {
    return p == o.p && n == o.n && cut == o.cut && kmax == o.kmax && kind == o.kind;
  }

  // exponent survives in the ring (below the cut, within the denominator cap)
  bool admits(const ExponentQ& a) const {
    if (a.k() > (uint32_t)kmax) throw precision_error("exponent " + a.str() + " exceeds denominator cap");
    if (kind == RingKind::finite_table) return a.is_zero();
    return !cut || a < *cut;
  }

  json to_json() const {
    return json{{"p", p}, {"n", n}, {"cut", cut ? cut->str() : std::string("inf")}, {"kmax", kmax}};
  }
  static RingHandle from_json(const json& j);
};

inline RingHandle make_ring(uint32_t p, int n, std::optional<ExponentQ> c, int kmax) {
  if (!padic::is_prime(p)) throw std::invalid_argument("p must be prime");
  if (n < 1) throw std::invalid_argument("modulus exponent must be >= 1");
  if (kmax < 0) throw std::invalid_argument("kmax must be >= 0");
  RingHandle r;
  r.p = p;
  r.n = n;
  r.kmax = kmax;
  if (!c) {
    r.kind = RingKind::perfect;
    return r;
  }
  if (c->p() != p) throw std::invalid_argument("cut uses a different prime");
  if (*c < ExponentQ::integer(p, 1)) throw std::invalid_argument("cut below 1: quotient not in the supported qrsp family");
  if (c->k() > (uint32_t)kmax) throw std::invalid_argument("cut denominator exceeds kmax");
  r.cut = c;
  r.kind = RingKind::monogenic_qrsp;
  return r;
}

inline RingHandle make_prime_field(uint32_t p, int n = 1) {
  RingHandle r = make_ring(p, n, std::nullopt, 0);
  r.kind = RingKind::finite_table;
  return r;
}

inline RingHandle RingHandle::from_json(const json& j) {
  uint32_t p = j.at("p").get<uint32_t>();
  std::string cut = j.at("cut").get<std::string>();
  std::optional<ExponentQ> c;
  if (cut != "inf") c = ExponentQ::parse(p, cut);
  return make_ring(p, j.at("n").get<int>(), c, j.at("kmax").get<int>());
}

// Finite sum of lambda_a x^a with lambda_a in Z/p^n.
class GradedElement {
 public:
  using Terms = std::map<ExponentQ, int64_t>;

  GradedElement() = default;
  explicit GradedElement(const RingHandle& R) : R_(R) {}
  static GradedElement monomial(const RingHandle& R, const ExponentQ& a, int64_t c = 1) {
    GradedElement e(R);
    e.add_term(a, c);
    return e;
  }
  static GradedElement constant(const RingHandle& R, int64_t c) {
    return monomial(R, ExponentQ::zero(R.p), c);
  }

  const RingHandle& ring() const { return R_; }
  const Terms& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  int64_t coeff(const ExponentQ& a) const {
    auto it = t_.find(a);
    return it == t_.end() ? 0 : it->second;
  }

  void add_term(const ExponentQ& a, int64_t c) {
    if (!R_.admits(a)) return;
    int64_t m = R_.modulus();
    int64_t v = padic::mod(coeff(a) + padic::mod(c, m), m);
    if (v == 0) t_.erase(a);
    else t_[a] = v;
  }

  GradedElement operator+(const GradedElement& o) const {
    same(o);
    GradedElement r = *this;
    for (auto& [a, c] : o.t_) r.add_term(a, c);
    return r;
  }
  GradedElement operator-() const {
    GradedElement r(R_);
    for (auto& [a, c] : t_) r.add_term(a, -c);
    return r;
  }
  GradedElement operator-(const GradedElement& o) const { return *this + (-o); }
  GradedElement operator*(const GradedElement& o) const {
    same(o);
    GradedElement r(R_);
    int64_t m = R_.modulus();
    for (auto& [a, c] : t_)
      for (auto& [b, d] : o.t_) {
        ExponentQ s = a + b;
        if (R_.admits(s)) r.add_term(s, padic::mulmod(c, d, m));
      }
    return r;
  }
  GradedElement scale(int64_t s) const {
    GradedElement r(R_);
    for (auto& [a, c] : t_) r.add_term(a, padic::mulmod(c, padic::mod(s, R_.modulus()), R_.modulus()));
    return r;
  }
  GradedElement pow(uint64_t e) const {
    GradedElement r = constant(R_, 1), b = *this;
    while (e) {
      if (e & 1) r = r * b;
      b = b * b;
      e >>= 1;
    }
    return r;
  }
  bool operator==(const GradedElement& o) const { return R_ == o.R_ && t_ == o.t_; }

  // homogeneous of the given weight (zero counts)
  bool homogeneous_of(const ExponentQ& w) const {
    for (auto& [a, c] : t_)
      if (!(a == w)) return false;
    return true;
  }

  json to_json() const {
    json arr = json::array();
    for (auto& [a, c] : t_) arr.push_back(json::array({a.str(), c}));
    return arr;
  }
  static GradedElement from_json(const RingHandle& R, const json& j) {
    GradedElement e(R);
    for (auto& t : j) e.add_term(ExponentQ::parse(R.p, t.at(0).get<std::string>()), t.at(1).get<int64_t>());
    return e;
  }

 private:
  void same(const GradedElement& o) const {
    if (!(R_ == o.R_)) throw std::invalid_argument("elements of different rings");
  }
  RingHandle R_;
  Terms t_;
};

// x^a -> x^{pa}, lambda -> lambda^p; exponents reaching the cut drop out.
inline GradedElement frobenius(const GradedElement& r) {
  const RingHandle& R = r.ring();
  GradedElement out(R);
  for (auto& [a, c] : r.terms()) {
    ExponentQ b = a.times_p();
    if (R.admits(b)) out.add_term(b, padic::powmod(c, R.p, R.modulus()));
  }
  return out;
}

// Span of monomials with exponent >= threshold; nullopt threshold is the zero ideal.
struct IdealBasis {
  std::optional<ExponentQ> threshold;
  std::vector<GradedElement> generators;  // finite-table rings only

  bool is_zero() const { return !threshold && generators.empty(); }
  bool contains(const GradedElement& r) const {
    if (r.is_zero()) return true;
    if (!threshold) return false;
    for (auto& [a, c] : r.terms())
      if (a < *threshold) return false;
    return true;
  }
  bool contains_exponent(const ExponentQ& a) const { return threshold && !(a < *threshold); }
  json to_json() const {
    return json{{"threshold", threshold ? threshold->str() : std::string("none")}};
  }
};

inline IdealBasis ideal_at(const ExponentQ& t) { return IdealBasis{t, {}}; }
inline IdealBasis zero_ideal() { return IdealBasis{}; }

// R[F^m] = ker(F^m) = span{x^a : c/p^m <= a < c}
inline IdealBasis kernel_of_frobenius_power(const RingHandle& R, int m) {
  if (R.kind != RingKind::monogenic_qrsp) throw std::invalid_argument("kernel_of_frobenius_power needs a cut ring");
  if (m < 0) throw std::invalid_argument("m must be >= 0");
  if (m == 0) return zero_ideal();
  return ideal_at(R.cut->times_ppow(-m));
}

// All j/p^k <= wmax with k <= kmax, sorted.
inline std::vector<ExponentQ> window_weights(uint32_t p, int kmax, const ExponentQ& wmax) {
  std::vector<ExponentQ> out;
  uint64_t top = wmax.floor_div(ExponentQ(p, 1, kmax));
  for (uint64_t j = 0; j <= top; ++j) out.emplace_back(p, j, kmax);
  return out;
}

// Monomial basis of R with exponent <= wmax.
inline std::vector<ExponentQ> weight_window(const RingHandle& R, const ExponentQ& wmax) {
  std::vector<ExponentQ> out;
  for (auto& a : window_weights(R.p, R.kmax, wmax))
    if (R.admits(a)) out.push_back(a);
  return out;
}

inline GradedElement random_element(const RingHandle& R, const std::vector<ExponentQ>& basis, std::mt19937_64& rng,
                                    int max_terms = 4) {
  GradedElement e(R);
  if (basis.empty()) return e;
  std::uniform_int_distribution<size_t> pick(0, basis.size() - 1);
  std::uniform_int_distribution<int64_t> coef(0, R.modulus() - 1);
  std::uniform_int_distribution<int> nt(0, max_terms);
  int t = nt(rng);
  for (int i = 0; i < t; ++i) e.add_term(basis[pick(rng)], coef(rng));
  return e;
}

}  // namespace gerbe

#endif
