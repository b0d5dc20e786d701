#ifndef GERBE_FRAME_HPP
#define GERBE_FRAME_HPP

#include <functional>
#include <memory>
#include <mutex>

#include "rings.hpp"

namespace gerbe {

using Weight = ExponentQ;
constexpr int kInfVal = 1 << 20;

// p^v * u with u a unit; v >= kInfVal encodes 0.
struct PScalar {
  int v = kInfVal;
  int64_t u = 0;
  bool is_zero() const { return v >= kInfVal; }
  static PScalar of(int64_t x, uint32_t p, int64_t m) {
    x = padic::mod(x, m);
    if (x == 0) return {};
    int v = 0;
    while (x % p == 0) { x /= p; ++v; }
    return {v, x};
  }
  int64_t res(uint32_t p, int cap) const {
    if (v >= cap) return 0;
    int64_t m = padic::pw(p, cap);
    return padic::mulmod(padic::pw(p, v), padic::mod(u, m), m);
  }
};

// A graded frame in the per-weight model.  In degree i and weight a the carrier is cyclic,
// Z/p^len(i,a), with a fixed generator g_{i,a}; all structure maps are scalars on generators:
//   t:      g_{i,a} -> t_map(i,a) g_{i-1,a}
//   sigma:  g_{i,a} -> sigma(i,a) g_{0,sigma_target(i,a)}
//   tau:    g_{i,a} -> tau(i,a) g_{0,a}
//   g_{i,a} g_{j,b} = mul(i,a,j,b) g_{i+j,a+b}
// Scalars are residues mod p^cap.  Pieces are produced lazily, for any weight.
class Frame {
 public:
  Frame(uint32_t p, int cap, std::string name) : p_(p), cap_(cap), name_(std::move(name)) {}
  virtual ~Frame() = default;

  uint32_t p() const { return p_; }
  int cap() const { return cap_; }
  int64_t modulus() const { return padic::pw(p_, cap_); }
  const std::string& name() const { return name_; }

  virtual int len(int i, const Weight& a) const = 0;
  virtual int64_t t_map(int i, const Weight& a) const = 0;
  virtual Weight sigma_target(int, const Weight& a) const { return a.times_p(); }
  virtual int64_t sigma(int i, const Weight& a) const = 0;
  virtual int64_t tau(int i, const Weight& a) const = 0;
  // explicit inverse of tau_i for i < 0 (the certificate of bijectivity)
  virtual int64_t tau_inverse(int i, const Weight& a) const = 0;
  virtual int64_t mul(int i, const Weight& a, int j, const Weight& b) const = 0;
  // t = t_coeff() * g_{-1,0}
  virtual int64_t t_coeff() const { return 1; }

 protected:
  uint32_t p_;
  int cap_;
  std::string name_;
};

using FramePtr = std::shared_ptr<const Frame>;

inline int64_t ppow_res(uint32_t p, int e, int cap) {
  if (e < 0) throw std::logic_error("negative p-power in frame scalar");
  return e >= cap ? 0 : padic::pw(p, e);
}

// Rees frame of a torsion-free weight-graded ring with rank-one pieces: basis beta_a,
// phi(beta_a) = Phi(a) beta_{pa}, beta_a beta_b = M(a,b) beta_{a+b}.  Degree i > 0 carries the
// Nygaard piece {x : phi(x) in p^i}, generated by p^{f_i(a)} beta_a with f_i = max(0, i - v(Phi(a))).
class ReesFrame : public Frame {
 public:
  using Frame::Frame;

  virtual PScalar Phi(const Weight& a) const = 0;
  virtual PScalar M(const Weight& a, const Weight& b) const = 0;

  int filt(int i, const Weight& a) const {
    if (i <= 0) return 0;
    return std::max(0, i - std::min(Phi(a).v, i));
  }
  int len(int, const Weight&) const override { return cap_; }
  int64_t t_map(int i, const Weight& a) const override {
    return ppow_res(p_, filt(i, a) - filt(i - 1, a), cap_);
  }
  int64_t sigma(int i, const Weight& a) const override {
    PScalar f = Phi(a);
    if (f.is_zero()) return 0;
    int e = filt(i, a) - i + f.v;
    return padic::mulmod(ppow_res(p_, e, cap_), padic::mod(f.u, modulus()), modulus());
  }
  int64_t tau(int i, const Weight& a) const override { return ppow_res(p_, filt(i, a), cap_); }
  int64_t tau_inverse(int i, const Weight& a) const override {
    if (i >= 0 && filt(i, a) > 0) throw std::domain_error("tau not invertible in positive degree");
    return 1;
  }
  int64_t mul(int i, const Weight& a, int j, const Weight& b) const override {
    PScalar m = M(a, b);
    if (m.is_zero()) return 0;
    int e = filt(i, a) + filt(j, b) - filt(i + j, a + b) + m.v;
    if (e < 0) throw std::logic_error("Rees product not integral at " + a.str() + "," + b.str());
    return padic::mulmod(ppow_res(p_, e, cap_), padic::mod(m.u, modulus()), modulus());
  }
};

// Rees frame given by closures, with write-once memo tables.
class TableReesFrame : public ReesFrame {
 public:
  using PhiFn = std::function<PScalar(const Weight&)>;
  using MFn = std::function<PScalar(const Weight&, const Weight&)>;
  TableReesFrame(uint32_t p, int cap, std::string name, PhiFn phi, MFn m)
      : ReesFrame(p, cap, std::move(name)), phi_(std::move(phi)), m_(std::move(m)) {}

  PScalar Phi(const Weight& a) const override {
    std::lock_guard<std::mutex> g(mu_);
    auto it = phic_.find(a);
    if (it != phic_.end()) return it->second;
    PScalar r = phi_(a);
    phic_.emplace(a, r);
    return r;
  }
  PScalar M(const Weight& a, const Weight& b) const override {
    const Weight& x = a < b ? a : b;
    const Weight& y = a < b ? b : a;
    std::lock_guard<std::mutex> g(mu_);
    auto key = std::make_pair(x, y);
    auto it = mc_.find(key);
    if (it != mc_.end()) return it->second;
    PScalar r = m_(x, y);
    mc_.emplace(key, r);
    return r;
  }

 private:
  PhiFn phi_;
  MFn m_;
  mutable std::mutex mu_;
  mutable std::map<Weight, PScalar> phic_;
  mutable std::map<std::pair<Weight, Weight>, PScalar> mc_;
};

// Homogeneous ideal K with K_i(a) = p^kappa(i,a) A_i(a).
struct FrameIdeal {
  std::string name;
  FramePtr host;
  std::function<int(int, const Weight&)> kappa;

  // exponent of the ideal inside the (possibly shorter) host piece
  int depth(int i, const Weight& a) const { return std::min(kappa(i, a), host->len(i, a)); }
  // log_p of the order of K_i(a)
  int size(int i, const Weight& a) const { return host->len(i, a) - depth(i, a); }

  static FrameIdeal zero(FramePtr A) {
    FramePtr h = A;
    return {"0", A, [h](int i, const Weight& a) { return h->len(i, a); }};
  }
  static FrameIdeal ppow(FramePtr A, int n) {
    return {"p^" + std::to_string(n) + "A", A, [n](int, const Weight&) { return n; }};
  }
};

// A / K.  Same generators and scalars; lengths cut down to the ideal exponent.
class QuotientFrame : public Frame {
 public:
  QuotientFrame(FramePtr base, FrameIdeal K, std::string name)
      : Frame(base->p(), base->cap(), std::move(name)), b_(std::move(base)), K_(std::move(K)) {}

  int len(int i, const Weight& a) const override { return K_.depth(i, a); }
  int64_t t_map(int i, const Weight& a) const override { return b_->t_map(i, a); }
  Weight sigma_target(int i, const Weight& a) const override { return b_->sigma_target(i, a); }
  int64_t sigma(int i, const Weight& a) const override { return b_->sigma(i, a); }
  int64_t tau(int i, const Weight& a) const override { return b_->tau(i, a); }
  int64_t tau_inverse(int i, const Weight& a) const override { return b_->tau_inverse(i, a); }
  int64_t mul(int i, const Weight& a, int j, const Weight& b) const override { return b_->mul(i, a, j, b); }
  int64_t t_coeff() const override { return b_->t_coeff(); }

  const FramePtr& base() const { return b_; }
  const FrameIdeal& ideal() const { return K_; }

 private:
  FramePtr b_;
  FrameIdeal K_;
};

// Kills all weights above wmax.  Weights only grow under products and sigma, so this is an ideal.
inline FrameIdeal above_weight(FramePtr A, const Weight& wmax) {
  FramePtr h = A;
  return {"weights>" + wmax.str(), A, [h, wmax](int i, const Weight& a) { return wmax < a ? 0 : h->len(i, a); }};
}

inline FramePtr window_quotient(FramePtr A, const Weight& wmax) {
  std::string nm = A->name() + "|w<=" + wmax.str();
  return std::make_shared<QuotientFrame>(A, above_weight(A, wmax), nm);
}

// Negative control: sigma_0 replaced by the identity (weight-preserving).
class SabotagedSigmaFrame : public Frame {
 public:
  explicit SabotagedSigmaFrame(FramePtr base)
      : Frame(base->p(), base->cap(), base->name() + "[sigma0=id]"), b_(std::move(base)) {}
  int len(int i, const Weight& a) const override { return b_->len(i, a); }
  int64_t t_map(int i, const Weight& a) const override { return b_->t_map(i, a); }
  Weight sigma_target(int i, const Weight& a) const override { return i == 0 ? a : b_->sigma_target(i, a); }
  int64_t sigma(int i, const Weight& a) const override { return i == 0 ? 1 : b_->sigma(i, a); }
  int64_t tau(int i, const Weight& a) const override { return b_->tau(i, a); }
  int64_t tau_inverse(int i, const Weight& a) const override { return b_->tau_inverse(i, a); }
  int64_t mul(int i, const Weight& a, int j, const Weight& b) const override { return b_->mul(i, a, j, b); }
  int64_t t_coeff() const override { return b_->t_coeff(); }

 private:
  FramePtr b_;
};

// ---- elements ----

// Homogeneous-degree element: sum over weights of c_a g_{deg,a}, c_a mod p^len(deg,a).
struct FElem {
  int deg = 0;
  std::map<Weight, int64_t> c;

  bool is_zero() const { return c.empty(); }
  int64_t at(const Weight& a) const {
    auto it = c.find(a);
    return it == c.end() ? 0 : it->second;
  }
  bool operator==(const FElem& o) const { return (deg == o.deg || (is_zero() && o.is_zero())) && c == o.c; }
  json to_json() const {
    json arr = json::array();
    for (auto& [a, v] : c) arr.push_back(json::array({a.str(), v}));
    return json{{"deg", deg}, {"terms", arr}};
  }
};

namespace fe {

inline void add_term(const Frame& F, FElem& x, const Weight& a, int64_t v) {
  int l = F.len(x.deg, a);
  if (l <= 0) return;
  int64_t m = padic::pw(F.p(), l);
  int64_t r = padic::mod(x.at(a) + padic::mod(v, m), m);
  if (r == 0) x.c.erase(a);
  else x.c[a] = r;
}

inline FElem zero(int deg) { return FElem{deg, {}}; }
inline FElem gen(const Frame& F, int deg, const Weight& a, int64_t v = 1) {
  FElem x{deg, {}};
  add_term(F, x, a, v);
  return x;
}
inline FElem one(const Frame& F) { return gen(F, 0, Weight::zero(F.p())); }
inline FElem t_elem(const Frame& F) { return gen(F, -1, Weight::zero(F.p()), F.t_coeff()); }

inline FElem reduce(const Frame& F, const FElem& x) {
  FElem r{x.deg, {}};
  for (auto& [a, v] : x.c) add_term(F, r, a, v);
  return r;
}

inline FElem add(const Frame& F, const FElem& x, const FElem& y) {
  if (x.is_zero()) return reduce(F, FElem{y.deg, y.c});
  if (y.is_zero()) return x;
  if (x.deg != y.deg) throw std::invalid_argument("adding elements of different degree");
  FElem r = x;
  for (auto& [a, v] : y.c) add_term(F, r, a, v);
  return r;
}
inline FElem scale(const Frame& F, const FElem& x, int64_t s) {
  FElem r{x.deg, {}};
  for (auto& [a, v] : x.c) add_term(F, r, a, padic::mulmod(v, padic::mod(s, F.modulus()), F.modulus()));
  return r;
}
inline FElem neg(const Frame& F, const FElem& x) { return scale(F, x, -1); }
inline FElem sub(const Frame& F, const FElem& x, const FElem& y) {
  FElem ny = neg(F, y);
  ny.deg = y.deg;
  return add(F, x, ny);
}

inline FElem mul(const Frame& F, const FElem& x, const FElem& y) {
  FElem r{x.deg + y.deg, {}};
  int64_t m = F.modulus();
  for (auto& [a, u] : x.c)
    for (auto& [b, v] : y.c) {
      Weight s = a + b;
      if (F.len(r.deg, s) <= 0) continue;
      int64_t k = F.mul(x.deg, a, y.deg, b);
      add_term(F, r, s, padic::mulmod(padic::mulmod(u, v, m), k, m));
    }
  return r;
}

inline FElem pow(const Frame& F, const FElem& x, uint64_t e) {
  FElem r = one(F);
  for (uint64_t i = 0; i < e; ++i) r = mul(F, r, x);
  return r;
}

inline FElem sigma(const Frame& F, const FElem& x) {
  FElem r{0, {}};
  int64_t m = F.modulus();
  for (auto& [a, v] : x.c) add_term(F, r, F.sigma_target(x.deg, a), padic::mulmod(v, F.sigma(x.deg, a), m));
  return r;
}
inline FElem tau(const Frame& F, const FElem& x) {
  FElem r{0, {}};
  int64_t m = F.modulus();
  for (auto& [a, v] : x.c) add_term(F, r, a, padic::mulmod(v, F.tau(x.deg, a), m));
  return r;
}
// inverse of tau_i on A_i, i < 0
inline FElem tau_inv(const Frame& F, const FElem& y, int i) {
  if (y.deg != 0) throw std::invalid_argument("tau_inv expects a degree-0 element");
  FElem r{i, {}};
  int64_t m = F.modulus();
  for (auto& [a, v] : y.c) add_term(F, r, a, padic::mulmod(v, F.tau_inverse(i, a), m));
  return r;
}
// the t-map A_i -> A_{i-1}
inline FElem t_apply(const Frame& F, const FElem& x) {
  FElem r{x.deg - 1, {}};
  int64_t m = F.modulus();
  for (auto& [a, v] : x.c) add_term(F, r, a, padic::mulmod(v, F.t_map(x.deg, a), m));
  return r;
}

inline FElem random(const Frame& F, int deg, const std::vector<Weight>& weights, std::mt19937_64& rng,
                    int max_terms = 3) {
  FElem x{deg, {}};
  if (weights.empty()) return x;
  std::uniform_int_distribution<size_t> pick(0, weights.size() - 1);
  std::uniform_int_distribution<int64_t> coef(0, F.modulus() - 1);
  std::uniform_int_distribution<int> nt(1, max_terms);
  int t = nt(rng);
  for (int k = 0; k < t; ++k) add_term(F, x, weights[pick(rng)], coef(rng));
  return x;
}

}  // namespace fe

}  // namespace gerbe

#endif
