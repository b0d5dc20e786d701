#ifndef GERBE_EXPONENT_HPP
#define GERBE_EXPONENT_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <compare>
#include <tuple>
#include <algorithm>
#include <ostream>
#include <boost/multiprecision/cpp_int.hpp>

namespace gerbe {

using bigint = boost::multiprecision::cpp_int;
using i128 = __int128;

struct precision_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// p-adic residue helpers. All residues live in [0, p^e).
namespace padic {

inline int64_t pw(int64_t p, int e) {
  int64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > INT64_MAX / p) throw precision_error("p^e overflows int64");
    r *= p;
  }
  return r;
}

inline int64_t mod(int64_t a, int64_t m) {
  int64_t r = a % m;
  return r < 0 ? r + m : r;
}

inline int64_t mulmod(int64_t a, int64_t b, int64_t m) {
  i128 r = (i128)a * (i128)b % m;
  if (r < 0) r += m;
  return (int64_t)r;
}

// v_p(a), with v_p(0) reported as `cap`.
inline int vp(int64_t a, int64_t p, int cap = 1 << 20) {
  if (a == 0) return cap;
  int v = 0;
  while (a % p == 0) { a /= p; ++v; }
  return v;
}

inline int vp(const bigint& a, int64_t p, int cap = 1 << 20) {
  if (a == 0) return cap;
  bigint b = a;
  int v = 0;
  while (b % p == 0) { b /= p; ++v; }
  return v;
}

inline int64_t inv(int64_t a, int64_t m) {
  int64_t g = m, x = 0, x1 = 1, a1 = mod(a, m);
  while (a1) {
    int64_t q = g / a1;
    std::tie(g, a1) = std::make_tuple(a1, g - q * a1);
    std::tie(x, x1) = std::make_tuple(x1, x - q * x1);
  }
  if (g != 1) throw std::domain_error("not a unit");
  return mod(x, m);
}

inline int64_t powmod(int64_t a, uint64_t e, int64_t m) {
  int64_t r = 1 % m, b = mod(a, m);
  while (e) {
    if (e & 1) r = mulmod(r, b, m);
    b = mulmod(b, b, m);
    e >>= 1;
  }
  return r;
}

inline int64_t to_res(const bigint& a, int64_t m) {
  bigint r = a % m;
  if (r < 0) r += m;
  return r.convert_to<int64_t>();
}

// Legendre: v_p(m!)
inline int vp_factorial(uint64_t m, uint64_t p) {
  int v = 0;
  while (m) { m /= p; v += (int)m; }
  return v;
}

inline bigint factorial(uint64_t m) {
  bigint r = 1;
  for (uint64_t i = 2; i <= m; ++i) r *= i;
  return r;
}

inline bool is_prime(int64_t p) {
  if (p < 2) return false;
  for (int64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

}  // namespace padic

// Exponent num / p^k in Z[1/p]_{>=0}, kept with p not dividing num unless k = 0.
class ExponentQ {
 public:
  ExponentQ() = default;
  ExponentQ(uint32_t p, uint64_t num, uint32_t k = 0) : p_(p), num_(num), k_(k) { canon(); }

  static ExponentQ zero(uint32_t p) { return ExponentQ(p, 0, 0); }
  static ExponentQ integer(uint32_t p, uint64_t n) { return ExponentQ(p, n, 0); }

  uint32_t p() const { return p_; }
  uint64_t num() const { return num_; }
  uint32_t k() const { return k_; }
  bool is_zero() const { return num_ == 0; }
  double to_double() const {
    double d = (double)num_;
    for (uint32_t i = 0; i < k_; ++i) d /= p_;
    return d;
  }

  ExponentQ operator+(const ExponentQ& o) const {
    check(o);
    uint32_t k = std::max(k_, o.k_);
    return ExponentQ(p_, scaled(k) + o.scaled(k), k);
  }
  // Requires *this >= o.
  ExponentQ operator-(const ExponentQ& o) const {
    check(o);
    uint32_t k = std::max(k_, o.k_);
    uint64_t a = scaled(k), b = o.scaled(k);
    if (a < b) throw std::domain_error("negative exponent");
    return ExponentQ(p_, a - b, k);
  }
  ExponentQ times_int(uint64_t m) const {
    i128 r = (i128)num_ * m;
    if (r > (i128)UINT64_MAX) throw precision_error("exponent overflow");
    return ExponentQ(p_, (uint64_t)r, k_);
  }
  ExponentQ times_p() const { return k_ > 0 ? ExponentQ(p_, num_, k_ - 1) : times_int(p_); }
  ExponentQ div_p() const { return num_ == 0 ? *this : ExponentQ(p_, num_, k_ + 1); }
  ExponentQ times_ppow(int e) const {
    ExponentQ r = *this;
    for (; e > 0; --e) r = r.times_p();
    for (; e < 0; ++e) r = r.div_p();
    return r;
  }

  // floor(this / o) for o > 0
  uint64_t floor_div(const ExponentQ& o) const {
    check(o);
    uint32_t k = std::max(k_, o.k_);
    return scaled(k) / o.scaled(k);
  }

  std::strong_ordering operator<=>(const ExponentQ& o) const {
    check(o);
    uint32_t k = std::max(k_, o.k_);
    i128 a = scaled128(k), b = o.scaled128(k);
    return a <=> b;
  }
  bool operator==(const ExponentQ& o) const { return num_ == o.num_ && k_ == o.k_; }

  std::string str() const {
    if (k_ == 0) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(p_) + "^" + std::to_string(k_);
  }

  static ExponentQ parse(uint32_t p, const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return ExponentQ(p, std::stoull(s), 0);
    uint64_t num = std::stoull(s.substr(0, slash));
    std::string d = s.substr(slash + 1);
    auto caret = d.find('^');
    if (caret != std::string::npos) {
      uint64_t base = std::stoull(d.substr(0, caret));
      if (base != p) throw std::invalid_argument("exponent base mismatch: " + s);
      return ExponentQ(p, num, (uint32_t)std::stoul(d.substr(caret + 1)));
    }
    uint64_t den = std::stoull(d);
    uint32_t k = 0;
    while (den % p == 0) { den /= p; ++k; }
    if (den != 1) throw std::invalid_argument("denominator is not a power of p: " + s);
    return ExponentQ(p, num, k);
  }

 private:
  void canon() {
    if (p_ < 2) throw std::invalid_argument("ExponentQ needs a prime");
    if (num_ == 0) { k_ = 0; return; }
    while (k_ > 0 && num_ % p_ == 0) { num_ /= p_; --k_; }
  }
  void check(const ExponentQ& o) const {
    if (p_ != o.p_) throw std::invalid_argument("mixed primes in ExponentQ");
  }
  uint64_t scaled(uint32_t k) const {
    i128 r = scaled128(k);
    if (r > (i128)UINT64_MAX) throw precision_error("exponent overflow");
    return (uint64_t)r;
  }
  i128 scaled128(uint32_t k) const {
    i128 r = num_;
    for (uint32_t i = k_; i < k; ++i) r *= p_;
    return r;
  }

  uint32_t p_ = 2;
  uint64_t num_ = 0;
  uint32_t k_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, const ExponentQ& e) { return os << e.str(); }

// #{i >= 0 : a p^i < c}; infinite (returned as cap) for a = 0.
inline int witt_depth(const ExponentQ& a, const ExponentQ& c, int cap) {
  if (a.is_zero()) return cap;
  int k = 0;
  ExponentQ x = a;
  while (x < c && k < cap) { ++k; x = x.times_p(); }
  return k;
}

}  // namespace gerbe

#endif
