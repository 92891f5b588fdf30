#pragma once

// Exact integer and rational arithmetic for unit-fraction sums, plus the prime
// sieve and the lcm/harmonic quantities d_m = lcm(1..m) and g_m = d_m * H_m.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

#include "egyptian/errors.hpp"

namespace egyptian {

namespace bmp = boost::multiprecision;

/// Unbounded signed integer (GMP backed, no expression templates so `auto` is safe).
using BigInt = bmp::number<bmp::gmp_int, bmp::et_off>;

/// Exact fraction, always stored reduced with a positive denominator; zero is 0/1.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(BigInt n) : num_(std::move(n)), den_(1) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t n) : num_(n), den_(1) {}       // NOLINT(google-explicit-constructor)
  Rational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) {
    if (den_ == 0) throw input_error("Rational: zero denominator");
    normalize();
  }

  /// 1/n for a positive integer n.
  static Rational unit(std::uint64_t n) {
    if (n == 0) throw input_error("Rational::unit: zero denominator");
    return Rational(BigInt(1), BigInt(n));
  }

  const BigInt& num() const noexcept { return num_; }
  const BigInt& den() const noexcept { return den_; }
  int sign() const { return num_.sign(); }
  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }

  Rational operator-() const {
    Rational r = *this;
    r.num_ = -r.num_;
    return r;
  }

  Rational& operator+=(const Rational& o) {
    num_ = num_ * o.den_ + o.num_ * den_;
    den_ *= o.den_;
    normalize();
    return *this;
  }
  Rational& operator-=(const Rational& o) { return *this += -o; }
  Rational& operator*=(const Rational& o) {
    num_ *= o.num_;
    den_ *= o.den_;
    normalize();
    return *this;
  }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw input_error("Rational: division by zero");
    num_ *= o.den_;
    den_ *= o.num_;
    normalize();
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const BigInt lhs = a.num_ * b.den_;
    const BigInt rhs = b.num_ * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  std::string to_string() const { return den_ == 1 ? num_.str() : num_.str() + "/" + den_.str(); }
  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

 private:
  void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    if (num_ == 0) {
      den_ = 1;
      return;
    }
    const BigInt g = gcd(num_, den_);
    if (g != 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  BigInt num_;
  BigInt den_;
};

/// Sieve of Eratosthenes up to a fixed limit.
class PrimeTable {
 public:
  static constexpr std::uint64_t default_limit = 10'000'000;

  explicit PrimeTable(std::uint64_t limit = default_limit) : limit_(limit), composite_(limit + 1, false) {
    composite_[0] = true;
    if (limit >= 1) composite_[1] = true;
    for (std::uint64_t i = 2; i * i <= limit; ++i) {
      if (composite_[i]) continue;
      for (std::uint64_t j = i * i; j <= limit; j += i) composite_[j] = true;
    }
    for (std::uint64_t i = 2; i <= limit; ++i)
      if (!composite_[i]) primes_.push_back(i);
  }

  std::uint64_t limit() const noexcept { return limit_; }
  std::span<const std::uint64_t> primes() const noexcept { return primes_; }

  bool is_prime(std::uint64_t n) const {
    check(n);
    return !composite_[n];
  }

  /// pi(x), the number of primes <= x.
  std::uint64_t pi(std::uint64_t x) const {
    check(x);
    return static_cast<std::uint64_t>(std::upper_bound(primes_.begin(), primes_.end(), x) - primes_.begin());
  }

 private:
  void check(std::uint64_t x) const {
    if (x > limit_)
      throw capacity_error("prime table limit " + std::to_string(limit_) + " exceeded by " + std::to_string(x));
  }

  std::uint64_t limit_;
  std::vector<bool> composite_;
  std::vector<std::uint64_t> primes_;
};

/// Process-wide sieve with the default limit, built on first use.
inline const PrimeTable& default_prime_table() {
  static const PrimeTable table;
  return table;
}

inline std::uint64_t sieve_pi(std::uint64_t x, const PrimeTable& table = default_prime_table()) { return table.pi(x); }

struct PrimePower {
  std::uint64_t p;
  unsigned e;
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Trial-division factorization, ascending primes. factorize(1) is empty.
inline std::vector<PrimePower> factorize(std::uint64_t n) {
  if (n == 0) throw input_error("factorize: zero");
  std::vector<PrimePower> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d) continue;
    unsigned e = 0;
    while (n % d == 0) {
      n /= d;
      ++e;
    }
    out.push_back({d, e});
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

inline std::uint64_t ipow(std::uint64_t base, unsigned e) {
  std::uint64_t r = 1;
  while (e--) r *= base;
  return r;
}

/// d_m = lcm(1, ..., m).
inline BigInt lcm_range(std::uint64_t m) {
  if (m == 0) throw input_error("lcm_range: m must be >= 1");
  BigInt d = 1;
  for (std::uint64_t j = 2; j <= m; ++j) d = lcm(d, BigInt(j));
  return d;
}

/// ln(d_m), i.e. Chebyshev's psi(m) = sum over prime powers p^k <= m of ln p.
inline long double ln_lcm_range(std::uint64_t m, const PrimeTable& table = default_prime_table()) {
  if (m == 0) throw input_error("ln_lcm_range: m must be >= 1");
  long double psi = 0;
  for (std::uint64_t p : table.primes()) {
    if (p > m) break;
    for (std::uint64_t q = p; q <= m; q *= p) {
      psi += std::log(static_cast<long double>(p));
      if (q > m / p) break;
    }
  }
  return psi;
}

/// g_m = d_m * (1 + 1/2 + ... + 1/m), always an integer.
inline BigInt harmonic_g(std::uint64_t m) {
  const BigInt d = lcm_range(m);
  BigInt g = 0;
  for (std::uint64_t j = 1; j <= m; ++j) g += d / j;
  return g;
}

/// One signed unit fraction sign/den with sign in {-1, +1}.
struct SignedUnit {
  int sign;
  std::uint64_t den;
  friend bool operator==(const SignedUnit&, const SignedUnit&) = default;
};

/// Exact value of sum(sign / den). Denominators must be distinct and positive.
inline Rational signed_unit_sum(std::span<const SignedUnit> terms) {
  std::unordered_set<std::uint64_t> seen;
  Rational sum;
  for (const auto& t : terms) {
    if (t.sign != 1 && t.sign != -1) throw input_error("signed_unit_sum: sign must be +1 or -1");
    if (t.den == 0) throw input_error("signed_unit_sum: zero denominator");
    if (!seen.insert(t.den).second)
      throw input_error("signed_unit_sum: duplicate denominator " + std::to_string(t.den));
    sum += t.sign > 0 ? Rational::unit(t.den) : -Rational::unit(t.den);
  }
  return sum;
}

/// Converts a BigInt known to be non-negative and < 2^64; throws capacity_error otherwise.
inline std::uint64_t to_u64(const BigInt& v, const char* what) {
  if (v < 0 || (v > 0 && msb(v) >= 64)) throw capacity_error(std::string(what) + " does not fit in 64 bits: " + v.str());
  return v.convert_to<std::uint64_t>();
}

}  // namespace egyptian
