#pragma once

// Slow, independent reference implementations used only by tests.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using u64 = std::uint64_t;
using i64 = std::int64_t;

/// Reduced fraction over 64-bit integers (enough for denominators up to lcm(1..22)).
struct Frac {
  i64 num;
  i64 den;
  friend bool operator<(const Frac& a, const Frac& b) {
    return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
  }
  friend bool operator==(const Frac& a, const Frac& b) { return a.num == b.num && a.den == b.den; }
};

inline Frac add(Frac a, Frac b) {
  const i64 g = std::gcd(a.den, b.den);
  const i64 den = a.den / g * b.den;
  const i64 num = a.num * (den / a.den) + b.num * (den / b.den);
  const i64 h = std::gcd(num < 0 ? -num : num, den);
  return {num / h, den / h};
}

/// Distinct subset sums by recursive insertion into an ordered set of fractions.
inline std::set<Frac> subset_sums(const std::vector<u64>& s) {
  std::set<Frac> sums{{0, 1}};
  for (u64 n : s) {
    std::set<Frac> next = sums;
    for (const Frac& f : sums) next.insert(add(f, {1, static_cast<i64>(n)}));
    sums = std::move(next);
  }
  return sums;
}

inline u64 lcm_upto(u64 m) {
  u64 l = 1;
  for (u64 j = 2; j <= m; ++j) l = std::lcm(l, j);
  return l;
}

/// Whether 1/n equals sum of w_j/j over j < n with w_j in {-1, 0, 1}; meet in the middle, n <= 26.
inline bool signed_sum_hits(u64 n) {
  const i64 l = static_cast<i64>(lcm_upto(n));
  const i64 target = l / static_cast<i64>(n);
  std::vector<i64> lo{0}, hi{0};
  for (u64 j = 1; j < n; ++j) {
    auto& side = (j % 2) ? lo : hi;
    const i64 v = l / static_cast<i64>(j);
    std::vector<i64> next;
    next.reserve(side.size() * 3);
    for (i64 x : side) {
      next.push_back(x);
      next.push_back(x + v);
      next.push_back(x - v);
    }
    side = std::move(next);
  }
  std::sort(hi.begin(), hi.end());
  for (i64 x : lo)
    if (std::binary_search(hi.begin(), hi.end(), target - x)) return true;
  return false;
}

inline bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline u64 prime_pi(u64 x) {
  u64 c = 0;
  for (u64 i = 2; i <= x; ++i) c += is_prime(i);
  return c;
}

/// Naive bit set with the same shift-or semantics as the packed bitmap.
struct NaiveBits {
  std::vector<bool> b;
  explicit NaiveBits(u64 n) : b(n, false) {}
  void shift_or(u64 s) {
    for (u64 i = b.size(); i-- > s;)
      if (b[i - s]) b[i] = true;
  }
  u64 count() const { return static_cast<u64>(std::count(b.begin(), b.end(), true)); }
};

/// Random subset of {1..max} with each element kept with probability `keep`, never empty.
inline std::vector<u64> random_subset(std::mt19937_64& rng, u64 max, double keep) {
  std::bernoulli_distribution coin(keep);
  std::vector<u64> s;
  for (u64 i = 1; i <= max; ++i)
    if (coin(rng)) s.push_back(i);
  if (s.empty()) s.push_back(std::uniform_int_distribution<u64>(1, max)(rng));
  return s;
}

}  // namespace oracle
