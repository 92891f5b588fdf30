#pragma once

// The doubling set U: integers N for which no signed sum of 1/n (n < N,
// coefficients in {-1, 0, 1}) equals 1/N. Equivalently |E_N| = 2 |E_{N-1}|.
//
// Membership is certified by closure from 1 (m in U and p compatible with m
// implies m * p^k in U) and refuted by explicit identities.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "egyptian/bound_report.hpp"
#include "egyptian/errors.hpp"
#include "egyptian/exact_arith.hpp"

namespace egyptian {

/// Which primes divide some numerator of 1/m - sum_{j<m} w_j/j.
struct CompatibilityRecord {
  std::uint64_t m = 1;
  std::vector<std::uint64_t> bad_primes;  // ascending; empty when !m_in_U
  BigInt g_m = 1;
  bool m_in_U = true;  // false: some signing gives 0, so every prime is bad

  bool is_bad(std::uint64_t p) const {
    return !m_in_U || std::binary_search(bad_primes.begin(), bad_primes.end(), p);
  }
};

inline constexpr std::uint64_t bad_primes_limit = 14;

/// Exhaustive enumeration of the 3^(m-1) signings, lexicographic, stopping at the first zero.
inline CompatibilityRecord bad_primes(std::uint64_t m, const PrimeTable& primes = default_prime_table()) {
  if (m == 0) throw input_error("bad_primes: m must be >= 1");
  if (m > bad_primes_limit)
    throw capacity_error("bad_primes: 3^(m-1) enumeration for m = " + std::to_string(m) + " exceeds the limit m <= " +
                         std::to_string(bad_primes_limit));
  CompatibilityRecord rec;
  rec.m = m;
  rec.g_m = harmonic_g(m);
  const auto d = lcm_range(m).convert_to<std::int64_t>();
  const auto g = rec.g_m.convert_to<std::int64_t>();

  // Everything is scaled by d = lcm(1..m): value * d = d/m - sum w_j d/j, |value * d| <= g.
  std::vector<std::int64_t> unit(m);
  for (std::uint64_t j = 1; j < m; ++j) unit[j] = d / static_cast<std::int64_t>(j);
  std::vector<char> seen(static_cast<std::size_t>(g) + 1, 0);
  bool zero = false;
  std::function<bool(std::uint64_t, std::int64_t)> walk = [&](std::uint64_t j, std::int64_t acc) -> bool {
    if (j == m) {
      if (acc == 0) return zero = true;
      seen[static_cast<std::size_t>(acc < 0 ? -acc : acc)] = 1;
      return false;
    }
    for (int w : {-1, 0, 1})
      if (walk(j + 1, acc - w * unit[j])) return true;
    return false;
  };
  walk(1, d / static_cast<std::int64_t>(m));
  if (zero) {
    rec.m_in_U = false;
    return rec;
  }

  std::vector<char> reduced(seen.size(), 0);
  for (std::size_t v = 1; v < seen.size(); ++v)
    if (seen[v]) reduced[v / std::gcd(v, static_cast<std::size_t>(d))] = 1;
  for (std::uint64_t p : primes.primes()) {
    if (p > static_cast<std::uint64_t>(g)) break;
    for (std::uint64_t k = p; k <= static_cast<std::uint64_t>(g); k += p) {
      if (reduced[k]) {
        rec.bad_primes.push_back(p);
        break;
      }
    }
  }
  return rec;
}

/// One application of "m in U, p compatible with m => m * p^k in U".
struct MembershipStep {
  std::uint64_t m_prev;
  std::uint64_t p;
  unsigned k;
};

/// Derivation of N from the base 1; the product of all p^k equals N.
struct MembershipChain {
  std::vector<MembershipStep> steps;

  std::uint64_t value() const {
    std::uint64_t v = 1;
    for (const auto& s : steps) v *= ipow(s.p, s.k);
    return v;
  }
};

/// Caches bad-prime records and the certified closure. Safe to share between threads.
class CompatibilityOracle {
 public:
  explicit CompatibilityOracle(const PrimeTable& primes = default_prime_table()) : primes_(primes) {}

  const CompatibilityRecord& record(std::uint64_t m) {
    std::lock_guard lock(mutex_);
    auto it = records_.find(m);
    if (it == records_.end()) it = records_.emplace(m, bad_primes(m, primes_)).first;
    return it->second;
  }

  const BigInt& g(std::uint64_t m) {
    std::lock_guard lock(mutex_);
    while (g_.size() <= m) g_.push_back(g_.empty() ? BigInt(0) : harmonic_g(g_.size()));
    return g_[m];
  }

  /// True when p is proven compatible with m: exact bad primes for small m, the bound p > g_m for
  /// certified members beyond that. A false answer for large m only means "not proven".
  bool compatible(std::uint64_t m, std::uint64_t p) {
    std::lock_guard lock(mutex_);
    if (m <= bad_primes_limit) return !record(m).is_bad(p);
    extend_closure(m);
    return closure_[m] && BigInt(p) > g(m);
  }

  /// Whether n belongs to the closure generated from 1.
  bool certified_member(std::uint64_t n) {
    std::lock_guard lock(mutex_);
    extend_closure(n);
    return n >= 1 && closure_[n];
  }

  /// The step that certified n (largest p^k over all valid decompositions).
  std::optional<MembershipStep> certifying_step(std::uint64_t n) {
    std::lock_guard lock(mutex_);
    extend_closure(n);
    if (n <= 1 || !closure_[n]) return std::nullopt;
    return steps_[n];
  }

 private:
  // Ascending by value, so every m = n / p^k < n is already decided when n is reached.
  void extend_closure(std::uint64_t x) {
    if (closure_.empty()) {
      closure_ = {0, 1};
      steps_.resize(2);
    }
    for (std::uint64_t n = closure_.size(); n <= x; ++n) {
      std::optional<MembershipStep> best;
      std::uint64_t best_pk = 0;
      for (const auto& [p, e] : factorize(n)) {
        std::uint64_t pk = 1;
        for (unsigned k = 1; k <= e; ++k) {
          pk *= p;
          const std::uint64_t m = n / pk;
          const bool ok = m <= bad_primes_limit ? !record(m).is_bad(p) : closure_[m] && BigInt(p) > g(m);
          if (closure_[m] && ok && pk > best_pk) {
            best = MembershipStep{m, p, k};
            best_pk = pk;
          }
        }
      }
      closure_.push_back(best.has_value());
      steps_.push_back(best.value_or(MembershipStep{0, 0, 0}));
    }
  }

  const PrimeTable& primes_;
  std::recursive_mutex mutex_;
  std::map<std::uint64_t, CompatibilityRecord> records_;
  std::vector<BigInt> g_;
  std::vector<char> closure_;
  std::vector<MembershipStep> steps_;
};

inline CompatibilityOracle& default_compatibility() {
  static CompatibilityOracle oracle;
  return oracle;
}

struct CertifiedU {
  std::vector<std::uint64_t> members;  // ascending
  std::map<std::uint64_t, MembershipChain> chains;
};

/// Closure of {1} under m -> m * p^k (p compatible with m), restricted to [1, x].
inline CertifiedU certified_U(std::uint64_t x, CompatibilityOracle& oracle = default_compatibility()) {
  if (x == 0) throw input_error("certified_U: x must be >= 1");
  CertifiedU out;
  for (std::uint64_t n = 1; n <= x; ++n) {
    if (!oracle.certified_member(n)) continue;
    out.members.push_back(n);
    MembershipChain chain;
    if (n > 1) {
      const MembershipStep step = *oracle.certifying_step(n);
      chain = out.chains.at(step.m_prev);
      chain.steps.push_back(step);
    }
    out.chains.emplace(n, std::move(chain));
  }
  return out;
}

/// Re-checks a chain step by step against the oracle.
inline bool verify_chain(const MembershipChain& chain, std::uint64_t n,
                         CompatibilityOracle& oracle = default_compatibility()) {
  std::uint64_t cur = 1;
  for (const auto& s : chain.steps) {
    if (s.m_prev != cur || !oracle.compatible(s.m_prev, s.p)) return false;
    cur *= ipow(s.p, s.k);
  }
  return cur == n;
}

/// An identity 1/N = sum sign/den with distinct denominators < N, proving N is not in U.
struct NonMembershipCertificate {
  std::uint64_t n = 0;
  std::vector<SignedUnit> terms;
};

inline void check_certificate_syntax(const NonMembershipCertificate& cert) {
  if (cert.n < 2) throw input_error("certificate: N must be >= 2");
  if (cert.terms.empty()) throw input_error("certificate for " + std::to_string(cert.n) + " has no terms");
  std::vector<std::uint64_t> dens;
  for (const auto& t : cert.terms) {
    if (t.sign != 1 && t.sign != -1) throw input_error("certificate: sign must be + or -");
    if (t.den == 0 || t.den >= cert.n)
      throw input_error("certificate for " + std::to_string(cert.n) + ": denominator " + std::to_string(t.den) +
                        " not in [1, N)");
    dens.push_back(t.den);
  }
  std::sort(dens.begin(), dens.end());
  if (std::adjacent_find(dens.begin(), dens.end()) != dens.end())
    throw input_error("certificate for " + std::to_string(cert.n) + ": repeated denominator");
}

/// True iff the signed sum equals 1/N exactly. Throws input_error on malformed certificates.
inline bool verify_nonmembership(const NonMembershipCertificate& cert) {
  check_certificate_syntax(cert);
  return signed_unit_sum(cert.terms) == Rational::unit(cert.n);
}

/// Parses `N : s1/d1 s2/d2 ...` with s in {+, -}.
inline NonMembershipCertificate parse_certificate(std::string_view line) {
  const auto colon = line.find(':');
  if (colon == std::string_view::npos) throw input_error("certificate: missing ':' in \"" + std::string(line) + "\"");
  NonMembershipCertificate cert;
  std::istringstream head{std::string(line.substr(0, colon))};
  if (!(head >> cert.n)) throw input_error("certificate: bad N in \"" + std::string(line) + "\"");
  std::string extra;
  if (head >> extra) throw input_error("certificate: junk before ':' in \"" + std::string(line) + "\"");
  std::istringstream body{std::string(line.substr(colon + 1))};
  std::string tok;
  while (body >> tok) {
    if (tok.size() < 3 || (tok[0] != '+' && tok[0] != '-') || tok[1] != '/')
      throw input_error("certificate: bad term \"" + tok + "\"");
    std::uint64_t den = 0;
    for (std::size_t i = 2; i < tok.size(); ++i) {
      if (tok[i] < '0' || tok[i] > '9') throw input_error("certificate: bad denominator in \"" + tok + "\"");
      den = den * 10 + static_cast<std::uint64_t>(tok[i] - '0');
    }
    cert.terms.push_back({tok[0] == '+' ? 1 : -1, den});
  }
  check_certificate_syntax(cert);
  return cert;
}

inline std::string format_certificate(const NonMembershipCertificate& cert) {
  std::string s = std::to_string(cert.n) + " :";
  for (const auto& t : cert.terms) s += std::string(" ") + (t.sign > 0 ? "+/" : "-/") + std::to_string(t.den);
  return s;
}

/// Reads one certificate per line; blank lines and lines starting with '#' are skipped.
inline std::vector<NonMembershipCertificate> read_certificates(std::istream& is) {
  std::vector<NonMembershipCertificate> out;
  std::string line;
  while (std::getline(is, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    out.push_back(parse_certificate(line));
  }
  return out;
}

/// Identities for sixteen minimal non-members below 100.
inline const std::vector<NonMembershipCertificate>& bundled_certificates() {
  static const std::vector<NonMembershipCertificate> certs = [] {
    const char* lines[] = {
        "6 : +/2 -/3",           "15 : +/6 -/10",         "20 : +/4 -/5",
        "21 : +/7 +/14 -/6",     "28 : +/4 -/7 -/14",     "33 : +/6 -/11 -/22",
        "35 : +/10 +/14 -/7",    "44 : +/33 +/12 -/11",   "52 : +/12 -/26 -/39",
        "55 : -/20 +/22 +/44",   "65 : -/10 +/13 +/26",   "68 : +/4 -/6 -/17 -/34 +/51",
        "76 : +/12 -/19 -/57",   "85 : +/10 -/17 -/34",   "91 : +/42 -/78",
        "95 : +/20 -/38 -/76",
    };
    std::vector<NonMembershipCertificate> v;
    for (const char* l : lines) v.push_back(parse_certificate(l));
    return v;
  }();
  return certs;
}

/// Non-members up to 100 not divisible by any bundled N. 77 = 7 * 11 is the only one.
inline const std::vector<NonMembershipCertificate>& supplementary_certificates() {
  static const std::vector<NonMembershipCertificate> certs{parse_certificate("77 : +/4 +/28 -/6 -/11 -/66")};
  return certs;
}

/// A certificate for n obtained by scaling a bundled or supplementary identity for a divisor of n.
inline std::optional<NonMembershipCertificate> certificate_for(std::uint64_t n) {
  for (const auto* list : {&bundled_certificates(), &supplementary_certificates()})
    for (const auto& base : *list) {
      if (n % base.n) continue;
      const std::uint64_t c = n / base.n;
      NonMembershipCertificate cert{n, base.terms};
      for (auto& t : cert.terms) t.den *= c;
      return cert;
    }
  return std::nullopt;
}

/// (N, |E_N|) pair as read from a census or a bundled table.
struct CountRow {
  std::uint64_t n;
  BigInt count;
};

/// {N : count(N) = 2 count(N-1)}, with count(0) = 1 when the rows start at N = 1.
inline std::vector<std::uint64_t> u_from_counts(std::span<const CountRow> rows) {
  if (rows.empty()) throw input_error("u_from_counts: empty table");
  if (rows.front().n > 1) throw input_error("u_from_counts: table must start at N = 0 or N = 1");
  BigInt prev = 1;
  std::size_t i = 0;
  if (rows.front().n == 0) {
    prev = rows.front().count;
    i = 1;
  }
  std::vector<std::uint64_t> u;
  std::uint64_t expect = 1;
  for (; i < rows.size(); ++i, ++expect) {
    if (rows[i].n != expect)
      throw input_error("u_from_counts: gap in table at N = " + std::to_string(expect));
    if (rows[i].count == 2 * prev) u.push_back(rows[i].n);
    prev = rows[i].count;
  }
  return u;
}

/// |U(x)| for a sorted U.
inline std::uint64_t u_count_upto(std::span<const std::uint64_t> u, double x) {
  return static_cast<std::uint64_t>(
      std::upper_bound(u.begin(), u.end(), x, [](double v, std::uint64_t e) { return v < static_cast<double>(e); }) -
      u.begin());
}

/// |U(x)| >= 2 x / ln x for integers 13 <= x <= x_max, and >= (137/60) x / ln x once x >= 1000.
inline BoundReport check_lemma5C(std::span<const std::uint64_t> u, std::uint64_t x_max) {
  BoundReport report("U(x) lower bound", "13 <= x <= " + std::to_string(x_max));
  for (std::uint64_t x = 13; x <= x_max; ++x) {
    const double count = static_cast<double>(u_count_upto(u, static_cast<double>(x)));
    const double xd = static_cast<double>(x);
    const double rhs = 2.0 * xd / std::log(xd);
    report.add("u_density", "x=" + std::to_string(x), count, rhs, count >= rhs, count - rhs);
    if (x >= 1000) {
      const double rhs2 = 137.0 / 60.0 * xd / std::log(xd);
      report.add("u_density_large", "x=" + std::to_string(x), count, rhs2, count >= rhs2, count - rhs2);
    }
  }
  return report;
}

}  // namespace egyptian
