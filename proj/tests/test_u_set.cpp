#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "egyptian/report.hpp"
#include "egyptian/u_set.hpp"
#include "oracles.hpp"

using namespace egyptian;

namespace {

const std::vector<std::uint64_t> u100 = {1,  2,  3,  4,  5,  7,  8,  9,  10, 11, 13, 14, 16, 17, 19,
                                         22, 23, 25, 26, 27, 29, 31, 32, 34, 37, 38, 39, 41, 43, 46,
                                         47, 49, 50, 51, 53, 57, 58, 59, 61, 62, 64, 67, 69, 71, 73,
                                         74, 79, 81, 82, 83, 86, 87, 89, 92, 93, 94, 97, 98};

const BundledTable2& table() {
  static const BundledTable2 t = BundledTable2::load_file(default_table2_path());
  return t;
}

std::vector<std::uint64_t> upto(const std::vector<std::uint64_t>& u, std::uint64_t x) {
  return {u.begin(), std::upper_bound(u.begin(), u.end(), x)};
}

}  // namespace

TEST(BadPrimes, SmallCases) {
  const auto r1 = bad_primes(1);
  EXPECT_TRUE(r1.m_in_U);
  EXPECT_TRUE(r1.bad_primes.empty());
  EXPECT_EQ(bad_primes(2).bad_primes, (std::vector<std::uint64_t>{3}));
  EXPECT_EQ(bad_primes(3).bad_primes, (std::vector<std::uint64_t>{2, 5, 7, 11}));
  EXPECT_EQ(bad_primes(3).g_m, 11);
  EXPECT_THROW(bad_primes(15), capacity_error);
}

TEST(BadPrimes, NonMembersHaveNoCompatiblePrime) {
  const auto r = bad_primes(6);
  EXPECT_FALSE(r.m_in_U);
  for (std::uint64_t p : {2u, 7u, 101u, 1009u}) EXPECT_TRUE(r.is_bad(p));
}

TEST(BadPrimes, ConsistentWithTableAndThreshold) {
  const auto u = u_from_counts(table().rows());
  for (std::uint64_t m = 1; m <= bad_primes_limit; ++m) {
    const auto r = bad_primes(m);
    EXPECT_EQ(r.m_in_U, std::binary_search(u.begin(), u.end(), m)) << m;
    EXPECT_EQ(r.m_in_U, !oracle::signed_sum_hits(m)) << m;
    if (!r.m_in_U) continue;
    for (std::uint64_t p : r.bad_primes) {
      EXPECT_LE(BigInt(p), r.g_m) << m;
      EXPECT_TRUE(oracle::is_prime(p));
    }
  }
}

TEST(CertifiedU, Examples) {
  EXPECT_EQ(certified_U(1).members, (std::vector<std::uint64_t>{1}));
  const auto c32 = certified_U(32).members;
  for (std::uint64_t n : {1u, 2u, 4u, 8u, 16u, 32u, 3u, 9u, 27u, 5u, 25u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 10u,
                          14u, 22u, 26u})
    EXPECT_TRUE(std::binary_search(c32.begin(), c32.end(), n)) << n;
}

TEST(CertifiedU, HundredIsExact) {
  const auto c = certified_U(100);
  ASSERT_EQ(u100.size(), 58u);
  EXPECT_EQ(c.members, u100);
  EXPECT_EQ(upto(u_from_counts(table().rows()), 100), u100);
}

TEST(CertifiedU, ChainsVerify) {
  const auto c = certified_U(154);
  ASSERT_EQ(c.members.size(), c.chains.size());
  for (std::size_t i = 0; i < c.members.size(); ++i) {
    EXPECT_EQ(c.chains.at(c.members[i]).value(), c.members[i]);
    EXPECT_TRUE(verify_chain(c.chains.at(c.members[i]), c.members[i])) << c.members[i];
  }
  MembershipChain bogus{{{1, 2, 1}, {2, 3, 1}}};  // 3 is bad for 2
  EXPECT_FALSE(verify_chain(bogus, 6));
}

TEST(CertifiedU, SoundAgainstTable) {
  const auto u = u_from_counts(table().rows());
  for (std::uint64_t x : {10u, 50u, 100u, 130u, 154u}) {
    const auto c = certified_U(x).members;
    EXPECT_TRUE(std::includes(u.begin(), u.end(), c.begin(), c.end())) << x;
  }
  EXPECT_EQ(certified_U(154).members, u);
}

TEST(Certificates, Examples) {
  EXPECT_TRUE(verify_nonmembership(parse_certificate("21 : +/7 +/14 -/6")));
  EXPECT_TRUE(verify_nonmembership(parse_certificate("95 : +/20 -/38 -/76")));
  EXPECT_FALSE(verify_nonmembership(parse_certificate("6 : +/2 -/4")));
}

TEST(Certificates, AllBundledVerify) {
  EXPECT_EQ(bundled_certificates().size(), 16u);
  for (const auto& c : bundled_certificates()) EXPECT_TRUE(verify_nonmembership(c)) << format_certificate(c);
}

TEST(Certificates, SupplementCoversTheOnlyGap) {
  // Non-members up to 100 with no bundled divisor, found by direct scan.
  std::vector<std::uint64_t> uncovered;
  for (std::uint64_t n = 1; n <= 100; ++n) {
    if (std::binary_search(u100.begin(), u100.end(), n)) continue;
    bool covered = false;
    for (const auto& c : bundled_certificates()) covered = covered || n % c.n == 0;
    if (!covered) uncovered.push_back(n);
  }
  std::vector<std::uint64_t> supplemented;
  for (const auto& c : supplementary_certificates()) {
    EXPECT_TRUE(verify_nonmembership(c)) << format_certificate(c);
    supplemented.push_back(c.n);
  }
  EXPECT_EQ(uncovered, supplemented);
  const std::vector<SignedUnit> terms{{+1, 4}, {+1, 28}, {-1, 6}, {-1, 11}, {-1, 66}};
  EXPECT_EQ(signed_unit_sum(terms), Rational::unit(77));
}

TEST(Certificates, DataFileMatchesBundle) {
  std::ifstream in(default_data_dir() + "/certificates.txt");
  ASSERT_TRUE(in);
  const auto file = read_certificates(in);
  ASSERT_EQ(file.size(), bundled_certificates().size());
  for (std::size_t i = 0; i < file.size(); ++i)
    EXPECT_EQ(format_certificate(file[i]), format_certificate(bundled_certificates()[i]));
}

TEST(Certificates, EveryNonMemberUpTo100IsRefuted) {
  const auto c = certified_U(100).members;
  for (std::uint64_t n = 1; n <= 100; ++n) {
    if (std::binary_search(c.begin(), c.end(), n)) continue;
    const auto cert = certificate_for(n);
    ASSERT_TRUE(cert) << n;
    EXPECT_EQ(cert->n, n);
    EXPECT_TRUE(verify_nonmembership(*cert)) << format_certificate(*cert);
  }
}

TEST(Certificates, MalformedInput) {
  EXPECT_THROW(parse_certificate("21 +/7"), input_error);
  EXPECT_THROW(parse_certificate("21 : */7"), input_error);
  EXPECT_THROW(parse_certificate("21 : +/7 +/7"), input_error);
  EXPECT_THROW(parse_certificate("21 : +/30"), input_error);  // denominator must be below N
  EXPECT_THROW(parse_certificate("x : +/3"), input_error);
  std::istringstream in("# comment\n\n6 : +/2 -/3\n");
  EXPECT_EQ(read_certificates(in).size(), 1u);
}

TEST(Certificates, SignedSumOracleAgrees) {
  // Direct search over all signings for small N.
  const auto c = certified_U(24).members;
  for (std::uint64_t n = 1; n <= 24; ++n) {
    EXPECT_EQ(oracle::signed_sum_hits(n), !std::binary_search(c.begin(), c.end(), n)) << n;
  }
}

TEST(UFromCounts, PrefixAndErrors) {
  std::vector<CountRow> rows(table().rows().begin(), table().rows().begin() + 11);
  EXPECT_EQ(u_from_counts(rows), (std::vector<std::uint64_t>{1, 2, 3, 4, 5, 7, 8, 9, 10}));
  auto gap = rows;
  gap.erase(gap.begin() + 4);
  EXPECT_THROW(u_from_counts(gap), input_error);
  // Rows may also start at N = 1, with count(0) = 1 implied.
  std::vector<CountRow> from1(rows.begin() + 1, rows.end());
  EXPECT_EQ(u_from_counts(from1), u_from_counts(rows));
}

TEST(UFromCounts, StableByDivisors) {
  const auto u = u_from_counts(table().rows());
  for (std::uint64_t n : u)
    for (std::uint64_t d = 1; d <= n; ++d) {
      if (n % d == 0) { EXPECT_TRUE(std::binary_search(u.begin(), u.end(), d)) << d << " | " << n; }
    }
}

TEST(UDensity, Examples) {
  const auto u = u_from_counts(table().rows());
  EXPECT_EQ(u_count_upto(u, 13), 11u);
  const auto r13 = check_lemma5C(u, 13);
  ASSERT_EQ(r13.rows().size(), 1u);
  EXPECT_TRUE(r13.passed());
  EXPECT_NEAR(r13.rows()[0].rhs, 10.137, 1e-3);
  EXPECT_TRUE(check_lemma5C(u, 154).passed());
  EXPECT_TRUE(check_lemma5C(u, 12).rows().empty());
}
