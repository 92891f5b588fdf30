#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "egyptian/bitvec.hpp"
#include "oracles.hpp"

using namespace egyptian;

namespace {

std::vector<std::uint64_t> naive_set(const oracle::NaiveBits& n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t i = 0; i < n.b.size(); ++i)
    if (n.b[i]) out.push_back(i);
  return out;
}

}  // namespace

TEST(SumsBitmap, AllocFreshAndLength) {
  const auto b = SumsBitmap::alloc(13);
  EXPECT_EQ(b.popcount(), 0u);
  EXPECT_EQ(b.length(), 13u);
  EXPECT_FALSE(b.highest_set());
  EXPECT_THROW(SumsBitmap::alloc(0), input_error);
}

TEST(SumsBitmap, AllocOverBudgetReportsBytes) {
  try {
    SumsBitmap::alloc(1'000'000'000'000ULL, 1ULL << 30);
    FAIL() << "expected capacity_error";
  } catch (const capacity_error& e) {
    EXPECT_EQ(e.required_bytes(), 125'000'000'000ULL);
    EXPECT_NE(std::string(e.what()).find("125.0 GB"), std::string::npos) << e.what();
  }
}

TEST(SumsBitmap, SmallShiftSequence) {
  auto b = SumsBitmap::alloc(13);
  b.set(0);
  b.shift_or_inplace(6);
  EXPECT_EQ(b.set_bits(), (std::vector<std::uint64_t>{0, 6}));
  b.shift_or_inplace(3);
  EXPECT_EQ(b.set_bits(), (std::vector<std::uint64_t>{0, 3, 6, 9}));
  b.shift_or_inplace(2);
  EXPECT_EQ(b.set_bits(), (std::vector<std::uint64_t>{0, 2, 3, 5, 6, 8, 9, 11}));
  b.shift_or_inplace(1);
  EXPECT_EQ(b.popcount(), 13u);
  EXPECT_EQ(*b.highest_set(), 12u);
}

TEST(SumsBitmap, SingleShiftDoubles) {
  auto b = SumsBitmap::alloc(100);
  b.set(0);
  b.shift_or_inplace(37);
  EXPECT_EQ(b.popcount(), 2u);
}

TEST(SumsBitmap, OverflowIsRejected) {
  auto b = SumsBitmap::alloc(13);
  b.set(0);
  b.shift_or_inplace(12);
  EXPECT_THROW(b.shift_or_inplace(1), overflow_error);
  EXPECT_THROW(b.set(13), overflow_error);
  EXPECT_THROW(b.shift_or_inplace(0), input_error);
}

TEST(SumsBitmap, WordBoundaryShiftsMatchOracle) {
  std::mt19937_64 rng(11);
  for (std::uint64_t shift : {1u, 63u, 64u, 65u, 127u, 128u, 129u, 200u}) {
    for (int rep = 0; rep < 20; ++rep) {
      const std::uint64_t len = 600;
      auto b = SumsBitmap::alloc(len);
      oracle::NaiveBits n(len);
      std::uniform_int_distribution<std::uint64_t> pos(0, len - shift - 1);
      for (int k = 0; k < 30; ++k) {
        const auto p = pos(rng);
        b.set(p);
        n.b[p] = true;
      }
      b.shift_or_inplace(shift);
      n.shift_or(shift);
      EXPECT_EQ(b.set_bits(), naive_set(n)) << "shift " << shift;
      EXPECT_EQ(b.popcount(), n.count());
    }
  }
}

TEST(SumsBitmap, RepeatedShiftComposes) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    auto b = SumsBitmap::alloc(64);
    oracle::NaiveBits n(64);
    for (int k = 0; k < 4; ++k) {
      const auto p = std::uniform_int_distribution<std::uint64_t>(0, 15)(rng);
      b.set(p);
      n.b[p] = true;
    }
    const auto s = std::uniform_int_distribution<std::uint64_t>(1, 20)(rng);
    const std::uint64_t before = b.popcount();
    b.shift_or_inplace(s);
    n.shift_or(s);
    const std::uint64_t once = b.popcount();
    EXPECT_GE(once, before);
    EXPECT_LE(once, 2 * before);
    b.shift_or_inplace(s);
    n.shift_or(s);
    EXPECT_EQ(b.set_bits(), naive_set(n));
  }
}

TEST(SumsBitmap, DoublingIffDisjoint) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    auto b = SumsBitmap::alloc(400);
    for (int k = 0; k < 6; ++k) b.set(std::uniform_int_distribution<std::uint64_t>(0, 150)(rng));
    const auto s = std::uniform_int_distribution<std::uint64_t>(1, 200)(rng);
    const std::uint64_t before = b.popcount();
    // b AND (b << s) is empty exactly when the translate is disjoint.
    const std::uint64_t overlap = b.and_popcount_shifted(s);
    b.shift_or_inplace(s);
    EXPECT_EQ(b.popcount(), 2 * before - overlap);
    EXPECT_EQ(b.popcount() == 2 * before, overlap == 0);
  }
}

TEST(SumsBitmap, RandomSetsMatchSubsetSums) {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 60; ++rep) {
    auto s = oracle::random_subset(rng, 20, 0.35);
    std::uint64_t l = 1;
    for (auto n : s) l = std::lcm(l, n);
    std::uint64_t span = 0;
    for (auto n : s) span += l / n;
    std::shuffle(s.begin(), s.end(), rng);  // insertion order must not matter
    auto b = SumsBitmap::alloc(span + 1);
    b.set(0);
    for (auto n : s) b.shift_or_inplace(l / n);
    std::set<oracle::Frac> got;
    for (auto i : b.set_bits()) {
      const auto g = std::gcd(i, l);
      got.insert({static_cast<std::int64_t>(i / g), static_cast<std::int64_t>(l / g)});
    }
    EXPECT_EQ(got, oracle::subset_sums(s));
  }
}

TEST(SumsBitmap, ShiftOrWithinTruncates) {
  auto b = SumsBitmap::alloc(300);
  b.set(0);
  b.set(70);
  b.shift_or_within(100, 150);
  EXPECT_EQ(b.set_bits(), (std::vector<std::uint64_t>{0, 70, 100}));
  EXPECT_EQ(*b.highest_set(), 100u);
}

TEST(SumsBitmap, RangePopcountAndExtract) {
  auto b = SumsBitmap::alloc(200);
  for (std::uint64_t i : {0u, 5u, 63u, 64u, 65u, 130u, 199u}) b.set(i);
  EXPECT_EQ(b.popcount(0, 64), 3u);
  EXPECT_EQ(b.popcount(63, 66), 3u);
  EXPECT_EQ(b.popcount(100, 1000), 2u);
  EXPECT_EQ(b.extract(63) & 0x7, 0x7u);
  EXPECT_EQ(b.extract(-5), b.extract(0) << 5);
  EXPECT_EQ(b.extract(-64), 0u);
  EXPECT_EQ(b.extract(10'000), 0u);
}

TEST(SumsBitmap, OrBits) {
  auto b = SumsBitmap::alloc(130);
  b.or_bits(60, 0b1011, 4);
  EXPECT_EQ(b.set_bits(), (std::vector<std::uint64_t>{60, 61, 63}));
  EXPECT_THROW(b.or_bits(128, 0b111, 3), overflow_error);
  b.or_bits(128, 0b11, 2);
  EXPECT_EQ(*b.highest_set(), 129u);
}

TEST(ReverseBits, Involution) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const Word w = rng();
    EXPECT_EQ(reverse_bits(reverse_bits(w)), w);
    for (unsigned k = 0; k < 64; k += 13) EXPECT_EQ((reverse_bits(w) >> (63 - k)) & 1, (w >> k) & 1);
  }
}

TEST(SumsBitmap, DumpRoundTrip) {
  std::mt19937_64 rng(9);
  for (std::uint64_t len : {1u, 63u, 64u, 65u, 1000u}) {
    auto b = SumsBitmap::alloc(len);
    for (int k = 0; k < 20; ++k) b.set(std::uniform_int_distribution<std::uint64_t>(0, len - 1)(rng));
    std::stringstream ss;
    b.dump(ss);
    EXPECT_EQ(ss.str().size(), 16 + b.bytes());
    const auto c = SumsBitmap::load(ss);
    EXPECT_EQ(b, c);
    EXPECT_EQ(b.highest_set(), c.highest_set());
  }
}

TEST(SumsBitmap, DumpHeaderIsLittleEndian) {
  auto b = SumsBitmap::alloc(65);
  b.set(0);
  b.set(64);
  std::stringstream ss;
  b.dump(ss);
  const std::string s = ss.str();
  ASSERT_EQ(s.size(), 32u);
  EXPECT_EQ(static_cast<unsigned char>(s[0]), 0x45);
  EXPECT_EQ(static_cast<unsigned char>(s[4]), 1);
  EXPECT_EQ(static_cast<unsigned char>(s[8]), 65);
  EXPECT_EQ(static_cast<unsigned char>(s[16]), 1);
  EXPECT_EQ(static_cast<unsigned char>(s[24]), 1);
}

TEST(SumsBitmap, LoadRejectsCorruptInput) {
  auto b = SumsBitmap::alloc(10);
  b.set(3);
  std::stringstream ss;
  b.dump(ss);
  std::string s = ss.str();

  std::string bad_magic = s;
  bad_magic[0] = 'X';
  std::stringstream m(bad_magic);
  EXPECT_THROW(SumsBitmap::load(m), input_error);

  std::stringstream trunc(s.substr(0, s.size() - 3));
  EXPECT_THROW(SumsBitmap::load(trunc), input_error);

  std::string stray = s;
  stray[16 + 1] = static_cast<char>(0x80);  // bit 15, past length 10
  std::stringstream st(stray);
  EXPECT_THROW(SumsBitmap::load(st), input_error);
}
