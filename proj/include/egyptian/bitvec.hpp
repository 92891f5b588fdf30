#pragma once

// Packed bit vector indexed by numerator over a fixed denominator. Bit i set
// means i/denominator is a reachable subset sum. Supports the in-place
// upward shift-OR that adds one unit fraction to the set of sums.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "egyptian/errors.hpp"
#include "egyptian/exact_arith.hpp"

namespace egyptian {

using Word = std::uint64_t;
inline constexpr unsigned word_bits = 64;

/// Reverses the bit order of a 64-bit word.
constexpr Word reverse_bits(Word x) noexcept {
  x = ((x >> 1) & 0x5555555555555555ULL) | ((x & 0x5555555555555555ULL) << 1);
  x = ((x >> 2) & 0x3333333333333333ULL) | ((x & 0x3333333333333333ULL) << 2);
  x = ((x >> 4) & 0x0F0F0F0F0F0F0F0FULL) | ((x & 0x0F0F0F0F0F0F0F0FULL) << 4);
  return __builtin_bswap64(x);
}

/// Mask with the low `count` bits set, count in [0, 64].
constexpr Word low_mask(unsigned count) noexcept { return count >= word_bits ? ~Word{0} : (Word{1} << count) - 1; }

inline constexpr std::uint64_t default_budget_bytes = std::uint64_t{2} << 30;

class SumsBitmap {
 public:
  static constexpr std::uint32_t dump_magic = 0x42534645;  // "EFSB" little-endian
  static constexpr std::uint32_t dump_version = 1;

  /// Bytes of word storage needed for `length` bits.
  static constexpr std::uint64_t bytes_for(std::uint64_t length) noexcept {
    return (length / word_bits + (length % word_bits != 0)) * sizeof(Word);
  }

  /// All-zero bitmap of `length` bits. Throws capacity_error when the words exceed `budget_bytes`.
  static SumsBitmap alloc(std::uint64_t length, std::uint64_t budget_bytes = default_budget_bytes) {
    if (length == 0) throw input_error("SumsBitmap::alloc: length must be >= 1");
    const std::uint64_t need = bytes_for(length);
    if (need > budget_bytes)
      throw capacity_error("bitmap of " + std::to_string(length) + " bits needs " + format_bytes(need) +
                               ", budget is " + format_bytes(budget_bytes),
                           need);
    return SumsBitmap(length);
  }

  std::uint64_t length() const noexcept { return length_; }
  std::uint64_t bytes() const noexcept { return words_.size() * sizeof(Word); }
  std::span<const Word> words() const noexcept { return words_; }

  const BigInt& denominator_unit() const noexcept { return denominator_; }
  void set_denominator_unit(BigInt l) { denominator_ = std::move(l); }

  bool test(std::uint64_t i) const { return i < length_ && ((words_[i / word_bits] >> (i % word_bits)) & 1U); }

  void set(std::uint64_t i) {
    if (i >= length_) throw overflow_error("SumsBitmap::set: index " + std::to_string(i) + " past length");
    words_[i / word_bits] |= Word{1} << (i % word_bits);
    if (!top_ || i > *top_) top_ = i;
  }

  /// Highest set bit, if any.
  std::optional<std::uint64_t> highest_set() const noexcept { return top_; }

  /// b <- b | (b << shift). Throws overflow_error if a set bit would land at or past length().
  void shift_or_inplace(std::uint64_t shift) {
    if (shift == 0) throw input_error("shift_or_inplace: shift must be >= 1");
    if (!top_) return;
    if (*top_ >= length_ - std::min(length_, shift))
      throw overflow_error("shift_or_inplace: shift " + std::to_string(shift) + " moves bit " +
                           std::to_string(*top_) + " past length " + std::to_string(length_));
    shift_or_words(shift, (*top_ + shift) / word_bits, ~Word{0});
    *top_ += shift;
  }

  /// Same as shift_or_inplace, but only bits below `end` are written and anything shifted
  /// to `end` or beyond is dropped.
  void shift_or_within(std::uint64_t shift, std::uint64_t end) {
    if (shift == 0) throw input_error("shift_or_within: shift must be >= 1");
    end = std::min(end, length_);
    if (!top_ || end <= shift) return;
    const std::uint64_t last = std::min(*top_ + shift, end - 1);
    const std::uint64_t scan_from = std::max(*top_, last) / word_bits;
    shift_or_words(shift, last / word_bits, low_mask(static_cast<unsigned>(last % word_bits) + 1));
    refresh_top(scan_from);
  }

  /// Number of set bits.
  std::uint64_t popcount() const noexcept {
    if (!top_) return 0;
    std::uint64_t n = 0;
    const std::uint64_t last = *top_ / word_bits;
    for (std::uint64_t i = 0; i <= last; ++i) n += static_cast<std::uint64_t>(std::popcount(words_[i]));
    return n;
  }

  /// Set bits with index in [begin, end).
  std::uint64_t popcount(std::uint64_t begin, std::uint64_t end) const noexcept {
    end = std::min(end, length_);
    if (begin >= end) return 0;
    const std::uint64_t bw = begin / word_bits, ew = (end - 1) / word_bits;
    std::uint64_t n = 0;
    for (std::uint64_t i = bw; i <= ew; ++i) {
      Word w = words_[i];
      if (i == bw) w &= ~low_mask(static_cast<unsigned>(begin % word_bits));
      if (i == ew) w &= low_mask(static_cast<unsigned>((end - 1) % word_bits) + 1);
      n += static_cast<std::uint64_t>(std::popcount(w));
    }
    return n;
  }

  /// |b AND (b << shift)|: how many sums collide when the set is translated by `shift`.
  std::uint64_t and_popcount_shifted(std::uint64_t shift) const noexcept {
    if (!top_) return 0;
    std::uint64_t n = 0;
    for (std::uint64_t i = shift / word_bits; i <= *top_ / word_bits; ++i)
      n += static_cast<std::uint64_t>(
          std::popcount(words_[i] & extract(static_cast<std::int64_t>(i * word_bits) - static_cast<std::int64_t>(shift))));
    return n;
  }

  /// Bits [pos, pos + 64) as one word; positions outside the storage read as zero.
  Word extract(std::int64_t pos) const noexcept {
    if (pos < 0) {
      if (pos <= -static_cast<std::int64_t>(word_bits)) return 0;
      return extract(0) << static_cast<unsigned>(-pos);
    }
    const auto upos = static_cast<std::uint64_t>(pos);
    const std::uint64_t q = upos / word_bits;
    const auto r = static_cast<unsigned>(upos % word_bits);
    if (q >= words_.size()) return 0;
    Word lo = words_[q] >> r;
    if (r != 0 && q + 1 < words_.size()) lo |= words_[q + 1] << (word_bits - r);
    return lo;
  }

  /// ORs the low `count` bits of `bits` into positions [pos, pos + count).
  void or_bits(std::uint64_t pos, Word bits, unsigned count) {
    if (count == 0) return;
    bits &= low_mask(count);
    if (bits == 0) return;
    const std::uint64_t hi = pos + word_bits - 1 - static_cast<unsigned>(std::countl_zero(bits));
    if (hi >= length_) throw overflow_error("SumsBitmap::or_bits: write past length");
    const std::uint64_t q = pos / word_bits;
    const auto r = static_cast<unsigned>(pos % word_bits);
    words_[q] |= bits << r;
    if (r != 0 && r + count > word_bits) words_[q + 1] |= bits >> (word_bits - r);
    if (!top_ || hi > *top_) top_ = hi;
  }

  /// Ascending indices of set bits (test helper; linear in length).
  std::vector<std::uint64_t> set_bits() const {
    std::vector<std::uint64_t> out;
    for (std::uint64_t i = 0; i < words_.size(); ++i)
      for (Word w = words_[i]; w; w &= w - 1) out.push_back(i * word_bits + static_cast<unsigned>(std::countr_zero(w)));
    return out;
  }

  friend bool operator==(const SumsBitmap& a, const SumsBitmap& b) {
    return a.length_ == b.length_ && a.words_ == b.words_;
  }

  /// Raw dump: 16-byte header (magic u32, version u32, bit length u64), then packed words, all little-endian.
  void dump(std::ostream& os) const {
    put_le(os, dump_magic, 4);
    put_le(os, dump_version, 4);
    put_le(os, length_, 8);
    for (Word w : words_) put_le(os, w, 8);
    if (!os) throw input_error("SumsBitmap::dump: write failed");
  }

  static SumsBitmap load(std::istream& is, std::uint64_t budget_bytes = default_budget_bytes) {
    if (get_le(is, 4) != dump_magic) throw input_error("SumsBitmap::load: bad magic");
    if (get_le(is, 4) != dump_version) throw input_error("SumsBitmap::load: unsupported version");
    const std::uint64_t length = get_le(is, 8);
    SumsBitmap b = alloc(length, budget_bytes);
    for (auto& w : b.words_) w = get_le(is, 8);
    if (!is) throw input_error("SumsBitmap::load: truncated dump");
    if (length % word_bits != 0 && (b.words_.back() & ~low_mask(static_cast<unsigned>(length % word_bits))))
      throw input_error("SumsBitmap::load: bits set past length");
    b.refresh_top(b.words_.size() - 1);
    return b;
  }

  static std::string format_bytes(std::uint64_t n) {
    const char* units[] = {"B", "KB", "MB", "GB", "TB", "PB"};
    double v = static_cast<double>(n);
    unsigned u = 0;
    while (v >= 1000.0 && u + 1 < std::size(units)) {
      v /= 1000.0;
      ++u;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f %s (%llu bytes)", v, units[u], static_cast<unsigned long long>(n));
    return buf;
  }

 private:
  explicit SumsBitmap(std::uint64_t length) : length_(length), words_(bytes_for(length) / sizeof(Word), 0) {}

  // Destination words are visited from `hi` down so every source word is read before it is overwritten.
  void shift_or_words(std::uint64_t shift, std::uint64_t hi, Word hi_mask) {
    const std::uint64_t q = shift / word_bits;
    const auto r = static_cast<unsigned>(shift % word_bits);
    Word* w = words_.data();
    for (std::uint64_t i = hi + 1; i-- > q;) {
      Word src = w[i - q] << r;
      if (r != 0 && i > q) src |= w[i - q - 1] >> (word_bits - r);
      if (i == hi) src &= hi_mask;
      w[i] |= src;
    }
  }

  void refresh_top(std::uint64_t from_word) {
    for (std::uint64_t i = from_word + 1; i-- > 0;) {
      if (words_[i]) {
        top_ = i * word_bits + word_bits - 1 - static_cast<unsigned>(std::countl_zero(words_[i]));
        return;
      }
    }
    top_.reset();
  }

  static void put_le(std::ostream& os, std::uint64_t v, unsigned n) {
    char buf[8];
    for (unsigned i = 0; i < n; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    os.write(buf, n);
  }
  static std::uint64_t get_le(std::istream& is, unsigned n) {
    unsigned char buf[8] = {};
    is.read(reinterpret_cast<char*>(buf), n);
    std::uint64_t v = 0;
    for (unsigned i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
  }

  std::uint64_t length_;
  std::vector<Word> words_;
  std::optional<std::uint64_t> top_;
  BigInt denominator_ = 1;
};

}  // namespace egyptian
