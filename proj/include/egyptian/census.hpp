#pragma once

// Exact |E(S)| for prefixes of a denominator set S, where E(S) is the set of
// distinct sums of 1/n over subsets of S.
//
// Pipeline:
//   1. peel: drop elements whose presence provably doubles the count;
//   2. optionally split off the multiples q*b of one prime q, so the bitmap
//      only covers the q-free part and the multiples are handled by residue
//      classes of their shifts modulo q;
//   3. accumulate the remaining elements in increasing order with shift-OR
//      into a bitmap over the common denominator, optionally storing only
//      the lower half (every E(S) is symmetric about sigma/2).

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "egyptian/bitvec.hpp"
#include "egyptian/errors.hpp"
#include "egyptian/exact_arith.hpp"
#include "egyptian/u_set.hpp"

namespace egyptian {

/// Finite set of distinct positive integers with its lcm and harmonic sum.
class DenomSet {
 public:
  DenomSet() = default;

  explicit DenomSet(std::vector<std::uint64_t> elements) : elements_(std::move(elements)) {
    std::sort(elements_.begin(), elements_.end());
    if (!elements_.empty() && elements_.front() == 0) throw input_error("DenomSet: elements must be positive");
    if (std::adjacent_find(elements_.begin(), elements_.end()) != elements_.end())
      throw input_error("DenomSet: duplicate element");
    for (std::uint64_t n : elements_) {
      lcm_ = boost::multiprecision::lcm(lcm_, BigInt(n));
      sigma_ += Rational::unit(n);
    }
  }

  /// {1, ..., n}.
  static DenomSet first(std::uint64_t n) {
    std::vector<std::uint64_t> v(n);
    for (std::uint64_t i = 0; i < n; ++i) v[i] = i + 1;
    return DenomSet(std::move(v));
  }

  std::span<const std::uint64_t> elements() const noexcept { return elements_; }
  std::size_t size() const noexcept { return elements_.size(); }
  bool empty() const noexcept { return elements_.empty(); }
  bool contains(std::uint64_t n) const { return std::binary_search(elements_.begin(), elements_.end(), n); }
  const BigInt& lcm() const noexcept { return lcm_; }
  const Rational& harmonic_sum() const noexcept { return sigma_; }

  /// lcm * sigma, the largest numerator over the common denominator (an integer).
  BigInt span_numerator() const { return (Rational(lcm_) * sigma_).num(); }

  DenomSet without(std::uint64_t n) const {
    std::vector<std::uint64_t> v;
    for (std::uint64_t e : elements_)
      if (e != n) v.push_back(e);
    return DenomSet(std::move(v));
  }

  friend bool operator==(const DenomSet& a, const DenomSet& b) { return a.elements_ == b.elements_; }

 private:
  std::vector<std::uint64_t> elements_;
  BigInt lcm_ = 1;
  Rational sigma_;
};

/// Justifies dropping n = m * p^k: every multiple of p^k in the set is j * p^k with j <= m, p does not
/// divide j, and p is compatible with m. Then 1/n is never a signed sum of the other elements.
struct RemovalWitness {
  std::uint64_t removed;
  std::uint64_t m;
  std::uint64_t p;
  unsigned k;

  std::uint64_t prime_power() const { return ipow(p, k); }
  friend bool operator==(const RemovalWitness&, const RemovalWitness&) = default;
};

using ReductionTrace = std::vector<RemovalWitness>;

/// The witness with the largest p^k for removing n from s, if any.
inline std::optional<RemovalWitness> removable_witness(const DenomSet& s, std::uint64_t n,
                                                       CompatibilityOracle& oracle = default_compatibility()) {
  if (!s.contains(n)) throw input_error("removable_witness: " + std::to_string(n) + " is not in the set");
  std::optional<RemovalWitness> best;
  for (const auto& [p, e] : factorize(n)) {
    const std::uint64_t pk = ipow(p, e);
    const std::uint64_t m = n / pk;
    if (p <= m) continue;
    bool ok = true;
    for (std::uint64_t x : s.elements()) {
      if (x % pk) continue;
      const std::uint64_t j = x / pk;
      if (j > m || j % p == 0) {
        ok = false;
        break;
      }
    }
    if (!ok || !oracle.compatible(m, p)) continue;
    if (!best || pk > best->prime_power()) best = RemovalWitness{n, m, p, e};
  }
  return best;
}

enum class PeelOrder {
  largest_prime_power,  // largest p^k first, ties by larger element
  smallest_element,     // smallest removable element first
};

struct PeelResult {
  DenomSet reduced;
  ReductionTrace trace;
};

/// Removes witnessed elements until none is left, rescanning after each removal.
/// |E(S)| = 2^trace.size() * |E(reduced)|, and the same holds for every prefix S ∩ [1, N].
inline PeelResult peel(const DenomSet& s, PeelOrder order = PeelOrder::largest_prime_power,
                       CompatibilityOracle& oracle = default_compatibility()) {
  PeelResult out{s, {}};
  for (;;) {
    std::optional<RemovalWitness> pick;
    for (std::uint64_t n : out.reduced.elements()) {
      const auto w = removable_witness(out.reduced, n, oracle);
      if (!w) continue;
      if (order == PeelOrder::smallest_element) {
        pick = w;
        break;
      }
      if (!pick || w->prime_power() > pick->prime_power() ||
          (w->prime_power() == pick->prime_power() && w->removed > pick->removed))
        pick = w;
    }
    if (!pick) return out;
    out.reduced = out.reduced.without(pick->removed);
    out.trace.push_back(*pick);
  }
}

/// E(S) held either in full or as its lower half (bits 0..span/2), the upper half
/// being the mirror image about span/2.
class SumsAccumulator {
 public:
  SumsAccumulator(std::uint64_t final_span, bool half, std::uint64_t budget_bytes)
      : half_(half), bits_(SumsBitmap::alloc(storage_length(final_span, half), budget_bytes)) {
    bits_.set(0);
  }

  static std::uint64_t storage_length(std::uint64_t final_span, bool half) {
    return half ? final_span / 2 + 1 : final_span + 1;
  }

  bool half() const noexcept { return half_; }
  /// Largest element of the current set, as a numerator.
  std::uint64_t span() const noexcept { return span_; }
  const SumsBitmap& storage() const noexcept { return bits_; }

  /// E <- E ∪ (E + shift).
  void insert(std::uint64_t shift) {
    if (!half_) {
      bits_.shift_or_inplace(shift);
      span_ += shift;
      return;
    }
    const std::uint64_t old_span = span_, new_span = span_ + shift;
    const std::uint64_t old_half = old_span / 2, new_half = new_span / 2;
    // Materialize the old upper half that now falls inside the stored range.
    const std::uint64_t fill_end = std::min(new_half, old_span);
    for (std::uint64_t j = old_half + 1; j <= fill_end; j += word_bits) {
      const auto cnt = static_cast<unsigned>(std::min<std::uint64_t>(word_bits, fill_end - j + 1));
      const Word src = bits_.extract(static_cast<std::int64_t>(old_span - j - cnt + 1)) & low_mask(cnt);
      bits_.or_bits(j, reverse_bits(src) >> (word_bits - cnt), cnt);
    }
    bits_.shift_or_within(shift, new_half + 1);
    span_ = new_span;
  }

  /// |E|.
  std::uint64_t count() const {
    if (!half_) return bits_.popcount();
    if (span_ % 2 == 0) return 2 * bits_.popcount(0, span_ / 2) + (bits_.test(span_ / 2) ? 1 : 0);
    return 2 * bits_.popcount(0, span_ / 2 + 1);
  }

  /// Logical bits [pos, pos + 64) of the full set; zero outside [0, span].
  Word word_at(std::int64_t pos) const {
    if (!half_) return bits_.extract(pos);
    Word w = bits_.extract(pos);  // stored bits above span/2 are zero
    const std::int64_t mid = static_cast<std::int64_t>(span_ / 2) + 1;
    const std::int64_t a = std::max(pos, mid);
    const std::int64_t b = std::min<std::int64_t>(pos + word_bits - 1, static_cast<std::int64_t>(span_));
    if (a <= b) {
      const auto cnt = static_cast<unsigned>(b - a + 1);
      const Word src = bits_.extract(static_cast<std::int64_t>(span_) - b) & low_mask(cnt);
      w |= (reverse_bits(src) >> (word_bits - cnt)) << static_cast<unsigned>(a - pos);
    }
    return w;
  }

 private:
  bool half_;
  SumsBitmap bits_;
  std::uint64_t span_ = 0;
};

/// |⋃_i (E + offsets[i])| streamed word by word, without materializing the union.
inline std::uint64_t union_count(const SumsAccumulator& acc, std::span<const std::uint64_t> offsets) {
  if (offsets.empty()) return 0;
  const std::uint64_t max_off = *std::max_element(offsets.begin(), offsets.end());
  const std::uint64_t end = acc.span() + max_off;  // inclusive
  const std::uint64_t last_word = end / word_bits;
  std::uint64_t n = 0;
  for (std::uint64_t w = 0; w <= last_word; ++w) {
    Word x = 0;
    const auto base = static_cast<std::int64_t>(w * word_bits);
    for (std::uint64_t off : offsets) x |= acc.word_at(base - static_cast<std::int64_t>(off));
    if (w == last_word) x &= low_mask(static_cast<unsigned>(end % word_bits) + 1);
    n += static_cast<std::uint64_t>(std::popcount(x));
  }
  return n;
}

/// Sums of subsets of {unit/b : b in bs}, grouped by residue mod q. Within a class the
/// shifts differ by multiples of q; different classes never collide.
struct ShiftClass {
  std::uint64_t residue;
  std::vector<std::uint64_t> shifts;  // ascending
};

inline std::vector<ShiftClass> split_classes(std::span<const std::uint64_t> bs, std::uint64_t unit, std::uint64_t q) {
  if (bs.size() > 20)
    throw capacity_error("split: " + std::to_string(bs.size()) + " multiples give too many shift combinations");
  std::vector<std::uint64_t> sums{0};
  for (std::uint64_t b : bs) {
    if (unit % b) throw input_error("split_classes: unit not divisible by " + std::to_string(b));
    const std::uint64_t step = unit / b;
    const std::size_t n = sums.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (sums[i] > UINT64_MAX - step) throw capacity_error("split_classes: shift overflows 64 bits");
      sums.push_back(sums[i] + step);
    }
  }
  std::sort(sums.begin(), sums.end());
  sums.erase(std::unique(sums.begin(), sums.end()), sums.end());
  std::map<std::uint64_t, std::vector<std::uint64_t>> by_residue;
  for (std::uint64_t v : sums) by_residue[v % q].push_back(v);
  std::vector<ShiftClass> out;
  for (auto& [r, v] : by_residue) out.push_back({r, std::move(v)});
  return out;
}

enum class SplitMode { none, automatic, fixed };

struct PipelineOptions {
  bool peel = true;
  SplitMode split = SplitMode::none;
  std::uint64_t split_modulus = 0;  // used with SplitMode::fixed
  bool symmetry = false;
  std::uint64_t budget_bytes = default_budget_bytes;
  std::ostream* dump = nullptr;  // receives the final bitmap in SumsBitmap::dump format
};

struct PipelineResult {
  DenomSet input;
  std::vector<BigInt> counts;  // counts[i] = |E({s_1, ..., s_{i+1}})| for the sorted input
  DenomSet reduced;
  ReductionTrace trace;
  std::optional<std::uint64_t> split_modulus;
  BigInt unit = 1;  // common denominator of the bitmap
  std::uint64_t bitmap_bytes = 0;
};

namespace detail {

struct SplitPlan {
  std::optional<std::uint64_t> q;
  std::vector<std::uint64_t> base;       // elements accumulated in the bitmap
  std::vector<std::uint64_t> cofactors;  // b for each multiple q*b
  BigInt unit = 1;
  std::uint64_t span = 0;
  std::uint64_t bytes = 0;
};

inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline SplitPlan make_plan(const DenomSet& reduced, std::optional<std::uint64_t> q, bool half) {
  SplitPlan plan;
  for (std::uint64_t e : reduced.elements()) {
    if (q && e % *q == 0)
      plan.cofactors.push_back(e / *q);
    else
      plan.base.push_back(e);
  }
  if (q && !plan.cofactors.empty()) plan.q = q;
  Rational sigma;
  for (std::uint64_t e : plan.base) {
    plan.unit = lcm(plan.unit, BigInt(e));
    sigma += Rational::unit(e);
  }
  for (std::uint64_t b : plan.cofactors) plan.unit = lcm(plan.unit, BigInt(b));
  const BigInt span = (Rational(plan.unit) * sigma).num();
  // Shifts of the split classes are bounded by unit * sigma(B); keep them inside 64 bits too.
  Rational sigma_b;
  for (std::uint64_t b : plan.cofactors) sigma_b += Rational::unit(b);
  to_u64((Rational(plan.unit) * sigma_b).num() + span, "bitmap span");
  plan.span = to_u64(span, "bitmap span");
  plan.bytes = SumsBitmap::bytes_for(SumsAccumulator::storage_length(plan.span, half));
  return plan;
}

}  // namespace detail

/// Largest prime dividing some element of `s` that has at most `max_multiples` multiples there.
inline std::optional<std::uint64_t> suggest_split(const DenomSet& s, std::size_t max_multiples = 6) {
  std::set<std::uint64_t> primes;
  for (std::uint64_t e : s.elements())
    for (const auto& pp : factorize(e)) primes.insert(pp.p);
  for (auto it = primes.rbegin(); it != primes.rend(); ++it) {
    const auto k = std::count_if(s.elements().begin(), s.elements().end(), [&](std::uint64_t e) { return e % *it == 0; });
    if (static_cast<std::size_t>(k) <= max_multiples) return *it;
  }
  return std::nullopt;
}

/// Exact |E(prefix)| after each element of `s` (in increasing order).
inline PipelineResult count_prefixes(const DenomSet& s, const PipelineOptions& opt = {},
                                     CompatibilityOracle& oracle = default_compatibility()) {
  PipelineResult res;
  res.input = s;
  if (opt.peel) {
    auto pr = peel(s, PeelOrder::largest_prime_power, oracle);
    res.reduced = std::move(pr.reduced);
    res.trace = std::move(pr.trace);
  } else {
    res.reduced = s;
  }

  detail::SplitPlan plan;
  const auto over_budget = [&](const detail::SplitPlan& p) { return p.bytes > opt.budget_bytes; };
  const auto fail = [&](const detail::SplitPlan& p, std::optional<std::uint64_t> hint) {
    std::string msg = "census needs " + SumsBitmap::format_bytes(p.bytes) + " of bitmap, budget is " +
                      SumsBitmap::format_bytes(opt.budget_bytes);
    if (hint) msg += "; try split modulus " + std::to_string(*hint);
    throw capacity_error(msg, p.bytes, hint);
  };
  switch (opt.split) {
    case SplitMode::fixed:
      if (!detail::is_prime_u64(opt.split_modulus))
        throw input_error("split modulus " + std::to_string(opt.split_modulus) + " is not prime");
      plan = detail::make_plan(res.reduced, opt.split_modulus, opt.symmetry);
      if (over_budget(plan)) fail(plan, std::nullopt);
      break;
    case SplitMode::automatic: {
      plan = detail::make_plan(res.reduced, std::nullopt, opt.symmetry);
      if (!over_budget(plan)) break;
      const auto q = suggest_split(res.reduced);
      if (!q) fail(plan, std::nullopt);
      auto split = detail::make_plan(res.reduced, *q, opt.symmetry);
      if (over_budget(split)) fail(split, q);
      plan = std::move(split);
      break;
    }
    case SplitMode::none:
      plan = detail::make_plan(res.reduced, std::nullopt, opt.symmetry);
      if (over_budget(plan)) fail(plan, suggest_split(res.reduced));
      break;
  }
  res.split_modulus = plan.q;
  res.unit = plan.unit;
  res.bitmap_bytes = plan.bytes;

  const std::uint64_t unit = to_u64(plan.unit, "common denominator");
  SumsAccumulator acc(plan.span, opt.symmetry, opt.budget_bytes);
  std::set<std::uint64_t> removed;
  for (const auto& w : res.trace) removed.insert(w.removed);
  std::vector<std::uint64_t> cofactors;

  const auto reduced_count = [&]() -> std::uint64_t {
    const std::uint64_t base = acc.count();
    if (cofactors.empty()) return base;
    std::uint64_t total = 0;
    for (const auto& cls : split_classes(cofactors, unit, *plan.q)) {
      if (cls.shifts.size() == 1) {
        total += base;
        continue;
      }
      std::vector<std::uint64_t> offsets;
      for (std::uint64_t v : cls.shifts) offsets.push_back((v - cls.shifts.front()) / *plan.q);
      total += union_count(acc, offsets);
    }
    return total;
  };

  std::uint64_t doublings = 0;
  BigInt current = 1;
  for (std::uint64_t e : s.elements()) {
    if (removed.count(e)) {
      ++doublings;
    } else {
      if (plan.q && e % *plan.q == 0)
        cofactors.push_back(e / *plan.q);
      else
        acc.insert(unit / e);
      current = reduced_count();
    }
    res.counts.push_back(current << static_cast<unsigned>(doublings));
  }
  if (opt.dump) acc.storage().dump(*opt.dump);
  return res;
}

/// |E(a)| using the residue-class split on the prime q (no peeling).
inline BigInt split_count(const DenomSet& a, std::uint64_t q, std::uint64_t budget_bytes = default_budget_bytes,
                          bool symmetry = false) {
  if (a.empty()) return 1;
  PipelineOptions opt;
  opt.peel = false;
  opt.split = SplitMode::fixed;
  opt.split_modulus = q;
  opt.symmetry = symmetry;
  opt.budget_bytes = budget_bytes;
  return count_prefixes(a, opt).counts.back();
}

/// Center of symmetry of E(S): x in E(S) iff sigma - x in E(S).
inline Rational symmetry_center(const DenomSet& s) { return s.harmonic_sum() / Rational(2); }

inline constexpr std::size_t brute_force_limit = 24;

/// All subset sums as numerators over lcm(S), sorted and deduplicated. Independent of the bitmap path.
inline std::vector<std::uint64_t> brute_force_numerators(const DenomSet& s) {
  if (s.size() > brute_force_limit)
    throw capacity_error("brute_force_E: |S| = " + std::to_string(s.size()) + " exceeds " +
                         std::to_string(brute_force_limit));
  const std::uint64_t l = to_u64(s.lcm(), "lcm(S)");
  to_u64(s.span_numerator(), "lcm(S) * sigma(S)");
  std::vector<std::uint64_t> step;
  for (std::uint64_t n : s.elements()) step.push_back(l / n);
  const std::size_t total = std::size_t{1} << s.size();
  std::vector<std::uint64_t> sums(total);
  // Gray-code walk: subset i differs from i-1 in exactly one element.
  std::uint64_t acc = 0;
  std::uint64_t gray = 0;
  for (std::size_t i = 1; i < total; ++i) {
    const auto bit = static_cast<unsigned>(std::countr_zero(i));
    gray ^= std::uint64_t{1} << bit;
    if (gray >> bit & 1U)
      acc += step[bit];
    else
      acc -= step[bit];
    sums[i] = acc;
  }
  std::sort(sums.begin(), sums.end());
  sums.erase(std::unique(sums.begin(), sums.end()), sums.end());
  return sums;
}

/// E(S) as sorted exact rationals, by enumeration of all 2^|S| subsets.
inline std::vector<Rational> brute_force_E(const DenomSet& s) {
  const auto nums = brute_force_numerators(s);
  std::vector<Rational> out;
  out.reserve(nums.size());
  for (std::uint64_t v : nums) out.emplace_back(BigInt(v), s.lcm());
  return out;
}

struct CensusRow {
  std::uint64_t n;
  BigInt count;
  bool doubles;
  bool removed;
};

/// |E_N| for N = 1..nmax with doubling and removal flags.
class CensusTable {
 public:
  CensusTable() = default;
  explicit CensusTable(std::vector<CensusRow> rows) : rows_(std::move(rows)) {}

  const std::vector<CensusRow>& rows() const noexcept { return rows_; }
  std::uint64_t nmax() const noexcept { return rows_.empty() ? 0 : rows_.back().n; }
  const BigInt& count(std::uint64_t n) const { return rows_.at(n - 1).count; }

  std::vector<CountRow> count_rows() const {
    std::vector<CountRow> out;
    for (const auto& r : rows_) out.push_back({r.n, r.count});
    return out;
  }

  void write_csv(std::ostream& os) const {
    os << "N,count,doubles,removed\n";
    for (const auto& r : rows_)
      os << r.n << ',' << r.count.str() << ',' << (r.doubles ? 1 : 0) << ',' << (r.removed ? 1 : 0) << '\n';
  }

  DenomSet reduced;
  ReductionTrace trace;
  std::optional<std::uint64_t> split_modulus;
  std::uint64_t bitmap_bytes = 0;

 private:
  std::vector<CensusRow> rows_;
};

/// Exact census of E_N for all N <= nmax.
inline CensusTable census_run(std::uint64_t nmax, const PipelineOptions& opt = {},
                              CompatibilityOracle& oracle = default_compatibility()) {
  if (nmax == 0) throw input_error("census_run: nmax must be >= 1");
  const auto res = count_prefixes(DenomSet::first(nmax), opt, oracle);
  std::set<std::uint64_t> removed;
  for (const auto& w : res.trace) removed.insert(w.removed);
  std::vector<CensusRow> rows;
  BigInt prev = 1;
  for (std::uint64_t n = 1; n <= nmax; ++n) {
    const BigInt& c = res.counts[n - 1];
    rows.push_back({n, c, c == 2 * prev, removed.count(n) > 0});
    prev = c;
  }
  CensusTable table(std::move(rows));
  table.reduced = res.reduced;
  table.trace = res.trace;
  table.split_modulus = res.split_modulus;
  table.bitmap_bytes = res.bitmap_bytes;
  return table;
}

}  // namespace egyptian
