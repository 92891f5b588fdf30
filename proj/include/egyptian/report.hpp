#pragma once

// Bundled reference table of |E_N|, the doubling-ratio histogram, the
// |U(N)| ln 2 / ln|E_N| series, and exact prefix comparison.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "egyptian/bound_report.hpp"
#include "egyptian/census.hpp"
#include "egyptian/errors.hpp"
#include "egyptian/exact_arith.hpp"
#include "egyptian/u_set.hpp"

#ifndef EGYPTIAN_DATA_DIR
#define EGYPTIAN_DATA_DIR "data"
#endif

namespace egyptian {

inline std::string default_data_dir() { return EGYPTIAN_DATA_DIR; }
inline std::string default_table2_path() { return default_data_dir() + "/table2.csv"; }

/// |E_N| for N = 0..nmax read from CSV `N,count`. Row 0 is 1 and counts strictly increase.
class BundledTable2 {
 public:
  static constexpr std::uint64_t expected_rows = 155;

  static BundledTable2 load(std::istream& is, bool require_full = true) {
    BundledTable2 t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      if (lineno == 1 && line == "N,count") continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw input_error("table2: line " + std::to_string(lineno) + ": expected N,count");
      CountRow row;
      try {
        row.n = std::stoull(line.substr(0, comma));
        row.count = BigInt(line.substr(comma + 1));
      } catch (const std::exception&) {
        throw input_error("table2: line " + std::to_string(lineno) + ": unparsable row '" + line + "'");
      }
      if (row.n != t.rows_.size())
        throw input_error("table2: expected N=" + std::to_string(t.rows_.size()) + " at line " + std::to_string(lineno));
      if (row.n == 0 && row.count != 1) throw input_error("table2: row 0 must be 1");
      if (!t.rows_.empty() && row.count <= t.rows_.back().count)
        throw input_error("table2: counts not strictly increasing at N=" + std::to_string(row.n));
      t.rows_.push_back(std::move(row));
    }
    if (t.rows_.empty()) throw input_error("table2: no rows");
    if (require_full && t.rows_.size() != expected_rows)
      throw input_error("table2: expected " + std::to_string(expected_rows) + " rows, got " +
                        std::to_string(t.rows_.size()));
    return t;
  }

  static BundledTable2 load_file(const std::string& path, bool require_full = true) {
    std::ifstream in(path);
    if (!in) throw input_error("table2: cannot open " + path);
    return load(in, require_full);
  }

  const std::vector<CountRow>& rows() const noexcept { return rows_; }
  std::uint64_t nmax() const noexcept { return rows_.size() - 1; }
  const BigInt& count(std::uint64_t n) const { return rows_.at(n).count; }

 private:
  std::vector<CountRow> rows_;
};

/// D(n) = #{2 <= N <= nmax : log2(count(N)/count(N-1)) in ((n-1)/10, n/10]}, n = 1..10.
/// Bin membership is decided exactly: N lands in the smallest n with count(N)^10 <= 2^n count(N-1)^10.
inline std::array<std::uint64_t, 10> d_histogram(std::span<const CountRow> rows) {
  if (rows.size() < 2 || rows.front().n != 0) throw input_error("d_histogram: table must start at N=0");
  std::array<std::uint64_t, 10> d{};
  for (std::size_t i = 2; i < rows.size(); ++i) {
    const BigInt a = pow(rows[i].count, 10);
    const BigInt b = pow(rows[i - 1].count, 10);
    if (a <= b || a > (b << 10))
      throw input_error("d_histogram: ratio at N=" + std::to_string(rows[i].n) + " is outside (1, 2]");
    unsigned n = 1;
    while (a > (b << n)) ++n;
    ++d[n - 1];
  }
  return d;
}

inline void write_table1(std::ostream& os, const std::array<std::uint64_t, 10>& d) {
  os << "n,D\n";
  for (std::size_t i = 0; i < d.size(); ++i) os << i + 1 << ',' << d[i] << '\n';
}

struct RatioPoint {
  std::uint64_t n;
  double y;
};

/// y(N) = |U ∩ [1, N]| ln 2 / ln count(N) for N >= 1, with U read off the doubling rows.
inline std::vector<RatioPoint> ratio_series(std::span<const CountRow> rows) {
  const auto u = u_from_counts(rows);
  std::vector<RatioPoint> out;
  std::uint64_t in_u = 0;
  auto it = u.begin();
  for (const auto& row : rows) {
    if (row.n == 0) continue;
    while (it != u.end() && *it <= row.n) {
      ++in_u;
      ++it;
    }
    const double ln_count = std::log(row.count.convert_to<long double>());
    out.push_back({row.n, static_cast<double>(in_u) * std::log(2.0) / ln_count});
  }
  return out;
}

inline void write_ratio_csv(std::ostream& os, const std::vector<RatioPoint>& pts) {
  os << "N,y\n";
  char buf[32];
  for (const auto& p : pts) {
    std::snprintf(buf, sizeof buf, "%.3f", p.y);
    os << p.n << ',' << buf << '\n';
  }
}

/// Row-by-row exact comparison of a computed census against the reference.
inline BoundReport verify_prefix(const CensusTable& computed, const BundledTable2& reference) {
  BoundReport r("prefix", "N = 1.." + std::to_string(computed.nmax()));
  for (const auto& row : computed.rows()) {
    std::string point = "N=" + std::to_string(row.n);
    if (row.n > reference.nmax()) {
      r.add("prefix", point + " (no reference)", row.count.convert_to<double>(), 0, false, -1);
      continue;
    }
    const BigInt& ref = reference.count(row.n);
    const bool ok = row.count == ref;
    if (!ok) point += " computed=" + row.count.str() + " reference=" + ref.str();
    r.add("prefix", point, row.count.convert_to<double>(), ref.convert_to<double>(), ok, ok ? 0.0 : -1.0);
  }
  return r;
}

/// Checks that a doubling flag is raised exactly at the members of U: each flagged N must be in the
/// certified closure, and each unflagged N must have a verifying non-membership certificate.
inline BoundReport verify_doubling_flags(const CensusTable& computed,
                                         CompatibilityOracle& oracle = default_compatibility()) {
  BoundReport r("doubling", "N = 1.." + std::to_string(computed.nmax()));
  for (const auto& row : computed.rows()) {
    const std::string point = "N=" + std::to_string(row.n);
    if (row.doubles) {
      const bool ok = oracle.certified_member(row.n);
      r.add("doubles=>certified", point, 1, ok ? 1 : 0, ok, ok ? 0.0 : -1.0);
    } else {
      const auto cert = certificate_for(row.n);
      const bool ok = cert && verify_nonmembership(*cert) && !oracle.certified_member(row.n);
      r.add("single=>certificate", point, 0, ok ? 0 : 1, ok, ok ? 0.0 : -1.0);
    }
    if (row.removed && !row.doubles) r.add("removed=>doubles", point, 0, 1, false, -1);
  }
  return r;
}

}  // namespace egyptian
