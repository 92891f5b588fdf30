#pragma once

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace egyptian {

/// One evaluated inequality: `pass` says whether lhs and rhs are in the expected order.
struct CheckRow {
  std::string check;
  std::string point;
  double lhs = 0;
  double rhs = 0;
  bool pass = true;
  double slack = 0;
};

/// Outcome of a batch of inequality checks. Passes iff there are no violations.
class BoundReport {
 public:
  BoundReport() = default;
  BoundReport(std::string name, std::string checked_range)
      : name_(std::move(name)), checked_range_(std::move(checked_range)) {}

  void add(std::string check, std::string point, double lhs, double rhs, bool pass, double slack) {
    CheckRow row{std::move(check), std::move(point), lhs, rhs, pass, slack};
    margin_ = std::min(margin_, slack);
    if (!row.pass) violations_.push_back(row);
    rows_.push_back(std::move(row));
  }

  /// Appends another report's rows (the names are kept per row).
  void merge(const BoundReport& other) {
    for (const auto& r : other.rows_) add(r.check, r.point, r.lhs, r.rhs, r.pass, r.slack);
    if (!other.checked_range_.empty())
      checked_range_ += (checked_range_.empty() ? "" : "; ") + other.name_ + " " + other.checked_range_;
  }

  bool passed() const noexcept { return violations_.empty(); }
  const std::string& name() const noexcept { return name_; }
  const std::string& checked_range() const noexcept { return checked_range_; }
  const std::vector<CheckRow>& rows() const noexcept { return rows_; }
  const std::vector<CheckRow>& violations() const noexcept { return violations_; }
  /// Minimum slack over all rows; +inf when empty.
  double margin() const noexcept { return margin_; }

  void write_csv(std::ostream& os, bool header = true) const {
    if (header) os << "check,point,lhs,rhs,pass\n";
    for (const auto& r : rows_)
      os << r.check << ',' << r.point << ',' << fmt(r.lhs) << ',' << fmt(r.rhs) << ',' << (r.pass ? "true" : "false")
         << '\n';
  }

  void write_text(std::ostream& os) const {
    os << name_ << " [" << checked_range_ << "]: " << (passed() ? "PASS" : "FAIL") << " (" << rows_.size()
       << " points, margin " << fmt(margin_) << ")\n";
    for (const auto& v : violations_)
      os << "  violation " << v.check << " at " << v.point << ": lhs=" << fmt(v.lhs) << " rhs=" << fmt(v.rhs) << '\n';
  }

  static std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
  }

 private:
  std::string name_;
  std::string checked_range_;
  std::vector<CheckRow> rows_;
  std::vector<CheckRow> violations_;
  double margin_ = std::numeric_limits<double>::infinity();
};

}  // namespace egyptian
