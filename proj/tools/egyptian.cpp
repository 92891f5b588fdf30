// Command-line front end: census, doubling set, analytic checks, presentation tables.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "egyptian/bounds.hpp"
#include "egyptian/census.hpp"
#include "egyptian/report.hpp"
#include "egyptian/u_set.hpp"

namespace eg = egyptian;

namespace {

std::uint64_t parse_size(const std::string& s) {
  if (s.empty()) throw eg::input_error("empty size");
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  std::string suffix = s.substr(used);
  for (auto& c : suffix) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (!suffix.empty() && suffix.back() == 'B') suffix.pop_back();
  double mult = 1;
  if (suffix == "K") mult = 1024.0;
  else if (suffix == "M") mult = 1024.0 * 1024;
  else if (suffix == "G") mult = 1024.0 * 1024 * 1024;
  else if (suffix == "T") mult = 1024.0 * 1024 * 1024 * 1024;
  else if (!suffix.empty()) throw eg::input_error("bad size suffix in '" + s + "'");
  if (v <= 0) throw eg::input_error("size must be positive: '" + s + "'");
  return static_cast<std::uint64_t>(v * mult);
}

struct OutFile {
  explicit OutFile(const std::string& path) {
    if (!path.empty() && path != "-") {
      file.open(path);
      if (!file) throw eg::input_error("cannot write " + path);
    }
  }
  std::ostream& get() { return file.is_open() ? static_cast<std::ostream&>(file) : std::cout; }
  std::ofstream file;
};

struct CensusArgs {
  std::uint64_t nmax = 0;
  std::string budget = "2G";
  std::string split = "none";
  std::string symmetry = "off";
  bool no_peel = false;
  std::string out;
  bool verify = false;
  std::string table = eg::default_table2_path();
  std::string dump;
};

eg::PipelineOptions pipeline_options(const CensusArgs& a) {
  eg::PipelineOptions opt;
  opt.peel = !a.no_peel;
  opt.symmetry = a.symmetry == "on";
  opt.budget_bytes = parse_size(a.budget);
  if (a.split == "none") {
    opt.split = eg::SplitMode::none;
  } else if (a.split == "auto") {
    opt.split = eg::SplitMode::automatic;
  } else {
    opt.split = eg::SplitMode::fixed;
    opt.split_modulus = std::stoull(a.split);
  }
  return opt;
}

int run_census(const CensusArgs& a) {
  auto opt = pipeline_options(a);
  std::ofstream dump;
  if (!a.dump.empty()) {
    dump.open(a.dump, std::ios::binary);
    if (!dump) throw eg::input_error("cannot write " + a.dump);
    opt.dump = &dump;
  }
  eg::CensusTable table;
  try {
    table = eg::census_run(a.nmax, opt);
  } catch (const eg::capacity_error& e) {
    std::cerr << "census: " << e.what() << '\n';
    if (e.required_bytes()) std::cerr << "required_bytes=" << e.required_bytes() << '\n';
    if (e.suggested_split()) std::cerr << "suggested_split=" << *e.suggested_split() << '\n';
    return 2;
  }
  OutFile out(a.out);
  table.write_csv(out.get());
  std::cerr << "removed " << table.trace.size() << " elements, reduced set has " << table.reduced.size()
            << ", split " << (table.split_modulus ? std::to_string(*table.split_modulus) : "none") << ", bitmap "
            << eg::SumsBitmap::format_bytes(table.bitmap_bytes) << '\n';
  if (!a.verify) return 0;
  const auto ref = eg::BundledTable2::load_file(a.table);
  const auto rep = eg::verify_prefix(table, ref);
  rep.write_text(std::cerr);
  return rep.passed() ? 0 : 1;
}

struct USetArgs {
  std::string source = "table";
  std::uint64_t nmax = 60;
  std::string table = eg::default_table2_path();
  bool certify = false;
};

std::string chain_text(const eg::MembershipChain& c) {
  std::string s = "1";
  for (const auto& st : c.steps) s += " -> " + std::to_string(st.m_prev * eg::ipow(st.p, st.k));
  return s;
}

int run_u_set(const USetArgs& a) {
  std::vector<eg::CountRow> rows;
  if (a.source == "table") {
    rows = eg::BundledTable2::load_file(a.table).rows();
  } else {
    eg::PipelineOptions opt;
    opt.symmetry = true;
    const auto t = eg::census_run(a.nmax, opt);
    rows.push_back({0, 1});
    for (const auto& r : t.count_rows()) rows.push_back(r);
  }
  const std::uint64_t limit = rows.back().n;
  const auto u = eg::u_from_counts(rows);
  if (!a.certify) {
    for (std::uint64_t n : u) std::cout << n << '\n';
    std::cerr << u.size() << " members up to " << limit << '\n';
    return 0;
  }
  auto& oracle = eg::default_compatibility();
  const auto cert_u = eg::certified_U(limit, oracle);
  std::size_t contradictions = 0, unverified = 0;
  std::cout << "n,member,evidence\n";
  for (std::uint64_t n = 1; n <= limit; ++n) {
    const bool member = std::binary_search(u.begin(), u.end(), n);
    std::string evidence;
    const auto it = std::lower_bound(cert_u.members.begin(), cert_u.members.end(), n);
    const bool certified = it != cert_u.members.end() && *it == n;
    const auto cert = eg::certificate_for(n);
    const bool refuted = cert && eg::verify_nonmembership(*cert);
    if (member) {
      if (refuted) ++contradictions, evidence = "CONTRADICTION " + eg::format_certificate(*cert);
      else if (certified) evidence = chain_text(cert_u.chains.at(*it));
      else ++unverified, evidence = "unverified";
    } else {
      if (certified) ++contradictions, evidence = "CONTRADICTION closure";
      else if (refuted) evidence = eg::format_certificate(*cert);
      else ++unverified, evidence = "unverified";
    }
    std::cout << n << ',' << (member ? 1 : 0) << ',' << evidence << '\n';
  }
  std::cerr << u.size() << " members up to " << limit << ", " << unverified << " without evidence, " << contradictions
            << " contradictions\n";
  return contradictions == 0 ? 0 : 1;
}

struct BoundsArgs {
  std::vector<std::string> checks{"all"};
  std::string csv;
  std::string table = eg::default_table2_path();
};

int run_bounds(const BoundsArgs& a) {
  unsigned sel = 0;
  bool sandwich = false;
  static const std::map<std::string, unsigned> named = {
      {"pi_g", eg::check_pi_g},
      {"step_integral", eg::check_step_integral},
      {"u_recursion", eg::check_u_recursion},
      {"g_vs_t1", eg::check_g_vs_t1},
      {"t_lower", eg::check_t_lower},
      {"u_density", eg::check_u_density},
      {"pi_lower", eg::check_pi_lower},
      {"psi", eg::check_psi},
      // short aliases
      {"3c", eg::check_pi_g},
      {"6c", eg::check_step_integral | eg::check_u_recursion},
      {"7c", eg::check_g_vs_t1},
      {"9c", eg::check_t_lower},
  };
  for (const auto& c : a.checks) {
    if (c == "all") sel |= eg::check_all, sandwich = true;
    else if (c == "t1" || c == "sandwich") sandwich = true;
    else if (const auto it = named.find(c); it != named.end()) sel |= it->second;
    else throw eg::input_error("unknown check '" + c + "'");
  }
  const auto table = eg::BundledTable2::load_file(a.table);
  eg::BoundReport report("bounds", "");
  if (sel) {
    const auto u = eg::u_from_counts(table.rows());
    const auto r = eg::analytic_checks(u, table.nmax(), eg::default_prime_table(), sel);
    r.write_text(std::cout);
    report.merge(r);
  }
  if (sandwich) {
    const auto r = eg::bound_sandwich(table.rows());
    r.write_text(std::cout);
    report.merge(r);
  }
  if (!a.csv.empty()) {
    OutFile out(a.csv);
    report.write_csv(out.get());
  }
  return report.passed() ? 0 : 1;
}

struct ReportArgs {
  bool table1 = false;
  bool figure = false;
  bool verify = false;
  std::uint64_t nmax = 60;
  std::string table = eg::default_table2_path();
  std::string out;
};

int run_report(const ReportArgs& a) {
  const auto table = eg::BundledTable2::load_file(a.table);
  OutFile out(a.out);
  bool ok = true;
  if (a.table1) eg::write_table1(out.get(), eg::d_histogram(table.rows()));
  if (a.figure) eg::write_ratio_csv(out.get(), eg::ratio_series(table.rows()));
  if (a.verify) {
    eg::PipelineOptions opt;
    opt.symmetry = true;
    const auto census = eg::census_run(a.nmax, opt);
    const auto prefix = eg::verify_prefix(census, table);
    const auto flags = eg::verify_doubling_flags(census);
    prefix.write_text(std::cerr);
    flags.write_text(std::cerr);
    ok = prefix.passed() && flags.passed();
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact census of distinct Egyptian-fraction sums and related bounds"};
  app.require_subcommand(1);

  CensusArgs ca;
  auto* census = app.add_subcommand("census", "Exact |E_N| for N = 1..nmax as CSV N,count,doubles,removed");
  census->add_option("--nmax", ca.nmax, "Largest N")->required()->check(CLI::PositiveNumber);
  census->add_option("--budget", ca.budget, "Bitmap memory budget, e.g. 512M, 16G")->capture_default_str();
  census->add_option("--split", ca.split, "none, auto, or a prime modulus")->capture_default_str();
  census->add_option("--symmetry", ca.symmetry, "Store only half of each bitmap")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  census->add_flag("--no-peel", ca.no_peel, "Accumulate every element instead of peeling doubling ones");
  census->add_option("--out", ca.out, "Output CSV (default stdout)");
  census->add_flag("--verify", ca.verify, "Compare with the reference table; exit 1 on mismatch");
  census->add_option("--table", ca.table, "Reference table CSV")->capture_default_str();
  census->add_option("--dump", ca.dump, "Write the final bitmap to this file");

  USetArgs ua;
  auto* uset = app.add_subcommand("u-set", "Doubling set U read off a count table");
  uset->add_option("--source", ua.source, "census or table")
      ->check(CLI::IsMember({"census", "table"}))
      ->capture_default_str();
  uset->add_option("--nmax", ua.nmax, "Census size when --source census")->capture_default_str();
  uset->add_option("--table", ua.table, "Reference table CSV")->capture_default_str();
  uset->add_flag("--certify", ua.certify, "Attach a membership chain or non-membership identity to every n");

  BoundsArgs ba;
  auto* bounds = app.add_subcommand("bounds", "Analytic inequality checks");
  bounds->add_option("--checks", ba.checks, "all, sandwich, pi_g, step_integral, u_recursion, g_vs_t1, t_lower, u_density, pi_lower, psi (aliases 3c, 6c, 7c, 9c, t1)")->delimiter(',')->capture_default_str();
  bounds->add_option("--csv", ba.csv, "Write check,point,lhs,rhs,pass rows to this file (- for stdout)");
  bounds->add_option("--table", ba.table, "Reference table CSV")->capture_default_str();

  ReportArgs ra;
  auto* report = app.add_subcommand("report", "Histogram of doubling ratios, ratio series, prefix verification");
  report->add_flag("--table1", ra.table1, "Histogram D(n) as n,D");
  report->add_flag("--figure", ra.figure, "Series |U(N)| ln2 / ln|E_N| as N,y");
  report->add_flag("--verify", ra.verify, "Run the census to --nmax and compare with the table");
  report->add_option("--nmax", ra.nmax, "Census size for --verify")->capture_default_str();
  report->add_option("--table", ra.table, "Reference table CSV")->capture_default_str();
  report->add_option("--out", ra.out, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*census) return run_census(ca);
    if (*uset) return run_u_set(ua);
    if (*bounds) return run_bounds(ba);
    if (*report) return run_report(ra);
  } catch (const eg::input_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
