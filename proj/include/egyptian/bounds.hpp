#pragma once

// Analytic side: iterated logarithms, exponential towers e_k and h_k, the
// functions T_k, the sequence a_k, the lower and upper bounds for ln|E_N|,
// and numeric verification of the supporting inequalities on finite ranges.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/mpfr.hpp>

#include "egyptian/bound_report.hpp"
#include "egyptian/errors.hpp"
#include "egyptian/exact_arith.hpp"
#include "egyptian/u_set.hpp"

namespace egyptian {

/// 50 significant decimal digits.
using Real = bmp::number<bmp::mpfr_float_backend<50>, bmp::et_off>;

inline Real to_real(const BigInt& v) { return Real(v.str()); }
inline Real to_real(const Rational& r) { return to_real(r.num()) / to_real(r.den()); }

/// ln applied k times; iter_log(0, x) = x.
inline Real iter_log(unsigned k, Real x) {
  for (unsigned i = 0; i < k; ++i) {
    if (x <= 0) throw domain_error("iter_log: ln_" + std::to_string(i + 1) + " undefined (argument <= 0)");
    x = log(x);
  }
  return x;
}

inline std::optional<Real> try_iter_log(unsigned k, const Real& x) {
  try {
    return iter_log(k, x);
  } catch (const domain_error&) {
    return std::nullopt;
  }
}

/// A tower value, or nothing when it overflows the floating range.
struct TowerValue {
  std::optional<Real> value;
  bool too_large() const noexcept { return !value; }
  const Real& operator*() const { return value.value(); }
};

/// e_0 = 1, e_k = exp(e_{k-1}).
inline TowerValue tower_e(unsigned k) {
  Real e = 1;
  for (unsigned i = 0; i < k; ++i) {
    e = exp(e);
    if (isinf(e)) return {};
  }
  return {e};
}

struct Towers {
  TowerValue e;
  TowerValue h;
};

/// e_k and h_k, where h_1 = 1 and h_k = exp(h_{k-1}) + 1/4. Always e_{k-1} <= h_k <= e_k.
inline Towers tower_h(unsigned k) {
  if (k == 0) throw input_error("tower_h: k must be >= 1");
  Real h = 1;
  for (unsigned i = 2; i <= k; ++i) {
    h = exp(h) + Real(0.25);
    if (isinf(h)) return {tower_e(k), {}};
  }
  Towers t{tower_e(k), {h}};
  const TowerValue below = tower_e(k - 1);
  if ((!below.too_large() && h < *below) || (!t.e.too_large() && h > *t.e))
    throw std::logic_error("tower_h: h_k outside [e_{k-1}, e_k]");
  return t;
}

/// Lower bound for ln|E_N|. k <= 2 gives 2 ln2 N/ln N (needs ln_2 N >= 1), k = 3 multiplies by
/// ln_3 N (needs ln_3 N >= 1), k >= 4 by (1 - 3/(2 ln_k N)) prod_{j=3..k} ln_j N (needs ln_k N >= 3/2).
inline std::optional<Real> theorem1_lower(std::uint64_t n, unsigned k) {
  if (k == 0) throw input_error("theorem1_lower: k must be >= 1");
  const Real x(n);
  const unsigned gate = k <= 2 ? 2 : k;
  const auto lg = try_iter_log(gate, x);
  if (!lg || *lg < (k >= 4 ? Real(1.5) : Real(1))) return std::nullopt;
  const Real base = 2 * log(Real(2)) * x / log(x);
  if (k <= 2) return base;
  if (k == 3) return base * *lg;
  Real prod = 1;
  for (unsigned j = 3; j <= k; ++j) prod *= iter_log(j, x);
  return base * (1 - Real(1.5) / *lg) * prod;
}

/// Upper bound N ln_k N / ln N * prod_{j=3..k} ln_j N for ln|E_N|, valid when ln_{2k} N >= 1.
inline std::optional<Real> eq1C_upper(std::uint64_t n, unsigned k) {
  if (k == 0) throw input_error("eq1C_upper: k must be >= 1");
  const Real x(n);
  const auto gate = try_iter_log(2 * k, x);
  if (!gate || *gate < 1) return std::nullopt;
  Real prod = 1;
  for (unsigned j = 3; j <= k; ++j) prod *= iter_log(j, x);
  return x * iter_log(k, x) / log(x) * prod;
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
template <class F>
long double adaptive_simpson(F&& f, long double a, long double b, long double tol = 1e-10L, int max_depth = 48) {
  if (!(b > a)) return 0;
  const std::function<long double(long double, long double, long double, long double, long double, long double,
                                  long double, int)>
      rec = [&](long double lo, long double hi, long double flo, long double fmid, long double fhi, long double whole,
                long double eps, int depth) -> long double {
    const long double mid = (lo + hi) / 2;
    const long double lm = (lo + mid) / 2, rm = (mid + hi) / 2;
    const long double flm = f(lm), frm = f(rm);
    const long double left = (mid - lo) / 6 * (flo + 4 * flm + fmid);
    const long double right = (hi - mid) / 6 * (fmid + 4 * frm + fhi);
    const long double diff = left + right - whole;
    if (depth <= 0 || std::fabs(diff) <= 15 * eps) return left + right + diff / 15;
    return rec(lo, mid, flo, flm, fmid, left, eps / 2, depth - 1) +
           rec(mid, hi, fmid, frm, fhi, right, eps / 2, depth - 1);
  };
  const long double fa = f(a), fb = f(b), fm = f((a + b) / 2);
  return rec(a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), tol, max_depth);
}

enum class TMethod { closed_form, quadrature };

namespace detail {
inline long double h2() { return std::exp(1.0L) + 0.25L; }
inline long double h3() { return std::exp(h2()) + 0.25L; }
}  // namespace detail

/// T_1(z) = ln z for z > 1; T_k(z) = integral of T_{k-1} over [h_{k-1}, ln(z - 1/4)] for z > h_k; zero otherwise.
/// k = 2 has a closed form; k = 3 is always by quadrature.
inline double T_eval(unsigned k, double z, TMethod method = TMethod::closed_form) {
  if (z < 0) throw input_error("T_eval: z must be >= 0");
  const long double x = z;
  switch (k) {
    case 1:
      return x > 1 ? static_cast<double>(std::log(x)) : 0.0;
    case 2: {
      if (x <= detail::h2()) return 0.0;
      const long double u = std::log(x - 0.25L);
      if (method == TMethod::closed_form) return static_cast<double>(u * std::log(u) - u + 1);
      return static_cast<double>(adaptive_simpson([](long double w) { return std::log(w); }, 1.0L, u));
    }
    case 3: {
      if (x <= detail::h3()) return 0.0;
      const long double u = std::log(x - 0.25L);
      const auto t2 = [](long double w) {
        const long double v = std::log(w - 0.25L);
        return w > detail::h2() ? v * std::log(v) - v + 1 : 0.0L;
      };
      return static_cast<double>(adaptive_simpson(t2, detail::h2(), u));
    }
    default:
      throw input_error("T_eval: k must be 1, 2 or 3");
  }
}

/// a_3 = 1.28, a_k = a_{k-1} + 1/e_{k-2} + (k-2)/(e_{k-2} e_{k-3}).
inline Real a_seq(unsigned k) {
  if (k < 3) throw input_error("a_seq: k must be >= 3");
  Real a("1.28");
  for (unsigned j = 4; j <= k; ++j) {
    const TowerValue e2 = tower_e(j - 2);
    if (e2.too_large()) break;  // remaining terms are below the working precision
    const TowerValue e3 = tower_e(j - 3);
    a += 1 / *e2 + Real(j - 2) / (*e2 * *e3);
  }
  return a;
}

/// Integral over [1, y] of |U(v)|/v^2 for the step function |U(v)| = #{u in U : u <= v}.
inline Real step_integral(std::span<const std::uint64_t> u, const Real& y) {
  Real s = 0;
  for (std::uint64_t m : u)
    if (Real(m) <= y) s += 1 / Real(m) - 1 / y;
  return s;
}

enum AnalyticCheck : unsigned {
  check_pi_g = 1U << 0,          // pi(g_m) <= 18 3^m / (m ln(18 3^m)), m <= 16
  check_step_integral = 1U << 1, // step integral over [1, e^e] >= 11/5
  check_u_recursion = 1U << 2,   // |U(x)| >= x/ln x * step integral up to y
  check_g_vs_t1 = 1U << 3,       // G(z) >= 2 T_1(z) at z = ln ln x
  check_t_lower = 1U << 4,       // T_2, T_3 lower bounds on a log grid up to 10^6
  check_u_density = 1U << 5,     // |U(x)| >= 2x/ln x for x >= 13
  check_pi_lower = 1U << 6,      // pi(t) >= t/ln t for t >= 17
  check_psi = 1U << 7,           // ln d_m <= 1.04 m for m <= 1000
  check_all = (1U << 8) - 1,
};

namespace detail {

inline std::string pt(const std::string& k, std::uint64_t v) { return k + "=" + std::to_string(v); }
inline std::string pt(const std::string& k, double v) { return k + "=" + BoundReport::fmt(v); }

inline void add_ge(BoundReport& r, const std::string& check, const std::string& point, const Real& lhs,
                   const Real& rhs) {
  r.add(check, point, lhs.convert_to<double>(), rhs.convert_to<double>(), lhs >= rhs, (lhs - rhs).convert_to<double>());
}

inline std::uint64_t count_upto(std::span<const std::uint64_t> u, std::uint64_t x) {
  return static_cast<std::uint64_t>(std::upper_bound(u.begin(), u.end(), x) - u.begin());
}

inline void pi_g(BoundReport& r, const PrimeTable& primes) {
  for (std::uint64_t m = 1; m <= 16; ++m) {
    const std::uint64_t g = to_u64(harmonic_g(m), "g_m");
    const Real t = 18 * pow(Real(3), static_cast<int>(m));
    add_ge(r, "pi_g", pt("m", m), t / (Real(m) * log(t)), Real(primes.pi(g)));
  }
}

inline void step_integral_bound(BoundReport& r, std::span<const std::uint64_t> u) {
  const Real ee = exp(exp(Real(1)));
  // Rigorous rational lower bound for e^e; the integral increases with the upper limit.
  const BigInt scale = pow(BigInt(10), 30);
  const BigInt floor_scaled = floor(ee * to_real(scale)).convert_to<BigInt>();
  const Rational ee_lo(floor_scaled - 1, scale);
  const auto top = static_cast<std::uint64_t>(floor(ee).convert_to<double>());
  Rational sum_inv;
  std::uint64_t cnt = 0;
  for (std::uint64_t m : u)
    if (m <= top) {
      sum_inv += Rational::unit(m);
      ++cnt;
    }
  const Rational lower = sum_inv - Rational(static_cast<std::int64_t>(cnt)) / ee_lo;
  const Rational target(BigInt(11), BigInt(5));
  const Real value = step_integral(u, ee);
  r.add("step_integral", "y=e^e", value.convert_to<double>(), 2.2, lower >= target, (value - Real("2.2")).convert_to<double>());
}

inline void u_recursion(BoundReport& r, std::span<const std::uint64_t> u, std::uint64_t xmax) {
  for (std::uint64_t x = 54; x <= xmax; ++x) {
    const Real xr(x);
    const Real ymax = log(xr / 18) / log(Real(3));
    if (ymax < 1) continue;
    // The right side increases with y, so y = ymax is the binding case; a few interior y are added.
    for (int i = 0; i <= 4; ++i) {
      const Real y = 1 + (ymax - 1) * i / 4;
      const Real rhs = xr / log(xr) * step_integral(u, y);
      add_ge(r, "u_recursion", pt("x", x) + " " + pt("y", y.convert_to<double>()), Real(count_upto(u, x)), rhs);
    }
  }
}

inline void g_vs_t1(BoundReport& r, std::span<const std::uint64_t> u, std::uint64_t xmax) {
  for (std::uint64_t x = 3; x <= xmax; ++x) {
    const Real xr(x);
    const Real z = iter_log(2, xr);
    const Real g = log(xr) / xr * Real(count_upto(u, x));
    const Real t1 = z > 1 ? log(z) : Real(0);
    add_ge(r, "g_vs_t1", pt("x", x), g, 2 * t1);
  }
}

inline void t_lower(BoundReport& r, int grid = 400) {
  struct Case {
    unsigned k;
    long double h;
    long double a;
  };
  for (const Case c : {Case{2, detail::h2(), 1.0L}, Case{3, detail::h3(), 1.28L}}) {
    const long double lo = std::log(c.h), hi = std::log(1e6L);
    for (int i = 0; i <= grid; ++i) {
      const long double z = std::exp(lo + (hi - lo) * i / grid);
      const double t = T_eval(c.k, static_cast<double>(z));
      long double prod = 1;
      for (unsigned j = 1; j < c.k; ++j) {
        long double v = z;
        for (unsigned s = 0; s < j; ++s) v = std::log(v);
        prod *= v;
      }
      long double lk = z;
      for (unsigned s = 0; s < c.k; ++s) lk = std::log(lk);
      const long double rhs = prod * lk - c.a * prod;
      r.add("t_lower_T" + std::to_string(c.k), pt("z", static_cast<double>(z)), t, static_cast<double>(rhs),
            t >= rhs - 1e-10L, static_cast<double>(t - rhs));
    }
  }
}

inline void rosser_schoenfeld(BoundReport& r, const PrimeTable& primes) {
  // One row per decade with the tightest point; every integer t is checked.
  const std::uint64_t limit = std::min<std::uint64_t>(primes.limit(), 1'000'000);
  std::uint64_t decade_end = 100, pi = primes.pi(16);
  double worst = 1e300, worst_l = 0, worst_r = 0;
  std::uint64_t worst_t = 17;
  for (std::uint64_t t = 17; t <= limit; ++t) {
    if (primes.is_prime(t)) ++pi;
    const double rhs = static_cast<double>(t) / std::log(static_cast<double>(t));
    const double slack = static_cast<double>(pi) - rhs;
    if (slack < worst) {
      worst = slack;
      worst_t = t;
      worst_l = static_cast<double>(pi);
      worst_r = rhs;
    }
    if (t == decade_end - 1 || t == limit) {
      r.add("pi_lower", pt("t", worst_t), worst_l, worst_r, worst >= 0, worst);
      decade_end *= 10;
      worst = 1e300;
    }
  }
}

inline void chebyshev_psi(BoundReport& r, const PrimeTable& primes) {
  for (std::uint64_t m = 1; m <= 1000; ++m) {
    const long double psi = ln_lcm_range(m, primes);
    const long double rhs = 1.04L * static_cast<long double>(m);
    r.add("psi", pt("m", m), static_cast<double>(psi), static_cast<double>(rhs), psi <= rhs,
          static_cast<double>(rhs - psi));
  }
}

}  // namespace detail

/// Runs the selected inequality checks against U ∩ [1, u_limit] (sorted and exact on that range).
inline BoundReport analytic_checks(std::span<const std::uint64_t> u, std::uint64_t u_limit,
                                   const PrimeTable& primes = default_prime_table(), unsigned selection = check_all) {
  if (!u.empty() && u.back() > u_limit) throw input_error("analytic_checks: U has elements beyond u_limit");
  if (u_limit < 15) throw input_error("analytic_checks: U must be known at least up to 15");
  BoundReport r("analytic", "U up to " + std::to_string(u_limit));
  if (selection & check_pi_g) detail::pi_g(r, primes);
  if (selection & check_step_integral) detail::step_integral_bound(r, u);
  if (selection & check_u_recursion) detail::u_recursion(r, u, u_limit);
  if (selection & check_g_vs_t1) detail::g_vs_t1(r, u, u_limit);
  if (selection & check_t_lower) detail::t_lower(r);
  if (selection & check_u_density) r.merge(check_lemma5C(u, u_limit));
  if (selection & check_pi_lower) detail::rosser_schoenfeld(r, primes);
  if (selection & check_psi) detail::chebyshev_psi(r, primes);
  return r;
}

/// theorem1_lower(N, 1) <= ln|E_N| <= eq1C_upper(N, 1) wherever the hypotheses hold.
inline BoundReport bound_sandwich(std::span<const CountRow> rows) {
  BoundReport r("sandwich", "Table rows with N >= 16");
  for (const auto& row : rows) {
    if (row.count <= 0) throw input_error("bound_sandwich: non-positive count at N=" + std::to_string(row.n));
    const Real ln_count = log(to_real(row.count));
    if (const auto lo = theorem1_lower(row.n, 1))
      detail::add_ge(r, "t1_lower", detail::pt("N", row.n), ln_count, *lo);
    if (const auto hi = eq1C_upper(row.n, 1)) detail::add_ge(r, "eq1c_upper", detail::pt("N", row.n), *hi, ln_count);
  }
  return r;
}

}  // namespace egyptian
