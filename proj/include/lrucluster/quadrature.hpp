#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrucluster {

/// Tolerances shared by every deterministic expectation in the analytics.
struct QuadratureConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  /// Maximum number of bisections one adaptive integration may perform.
  int max_depth = 400;
  /// Probability mass cut from the upper tail of every Lomax axis.
  double tail_mass_cut = 1e-9;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

inline void QuadratureConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
    throw std::invalid_argument("quadrature tolerances must be positive");
  }
  if (max_depth < 1) throw std::invalid_argument("quadrature max_depth must be >= 1");
  if (!(tail_mass_cut > 0.0 && tail_mass_cut < 1e-6)) {
    throw std::invalid_argument("tail_mass_cut must lie in (0, 1e-6)");
  }
}

/// A numerically computed value and a bound on its error. `converged` is
/// false when the adaptive rule ran out of subdivisions first; `error` then
/// holds the achieved (not requested) accuracy.
struct Integral {
  double value = 0.0;
  double error = 0.0;
  long evaluations = 0;
  bool converged = true;

  Integral& operator+=(const Integral& other) noexcept {
    value += other.value;
    error += other.error;
    evaluations += other.evaluations;
    converged = converged && other.converged;
    return *this;
  }
  friend Integral operator+(Integral a, const Integral& b) noexcept { return a += b; }
};

/// Raised by public analytics operations when a quadrature could not meet
/// its tolerance.
class ToleranceNotMet : public std::runtime_error {
 public:
  ToleranceNotMet(const std::string& what, double value, double achieved_error)
      : std::runtime_error(what + " (value " + std::to_string(value) + ", achieved error " +
                           std::to_string(achieved_error) + ")"),
        value_(value),
        achieved_error_(achieved_error) {}

  double value() const noexcept { return value_; }
  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double value_;
  double achieved_error_;
};

inline double require_converged(const Integral& r, const char* what) {
  if (!r.converged) throw ToleranceNotMet(what, r.value, r.error);
  return r.value;
}

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const noexcept { return error < o.error; }
};

template <class F>
Panel gauss_kronrod15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, 7> f1{};
  std::array<double, 7> f2{};
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  double abs_k = std::abs(kronrod);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    kronrod += kKronrodWeights[j] * (f1[j] + f2[j]);
    abs_k += kKronrodWeights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1[j] + f2[j]);
  }
  // QUADPACK qk15 error heuristic.
  const double mean = 0.5 * kronrod;
  double asc = kKronrodWeights[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    asc += kKronrodWeights[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }
  kronrod *= half;
  gauss *= half;
  asc *= std::abs(half);
  abs_k *= std::abs(half);
  double err = std::abs(kronrod - gauss);
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (abs_k > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(err, 50.0 * eps * abs_k);
  }
  return {a, b, kronrod, err};
}

}  // namespace detail

namespace detail {

// Globally adaptive refinement over the panels delimited by `edges`
// (sorted, distinct): the panel with the largest error estimate is bisected
// until the summed error is below max(abs_tol, rel_tol |I|).
template <class F>
Integral adapt(F& f, const std::vector<double>& edges, double rel_tol, double abs_tol,
               int max_bisections) {
  Integral out;
  std::vector<Panel> panels;
  panels.reserve(edges.size() + 2 * static_cast<std::size_t>(std::max(max_bisections, 0)));
  double value = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    panels.push_back(gauss_kronrod15(f, edges[i], edges[i + 1]));
    value += panels.back().value;
    error += panels.back().error;
  }
  out.evaluations = 15 * static_cast<long>(panels.size());
  std::make_heap(panels.begin(), panels.end());
  int bisections = 0;
  while (!panels.empty() && error > std::max(abs_tol, rel_tol * std::abs(value))) {
    if (bisections >= max_bisections) {
      out.converged = false;
      break;
    }
    std::pop_heap(panels.begin(), panels.end());
    const Panel worst = panels.back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      out.converged = false;  // panel narrower than machine resolution
      break;
    }
    const Panel left = gauss_kronrod15(f, worst.a, mid);
    const Panel right = gauss_kronrod15(f, mid, worst.b);
    panels.back() = left;
    std::push_heap(panels.begin(), panels.end());
    panels.push_back(right);
    std::push_heap(panels.begin(), panels.end());
    out.evaluations += 30;
    ++bisections;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    // Re-sum occasionally so round-off in the running totals cannot stall the loop.
    if (bisections % 64 == 0) {
      value = 0.0;
      error = 0.0;
      for (const Panel& p : panels) {
        value += p.value;
        error += p.error;
      }
    }
  }
  out.value = value;
  out.error = error;
  return out;
}

}  // namespace detail

/// Globally adaptive 15-point Gauss-Kronrod integration of f over [a, b].
/// The panel with the largest error estimate is bisected until the summed
/// error is below max(abs_tol, rel_tol |I|) or `max_bisections` is spent.
template <class F>
Integral integrate(F&& f, double a, double b, double rel_tol, double abs_tol,
                   int max_bisections) {
  if (!(b > a)) return Integral{};
  return detail::adapt(f, {a, b}, rel_tol, abs_tol, max_bisections);
}

template <class F>
Integral integrate(F&& f, double a, double b, const QuadratureConfig& q) {
  return integrate(std::forward<F>(f), a, b, q.rel_tol, q.abs_tol, q.max_depth);
}

/// Integrates over [a, b] with the given interior breakpoints as initial
/// panel edges; refinement and the tolerance apply to the whole interval.
template <class F>
Integral integrate_pieces(F&& f, std::vector<double> cuts, double a, double b,
                          double rel_tol, double abs_tol, int max_bisections) {
  if (!(b > a)) return Integral{};
  std::erase_if(cuts, [&](double c) { return !(c > a && c < b); });
  cuts.push_back(a);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return detail::adapt(f, cuts, rel_tol, abs_tol, max_bisections);
}

/// Solves g(t) = target for a non-decreasing g on [0, inf). The bracket is
/// grown by doubling from `t_guess`; bisection and secant (Illinois) steps
/// then run until |g(t) - target| <= value_tol.
template <class G>
double solve_increasing(G&& g, double target, double t_guess, double value_tol,
                        int max_doublings = 200, int max_iterations = 300) {
  double lo = 0.0;
  double g_lo = g(lo);
  if (std::abs(g_lo - target) <= value_tol) return lo;
  if (g_lo > target) throw std::domain_error("solve_increasing: target below g(0)");
  double hi = t_guess > 0.0 ? t_guess : 1.0;
  double g_hi = g(hi);
  int doublings = 0;
  while (g_hi < target) {
    if (++doublings > max_doublings) {
      throw std::runtime_error("solve_increasing: bracket expansion exhausted");
    }
    lo = hi;
    g_lo = g_hi;
    hi *= 2.0;
    g_hi = g(hi);
  }
  double f_lo = g_lo - target;
  double f_hi = g_hi - target;
  if (std::abs(f_hi) <= value_tol) return hi;
  if (std::abs(f_lo) <= value_tol) return lo;
  // f_lo / f_hi are secant weights; the Illinois rule halves the stale one.
  int side = 0;
  for (int it = 0; it < max_iterations; ++it) {
    double t = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
    // Fall back to bisection when the secant point is degenerate or every
    // third step, which keeps the bracket shrinking geometrically.
    if (!(t > lo && t < hi) || it % 3 == 2) t = 0.5 * (lo + hi);
    if (!(t > lo && t < hi)) return t;
    const double f_t = g(t) - target;
    if (std::abs(f_t) <= value_tol) return t;
    if (f_t < 0.0) {
      lo = t;
      f_lo = f_t;
      if (side == -1) f_hi *= 0.5;
      side = -1;
    } else {
      hi = t;
      f_hi = f_t;
      if (side == +1) f_lo *= 0.5;
      side = +1;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace lrucluster
