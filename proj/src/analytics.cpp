#include "lrucluster/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace lrucluster {

namespace {

enum class Kernel { Misses, D1, D2, Cumulative };

struct AxisTolerance {
  double rel;
  double abs;
  int depth;
  double tail_mass;
};

AxisTolerance scaled(const QuadratureConfig& q, double factor) {
  return {q.rel_tol * factor, q.abs_tol * factor, q.max_depth, q.tail_mass_cut};
}

// x - (1 - e^-x), stable for small x.
double excess_over_first(double x) {
  if (x < 0.1) {
    double term = x * x / 2.0;
    double sum = 0.0;
    for (int n = 3; n < 14; ++n) {
      sum += term;
      term *= -x / n;
    }
    return sum;
  }
  return x + std::expm1(-x);
}

// sup of rho^k e^{-rho t} over rho >= lo.
double sup_power_exp(int k, double t, double lo) {
  const double at = std::max(lo, k / t);
  return std::exp(k * std::log(at) - at * t);
}

/// E[h(X)] over a mark law. h returns an Integral so inner quadrature errors
/// propagate: their supremum is added to the error since the law has mass 1.
/// Lomax axes use s = log(1 + x / sigma), under which the density is
/// alpha e^{-alpha s}, and stop at the (1 - tail_mass) quantile;
/// tail_bound(cut) must bound the dropped contribution.
template <class H, class TailBound>
Integral expect_mark(const MarkLaw& law, H&& h, const AxisTolerance& tol, TailBound&& tail_bound) {
  if (law.is_point()) return h(law.point_value());
  const LomaxParams& lx = *law.as_lomax();
  const double cut = lx.upper_quantile(tol.tail_mass);
  const double s_cut = std::log1p(cut / lx.sigma());
  double inner_error = 0.0;
  bool inner_converged = true;
  long inner_evals = 0;
  auto integrand = [&](double s) {
    const Integral r = h(lx.sigma() * std::expm1(s));
    inner_error = std::max(inner_error, r.error);
    inner_converged = inner_converged && r.converged;
    inner_evals += r.evaluations;
    return lx.alpha() * std::exp(-lx.alpha() * s) * r.value;
  };
  Integral out = integrate(integrand, 0.0, s_cut, tol.rel, tol.abs, tol.depth);
  out.error += inner_error + tail_bound(cut);
  out.converged = out.converged && inner_converged;
  out.evaluations += inner_evals;
  return out;
}

// E[h(X) 1{X <= x_max}] for a Lomax X, no truncation needed.
template <class H>
Integral lomax_expect_below(const LomaxParams& lx, H&& h, double x_max, const AxisTolerance& tol) {
  const double s_max = std::log1p(x_max / lx.sigma());
  auto integrand = [&](double s) {
    return lx.alpha() * std::exp(-lx.alpha() * s) * h(lx.sigma() * std::expm1(s));
  };
  return integrate(integrand, 0.0, s_max, tol.rel, tol.abs, tol.depth);
}

// ---------------------------------------------------------------- Box model
//
// For fixed rho every kernel is an explicit function of L on L <= t and is
// affine in (L - t) on L > t, so the L > t part of the expectation is exact:
// a P(L > t) + b E[(L - t)^+].

double box_short(Kernel k, double t, double rho, double lifespan) {
  switch (k) {
    case Kernel::Misses:
      return -std::expm1(-rho * lifespan);
    case Kernel::Cumulative:
      return 2.0 / rho * excess_over_first(rho * lifespan) +
             (t - lifespan) * -std::expm1(-rho * lifespan);
    default:
      return 0.0;
  }
}

struct Affine {
  double a;
  double b;
};

Affine box_long(Kernel k, double t, double rho) {
  const double decay = std::exp(-rho * t);
  switch (k) {
    case Kernel::Misses:
      return {-std::expm1(-rho * t), rho * decay};
    case Kernel::D1:
      return {0.0, -rho * rho * decay};
    case Kernel::D2:
      return {rho * rho * decay, rho * rho * rho * decay};
    case Kernel::Cumulative:
      return {2.0 / rho * excess_over_first(rho * t), -std::expm1(-rho * t)};
  }
  return {0.0, 0.0};
}

Integral box_given_rho(Kernel k, double t, double rho, const MarkLaw& lifespan,
                       const AxisTolerance& tol) {
  const Affine tail = box_long(k, t, rho);
  Integral r;
  r.value = tail.a * lifespan.survival(t) + tail.b * lifespan.mean_excess(t);
  if ((k == Kernel::Misses || k == Kernel::Cumulative) && t > 0.0) {
    if (lifespan.is_point()) {
      const double l0 = lifespan.point_value();
      if (l0 <= t) r.value += box_short(k, t, rho, l0);
    } else {
      r += lomax_expect_below(
          *lifespan.as_lomax(), [&](double l) { return box_short(k, t, rho, l); }, t, tol);
    }
  }
  return r;
}

double box_tail_sup(Kernel k, double t, double rho_cut, const MarkLaw& lifespan) {
  const double p = lifespan.survival(t);
  const double x = lifespan.mean_excess(t);
  switch (k) {
    case Kernel::Misses:
      return 1.0 + x * sup_power_exp(1, t, rho_cut);
    case Kernel::D1:
      return x * sup_power_exp(2, t, rho_cut);
    case Kernel::D2:
      return p * sup_power_exp(2, t, rho_cut) + x * sup_power_exp(3, t, rho_cut);
    case Kernel::Cumulative:
      return 3.0 * t + x;
  }
  return 0.0;
}

Integral box_expect(Kernel k, double t, const BoxModelSpec& s, const QuadratureConfig& q) {
  const AxisTolerance outer = scaled(q, 0.5);
  const AxisTolerance inner = scaled(q, 0.1);
  return expect_mark(
      s.rho_law, [&](double rho) { return box_given_rho(k, t, rho, s.lifespan_law, inner); },
      outer, [&](double cut) { return q.tail_mass_cut * box_tail_sup(k, t, cut, s.lifespan_law); });
}

// ------------------------------------------------------------- scale family

Integral scale_kernel(Kernel k, double t, double rho, double lifespan, const ShapeFunction& f,
                      const AxisTolerance& tol) {
  const double c = rho * lifespan;
  const double tau = t / lifespan;
  const double v_end = f.support_end();
  const double overlap_end = std::max(0.0, v_end - tau);
  auto gap_mass = [&](double v) { return f.cumulative(v + tau) - f.cumulative(v); };
  // Pieces between consecutive kinks of f(v) and f(v + tau) are smooth.
  auto run = [&](auto&& g, double a, double b) {
    std::vector<double> cuts;
    for (double node : f.nodes()) {
      if (node > a && node < b) cuts.push_back(node);
      if (node - tau > a && node - tau < b) cuts.push_back(node - tau);
    }
    return integrate_pieces(g, std::move(cuts), a, b, tol.rel, tol.abs, tol.depth);
  };

  switch (k) {
    case Kernel::Misses: {
      if (t == 0.0) return Integral{c, 0.0, 0, true};
      auto g = [&](double v) { return c * f.value(v) * std::exp(-c * gap_mass(v)); };
      return run(g, 0.0, v_end);
    }
    case Kernel::D1: {
      auto g = [&](double v) {
        return f.value(v) * f.value(v + tau) * std::exp(-c * gap_mass(v));
      };
      Integral r = run(g, 0.0, overlap_end);
      const double scale = -c * c / lifespan;
      return Integral{scale * r.value, std::abs(scale) * r.error, r.evaluations, r.converged};
    }
    case Kernel::D2: {
      const double l2 = lifespan * lifespan;
      auto g = [&](double v) {
        const double ahead = f.value(v + tau);
        return f.value(v) * std::exp(-c * gap_mass(v)) *
               (c * c * c / l2 * ahead * ahead - c * c / l2 * f.derivative(v + tau));
      };
      return run(g, 0.0, overlap_end);
    }
    case Kernel::Cumulative: {
      auto window_hit = [&](double v) { return -std::expm1(-c * gap_mass(v)); };
      auto ramp = [&](double v) { return -std::expm1(-c * f.cumulative(v)); };
      Integral r = run(window_hit, 0.0, v_end);
      r += run(ramp, 0.0, std::min(tau, v_end));
      if (tau > v_end) r.value += (tau - v_end) * -std::expm1(-c);
      r.value *= lifespan;
      r.error *= lifespan;
      return r;
    }
  }
  return {};
}

// Beyond a Lomax cut the scale-family kernels grow at most linearly, so the
// dropped part is bounded by |h(cut)| / cut * E[X 1{X > cut}] plus the
// bounded-integrand term tail_mass |h(cut)|.
template <class H>
double linear_tail_bound(const MarkLaw& law, double cut, double tail_mass, H&& h) {
  const auto* lx = law.as_lomax();
  if (lx == nullptr) return 0.0;
  const double at_cut = std::abs(h(cut).value);
  return at_cut * (tail_mass + lx->partial_mean_above(cut) / cut);
}

Integral scale_expect(Kernel k, double t, const ScaleFamilySpec& s, const QuadratureConfig& q) {
  if (k == Kernel::Misses && t == 0.0) return Integral{s.mean_requests(), 0.0, 0, true};
  const AxisTolerance outer = scaled(q, 0.5);
  const AxisTolerance middle = scaled(q, 0.2);
  const AxisTolerance inner = scaled(q, 0.05);
  auto given_rho = [&](double rho) {
    auto given_l = [&](double l) { return scale_kernel(k, t, rho, l, s.shape, inner); };
    return expect_mark(s.lifespan_law, given_l, middle, [&](double cut) {
      return linear_tail_bound(s.lifespan_law, cut, q.tail_mass_cut, given_l);
    });
  };
  return expect_mark(s.rho_law, given_rho, outer, [&](double cut) {
    return linear_tail_bound(s.rho_law, cut, q.tail_mass_cut, given_rho);
  });
}

void require_positive_time(double t, const char* what) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument(std::string(what) + " needs t > 0");
  }
}

void require_nonnegative_time(double t, const char* what) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument(std::string(what) + " needs t >= 0");
  }
}

Integral checked(Integral r, const char* what) {
  require_converged(r, what);
  return r;
}

}  // namespace

double box_ttl_misses(double t, double rho, double lifespan) {
  require_nonnegative_time(t, "box_ttl_misses");
  if (!(rho > 0.0) || !(lifespan > 0.0)) {
    throw std::invalid_argument("box_ttl_misses needs rho > 0 and lifespan > 0");
  }
  if (lifespan <= t) return box_short(Kernel::Misses, t, rho, lifespan);
  const Affine tail = box_long(Kernel::Misses, t, rho);
  return tail.a + tail.b * (lifespan - t);
}

Integral ttl_misses(double t, const BoxModelSpec& spec, const QuadratureConfig& q) {
  require_nonnegative_time(t, "ttl_misses");
  q.validate();
  if (t == 0.0) return Integral{spec.mean_requests(), 0.0, 0, true};
  return checked(box_expect(Kernel::Misses, t, spec, q), "ttl_misses");
}

Integral ttl_misses_d1(double t, const BoxModelSpec& spec, const QuadratureConfig& q) {
  require_positive_time(t, "ttl_misses_d1");
  q.validate();
  return checked(box_expect(Kernel::D1, t, spec, q), "ttl_misses_d1");
}

Integral ttl_misses_d2(double t, const BoxModelSpec& spec, const QuadratureConfig& q) {
  require_positive_time(t, "ttl_misses_d2");
  q.validate();
  return checked(box_expect(Kernel::D2, t, spec, q), "ttl_misses_d2");
}

Integral cumulative_ttl_misses(double t, const BoxModelSpec& spec, const QuadratureConfig& q) {
  require_nonnegative_time(t, "cumulative_ttl_misses");
  q.validate();
  if (t == 0.0) return {};
  return checked(box_expect(Kernel::Cumulative, t, spec, q), "cumulative_ttl_misses");
}

Integral single_miss_floor(const BoxModelSpec& spec, const QuadratureConfig& q) {
  q.validate();
  const AxisTolerance outer = scaled(q, 0.5);
  const AxisTolerance inner = scaled(q, 0.1);
  auto given_rho = [&](double rho) {
    return expect_mark(
        spec.lifespan_law,
        [&](double l) { return Integral{-std::expm1(-rho * l), 0.0, 1, true}; }, inner,
        [&](double) { return q.tail_mass_cut; });
  };
  return checked(expect_mark(spec.rho_law, given_rho, outer,
                             [&](double) { return q.tail_mass_cut; }),
                 "single_miss_floor");
}

// ------------------------------------------------------------------ MissModel

MissModel::MissModel(BoxModelSpec spec, QuadratureConfig q) : spec_(std::move(spec)), q_(q) {
  q_.validate();
}

MissModel::MissModel(ScaleFamilySpec spec, QuadratureConfig q) : spec_(std::move(spec)), q_(q) {
  q_.validate();
}

MissModel MissModel::from_intensity(const CanonicalIntensity& model, QuadratureConfig q) {
  model.validate();
  if (model.kind == IntensityKind::Box) {
    return MissModel(BoxModelSpec{model.rho_law, model.lifespan_law}, q);
  }
  return MissModel(ScaleFamilySpec{model.rho_law, model.lifespan_law, *model.shape}, q);
}

namespace {

template <class Spec>
Integral dispatch(Kernel k, double t, const Spec& s, const QuadratureConfig& q) {
  if constexpr (std::is_same_v<Spec, BoxModelSpec>) {
    return box_expect(k, t, s, q);
  } else {
    return scale_expect(k, t, s, q);
  }
}

}  // namespace

Integral MissModel::m(double t) const {
  require_nonnegative_time(t, "m");
  if (t == 0.0) return Integral{mean_requests(), 0.0, 0, true};
  return checked(std::visit([&](const auto& s) { return dispatch(Kernel::Misses, t, s, q_); }, spec_),
                 "m");
}

Integral MissModel::m_d1(double t) const {
  require_positive_time(t, "m'");
  return checked(std::visit([&](const auto& s) { return dispatch(Kernel::D1, t, s, q_); }, spec_),
                 "m'");
}

Integral MissModel::m_d2(double t) const {
  require_positive_time(t, "m''");
  return checked(std::visit([&](const auto& s) { return dispatch(Kernel::D2, t, s, q_); }, spec_),
                 "m''");
}

Integral MissModel::cumulative(double t) const {
  require_nonnegative_time(t, "M");
  if (t == 0.0) return {};
  return checked(
      std::visit([&](const auto& s) { return dispatch(Kernel::Cumulative, t, s, q_); }, spec_),
      "M");
}

Integral MissModel::floor_mu0() const {
  if (const auto* box = std::get_if<BoxModelSpec>(&spec_)) return single_miss_floor(*box, q_);
  const auto& s = std::get<ScaleFamilySpec>(spec_);
  return single_miss_floor(BoxModelSpec{s.rho_law, s.lifespan_law}, q_);
}

double MissModel::mean_requests() const noexcept {
  return std::visit([](const auto& s) { return s.mean_requests(); }, spec_);
}

// --------------------------------------------------------- derived estimates

double characteristic_time(double theta, const MissModel& model) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw std::invalid_argument("characteristic_time needs theta > 0");
  }
  const auto& q = model.quadrature();
  const double tol = std::max(q.abs_tol, q.rel_tol * theta);
  return solve_increasing([&](double t) { return model.cumulative(t).value; }, theta,
                          theta / model.mean_requests(), tol);
}

double first_order_term(double t_theta, double theta, const MissModel& model) {
  require_positive_time(t_theta, "first_order_term");
  const double m0 = model.m(t_theta).value;
  const double m1 = model.m_d1(t_theta).value;
  const double m2 = model.m_d2(t_theta).value;
  return theta * theta / (2.0 * m0 * m0) * (m2 - m1 * m1 / m0);
}

namespace {

double clamp_unit(double x, bool& clamped) {
  const double y = std::clamp(x, 0.0, 1.0);
  clamped = (y != x);
  return y;
}

}  // namespace

HitRatioEstimates hit_ratio_estimates(double theta, std::size_t capacity, const MissModel& model) {
  if (capacity == 0) throw std::invalid_argument("capacity must be >= 1");
  const double t_theta = characteristic_time(theta, model);
  const double m_char = model.m(t_theta).value;
  const double e = first_order_term(t_theta, theta, model);
  const double requests = model.mean_requests();
  HitRatioEstimates out;
  out.zero_order = clamp_unit(1.0 - m_char / requests, out.zero_clamped);
  out.first_order =
      clamp_unit(1.0 - (m_char + e / static_cast<double>(capacity)) / requests, out.first_clamped);
  return out;
}

Integral expected_lru_misses(std::size_t capacity, double gamma, const MissModel& model) {
  if (capacity == 0) throw std::invalid_argument("capacity must be >= 1");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  const auto& q = model.quadrature();
  const double shape = static_cast<double>(capacity);
  const double eps = q.tail_mass_cut;
  const double x_lo = boost::math::gamma_p_inv(shape, eps);
  const double x_hi = boost::math::gamma_q_inv(shape, eps);
  const double t_lo = characteristic_time(x_lo / gamma, model);
  const double t_hi = characteristic_time(x_hi / gamma, model);

  // Substituting x = gamma M(t) turns E[m(M^{-1}(G / gamma))] into
  // the integral of m(t)^2 gamma p_C(gamma M(t)) dt: no inversion per node.
  double inner_error = 0.0;
  auto integrand = [&](double t) {
    const Integral mt = model.m(t);
    const Integral cum = model.cumulative(t);
    inner_error = std::max(inner_error, mt.error);
    return mt.value * mt.value * gamma *
           boost::math::gamma_p_derivative(shape, gamma * cum.value);
  };
  Integral out = integrate(integrand, t_lo, t_hi, q.rel_tol * 0.5, q.abs_tol * 0.5, q.max_depth);
  out.error += inner_error + 2.0 * eps * model.mean_requests();
  return checked(out, "expected_lru_misses");
}

Estimate estimate(const MissModel& model, double gamma, std::size_t capacity, bool with_exact) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (capacity == 0) throw std::invalid_argument("capacity must be >= 1");
  Estimate est;
  est.gamma = gamma;
  est.capacity = capacity;
  est.theta = static_cast<double>(capacity) / gamma;
  est.char_time = characteristic_time(est.theta, model);
  est.m_at_char = model.m(est.char_time).value;
  est.e_term = first_order_term(est.char_time, est.theta, model);
  const double requests = model.mean_requests();
  bool zc = false;
  bool fc = false;
  est.zero_order_hit = clamp_unit(1.0 - est.m_at_char / requests, zc);
  est.first_order_hit = clamp_unit(
      1.0 - (est.m_at_char + est.e_term / static_cast<double>(capacity)) / requests, fc);
  est.clamped = zc || fc;
  if (with_exact) {
    est.exact_expected_misses = expected_lru_misses(capacity, gamma, model).value;
    bool ec = false;
    est.exact_hit = clamp_unit(1.0 - *est.exact_expected_misses / requests, ec);
    est.clamped = est.clamped || ec;
  }
  return est;
}

}  // namespace lrucluster
