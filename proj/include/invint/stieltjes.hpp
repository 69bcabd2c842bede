#pragma once

// Riemann-Stieltjes integration by uniformly refined midpoint sums, plus the
// integration-by-parts and change-of-variable identities as checkable
// operations.

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include "invint/error.hpp"
#include "invint/format.hpp"
#include "invint/monotone.hpp"
#include "invint/quad.hpp"

namespace invint {

struct RefinementScheme {
  std::size_t initial_panels = 16;
  std::size_t refinement_factor = 2;
  int max_levels = 24;
  double tol = 1e-8;

  void validate() const {
    if (initial_panels == 0) throw std::invalid_argument("initial_panels must be positive");
    if (refinement_factor < 2) throw std::invalid_argument("refinement_factor must be at least 2");
    if (max_levels <= 0) throw std::invalid_argument("max_levels must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("scheme tolerance must be positive");
  }
};

// How the caller vouches for the integrator's regularity.
enum class Integrator {
  screened,           // must pass a weak-monotonicity screen, else BVRequired
  bounded_variation,  // caller declares BV; total variation is estimated and reported
};

struct RsResult {
  double value = 0.0;
  int level = 0;           // refinement level at which convergence was declared
  std::size_t panels = 0;  // partition size at that level
  std::optional<double> total_variation;  // only for Integrator::bounded_variation
};

enum class Monotonicity { nondecreasing, nonincreasing, neither };

template <RealFunction Phi>
Monotonicity screen_integrator(const Phi& phi, double u, double v, std::size_t grid_size = kDefaultGridSize) {
  if (u == v) return Monotonicity::nondecreasing;
  const IntervalDomain dom(std::min(u, v), std::max(u, v));
  bool up = false;
  bool down = false;
  double prev = detail::sample(phi, dom.a());
  for (double x : dom.grid(grid_size)) {
    const double cur = detail::sample(phi, x);
    up = up || cur > prev;
    down = down || cur < prev;
    prev = cur;
  }
  if (up && down) return Monotonicity::neither;
  return down ? Monotonicity::nonincreasing : Monotonicity::nondecreasing;
}

namespace detail {

struct LevelSum {
  double value;
  double variation;
};

template <RealFunction G, RealFunction Phi>
LevelSum rs_level(const G& g, const Phi& phi, double lo, double hi, std::size_t n) {
  NeumaierSum sum;
  NeumaierSum variation;
  const double width = hi - lo;
  const auto node = [&](std::size_t i) {
    return i == n ? hi : lo + width * (static_cast<double>(i) / static_cast<double>(n));
  };
  double x0 = lo;
  double phi0 = sample(phi, x0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = node(i + 1);
    const double phi1 = sample(phi, x1);
    const double dphi = phi1 - phi0;
    sum.add(sample(g, 0.5 * (x0 + x1)) * dphi);
    variation.add(std::fabs(dphi));
    x0 = x1;
    phi0 = phi1;
  }
  return {sum.value(), variation.value()};
}

}  // namespace detail

// Riemann-Stieltjes integral of g against phi over (u, v): the limit of
// sum g(mid_i) (phi(x_{i+1}) - phi(x_i)) over uniform partitions refined by
// `scheme.refinement_factor`. Returns the first level whose sum is within
// `scheme.tol` of the previous level's. Antisymmetric in (u, v) by sign flip.
template <RealFunction G, RealFunction Phi>
RsResult rs_integral(const G& g, const Phi& phi, double u, double v, const RefinementScheme& scheme = {},
                     Integrator kind = Integrator::screened) {
  scheme.validate();
  if (!std::isfinite(u) || !std::isfinite(v)) throw std::invalid_argument("Stieltjes bounds must be finite");
  if (u == v) return RsResult{0.0, 0, 0, kind == Integrator::bounded_variation ? std::optional<double>(0.0)
                                                                               : std::nullopt};
  if (u > v) {
    RsResult r = rs_integral(g, phi, v, u, scheme, kind);
    r.value = -r.value;
    return r;
  }
  if (kind == Integrator::screened && screen_integrator(phi, u, v) == Monotonicity::neither) {
    throw BVRequired("integrator is not monotone on [" + format_real(u) + ", " + format_real(v) +
                     "]; declare it bounded-variation to integrate anyway");
  }

  std::size_t n = scheme.initial_panels;
  detail::LevelSum prev = detail::rs_level(g, phi, u, v, n);
  for (int level = 1; level <= scheme.max_levels; ++level) {
    n *= scheme.refinement_factor;
    const detail::LevelSum cur = detail::rs_level(g, phi, u, v, n);
    if (std::fabs(cur.value - prev.value) <= scheme.tol) {
      RsResult r{cur.value, level, n, std::nullopt};
      if (kind == Integrator::bounded_variation) r.total_variation = cur.variation;
      return r;
    }
    prev = cur;
  }
  throw NoConvergence("Stieltjes sums on [" + format_real(u) + ", " + format_real(v) + "] did not settle within " +
                      format_real(scheme.tol) + " after " + std::to_string(scheme.max_levels) + " levels");
}

// |int g df + int f dg - (f(x) g(x) - f(alpha) g(alpha))| over (alpha, x).
template <RealFunction G, RealFunction F>
double ibp_residual(const G& g, const F& f, double alpha, double x, const RefinementScheme& scheme = {},
                    Integrator kind = Integrator::screened) {
  if (alpha == x) return 0.0;
  const double g_df = rs_integral(g, f, alpha, x, scheme, kind).value;
  const double f_dg = rs_integral(f, g, alpha, x, scheme, kind).value;
  const double boundary = f(x) * g(x) - f(alpha) * g(alpha);
  return std::fabs(g_df + f_dg - boundary);
}

struct ChangeOfVariablePair {
  double lhs = 0.0;  // integral of f^{-1} over (c, y) by quadrature
  double rhs = 0.0;  // Stieltjes integral of x against f over (f^{-1}(c), f^{-1}(y))
};

inline ChangeOfVariablePair change_of_variable_pair(const MonotoneFunction& f, double c, double y,
                                                    const RefinementScheme& scheme = {},
                                                    double quad_tol = kDefaultQuadTol,
                                                    double invert_tol = kDefaultInvertTol) {
  if (c == y) return {};
  const InverseFunction inverse = inverse_as_function(f, invert_tol);
  const double lhs = integrate(inverse, c, y, quad_tol).value;
  const auto identity = [](double x) { return x; };
  const double rhs = rs_integral(identity, f, inverse(c), inverse(y), scheme).value;
  return {lhs, rhs};
}

}  // namespace invint
