#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature used as the reference integrator,
// and antiderivatives anchored to vanish at a chosen point.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "invint/error.hpp"
#include "invint/expr.hpp"
#include "invint/format.hpp"
#include "invint/monotone.hpp"

namespace invint {

template <class F>
concept RealFunction = std::regular_invocable<const F&, double> &&
                       std::convertible_to<std::invoke_result_t<const F&, double>, double>;

inline constexpr double kDefaultQuadTol = 1e-10;
inline constexpr int kMaxSubdivisionDepth = 60;
inline constexpr std::size_t kMaxPanels = std::size_t{1} << 18;

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;  // absolute
  std::size_t evaluations = 0;
};

namespace detail {

// Kronrod abscissae on [0, 1) descending; odd indices are the Gauss nodes.
inline constexpr std::array<double, 8> kXgk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelEstimate {
  double value;
  double error;
  bool roundoff_limited;
};

template <RealFunction G>
double sample(const G& g, double x) {
  const double y = static_cast<double>(g(x));
  if (!std::isfinite(y)) throw DomainError("integrand is not finite at x=" + format_real(x));
  return y;
}

// One 15-point Kronrod panel with the embedded 7-point Gauss estimate. Error
// scaling follows QUADPACK's qk15.
template <RealFunction G>
PanelEstimate gk15(const G& g, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = sample(g, center);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  double resabs = std::fabs(resk);
  std::array<double, 7> f1{};
  std::array<double, 7> f2{};
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = sample(g, center - dx);
    f2[j] = sample(g, center + dx);
    const double sum = f1[j] + f2[j];
    resk += kWgk[j] * sum;
    resabs += kWgk[j] * (std::fabs(f1[j]) + std::fabs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * sum;
  }
  const double mean = resk * 0.5;
  double resasc = kWgk[7] * std::fabs(fc - mean);
  for (std::size_t j = 0; j < 7; ++j) resasc += kWgk[j] * (std::fabs(f1[j] - mean) + std::fabs(f2[j] - mean));

  const double scale = std::fabs(half);
  resk *= half;
  resg *= half;
  resabs *= scale;
  resasc *= scale;

  const double diff = std::fabs(resk - resg);
  double err = diff;
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
  if (resabs > std::numeric_limits<double>::min() / (50.0 * std::numeric_limits<double>::epsilon())) {
    err = std::max(roundoff, err);
  }
  return {resk, err, diff <= roundoff};
}

// Compensated running sum.
struct NeumaierSum {
  double sum = 0.0;
  double compensation = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) {
      compensation += (sum - t) + x;
    } else {
      compensation += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + compensation; }
};

}  // namespace detail

// Oriented integral of g over (u, v), globally adaptive: the panel with the
// largest error estimate is bisected until the summed estimate is within
// `tol` (absolute). Roundoff-limited panels are frozen. integrate(g, v, u) is
// the exact negation of integrate(g, u, v).
template <RealFunction G>
QuadratureResult integrate(const G& g, double u, double v, double tol = kDefaultQuadTol) {
  if (!(tol > 0.0)) throw std::invalid_argument("quadrature tolerance must be positive");
  if (!std::isfinite(u) || !std::isfinite(v)) throw std::invalid_argument("integration bounds must be finite");
  if (u == v) return {};
  if (u > v) {
    QuadratureResult r = integrate(g, v, u, tol);
    r.value = -r.value;
    return r;
  }

  struct Panel {
    double lo;
    double hi;
    int depth;
    detail::PanelEstimate est;
    bool operator<(const Panel& other) const { return est.error < other.est.error; }
  };
  std::priority_queue<Panel> open;
  std::vector<Panel> frozen;
  double open_error = 0.0;
  double frozen_error = 0.0;
  std::size_t evaluations = 0;

  const auto push = [&](double lo, double hi, int depth) {
    const Panel p{lo, hi, depth, detail::gk15(g, lo, hi)};
    evaluations += 15;
    const double mid = 0.5 * (lo + hi);
    if (p.est.roundoff_limited || p.est.error == 0.0 || !(mid > lo && mid < hi)) {
      frozen_error += p.est.error;
      frozen.push_back(p);
    } else {
      open_error += p.est.error;
      open.push(p);
    }
  };

  push(u, v, 0);
  while (!open.empty() && open_error + frozen_error > tol) {
    const Panel p = open.top();
    open.pop();
    open_error -= p.est.error;
    const double mid = 0.5 * (p.lo + p.hi);
    const double scale = std::max(std::fabs(p.lo), std::fabs(p.hi));
    const bool unresolvable = p.hi - p.lo <= 1024.0 * std::numeric_limits<double>::epsilon() * scale;
    if (p.depth >= kMaxSubdivisionDepth || unresolvable || evaluations / 15 >= kMaxPanels) {
      throw MaxSubdivision("adaptive quadrature on [" + format_real(u) + ", " + format_real(v) +
                           "] exceeded subdivision limit near x=" + format_real(mid));
    }
    push(p.lo, mid, p.depth + 1);
    push(mid, p.hi, p.depth + 1);
    if (open.empty()) open_error = 0.0;
  }

  std::vector<Panel> all = std::move(frozen);
  for (; !open.empty(); open.pop()) all.push_back(open.top());
  std::sort(all.begin(), all.end(), [](const Panel& a, const Panel& b) { return a.lo < b.lo; });
  detail::NeumaierSum value;
  detail::NeumaierSum error;
  for (const Panel& p : all) {
    value.add(p.est.value);
    error.add(p.est.error);
  }
  return {value.value(), error.value(), evaluations};
}

// Antiderivative F of some f, normalised so that F(anchor) = 0.
//
// Exact: a user expression, shifted by its value at the anchor.
// Numeric: F(x) = integral of f from the anchor to x by adaptive quadrature.
class Antiderivative {
 public:
  static Antiderivative numeric(Expression integrand, double anchor) {
    return Antiderivative(std::move(integrand), anchor, false, 0.0);
  }

  // Trusts `F` without checking it against any f.
  static Antiderivative exact(Expression F, double anchor) {
    const double offset = F(anchor);
    return Antiderivative(std::move(F), anchor, true, offset);
  }

  // Accepts `F` only if its central difference matches f within 1e-6
  // relative on a spot-check grid of `domain`.
  static Antiderivative exact_checked(Expression F, const Expression& f, const IntervalDomain& domain,
                                      double anchor, std::size_t spot_points = 17) {
    const double h = 1e-5 * domain.width();
    for (std::size_t i = 1; i <= spot_points; ++i) {
      const double x = domain.a() + domain.width() * (static_cast<double>(i) / static_cast<double>(spot_points + 1));
      const double fd = (F(x + h) - F(x - h)) / (2.0 * h);
      const double fx = f(x);
      if (std::fabs(fd - fx) > 1e-6 * (1.0 + std::fabs(fx))) {
        throw InvalidAntiderivative("F' does not match f at x=" + format_real(x) + ": finite difference " +
                                    format_real(fd) + " vs f(x)=" + format_real(fx));
      }
    }
    return exact(std::move(F), anchor);
  }

  bool is_exact() const noexcept { return exact_; }
  double anchor() const noexcept { return anchor_; }
  // The exact F, or the integrand f in the numeric case.
  const Expression& expression() const noexcept { return expr_; }

  double at(double x, double tol = kDefaultQuadTol) const {
    if (exact_) return x == anchor_ ? 0.0 : expr_(x) - offset_;
    return integrate(expr_, anchor_, x, tol).value;
  }

 private:
  Antiderivative(Expression e, double anchor, bool exact, double offset)
      : expr_(std::move(e)), anchor_(anchor), exact_(exact), offset_(offset) {}

  Expression expr_;
  double anchor_;
  bool exact_;
  double offset_;
};

inline double antiderivative_at(const Antiderivative& F, double x, double tol = kDefaultQuadTol) {
  return F.at(x, tol);
}

}  // namespace invint
