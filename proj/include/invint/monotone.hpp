#pragma once

// Continuous strictly monotone functions on a finite closed interval, with
// direction detection, codomain, and bracketed numerical inversion.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "invint/error.hpp"
#include "invint/expr.hpp"
#include "invint/format.hpp"

namespace invint {

inline constexpr std::size_t kDefaultGridSize = 1024;
inline constexpr double kDefaultInvertTol = 1e-12;
inline constexpr int kInvertIterationCap = 200;

// Finite closed interval [a, b] with a < b.
class IntervalDomain {
 public:
  IntervalDomain(double a, double b) : a_(a), b_(b) {
    if (!std::isfinite(a) || !std::isfinite(b)) throw std::invalid_argument("interval endpoints must be finite");
    if (!(a < b)) {
      throw std::invalid_argument("interval requires a < b, got [" + format_real(a) + ", " + format_real(b) + "]");
    }
  }

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double width() const noexcept { return b_ - a_; }
  bool contains(double x) const noexcept { return a_ <= x && x <= b_; }

  // Equispaced grid of n >= 2 points including both endpoints exactly.
  std::vector<double> grid(std::size_t n) const {
    if (n < 2) throw std::invalid_argument("grid needs at least two points");
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = a_ + (b_ - a_) * (static_cast<double>(i) / static_cast<double>(n - 1));
    }
    xs.back() = b_;
    return xs;
  }

 private:
  double a_;
  double b_;
};

struct Codomain {
  double c;  // min(f(a), f(b))
  double d;  // max(f(a), f(b))
};

// What the monotonicity screen looked at. Sampling cannot prove
// monotonicity, so a passing screen only means "screened, not proven".
struct ScreeningSummary {
  std::size_t grid_size = 0;
  bool derivative_screened = false;
  std::size_t derivative_points = 0;  // grid points where f' evaluated finitely

  std::string describe() const {
    std::string s = "screened on " + std::to_string(grid_size) + " grid points";
    if (derivative_screened) {
      s += ", derivative sign checked at " + std::to_string(derivative_points) + " points";
    }
    return s + " (screened, not proven)";
  }
};

class MonotoneFunction {
 public:
  // Detects direction and codomain of `body` on `domain`, screening strict
  // monotonicity on `grid_size` equispaced points and, when the symbolic
  // derivative is available, its sign on the same grid.
  static MonotoneFunction build(Expression body, IntervalDomain domain, std::size_t grid_size = kDefaultGridSize) {
    if (body.variables().size() > 1) throw std::invalid_argument("monotone function must be univariate");
    const std::vector<double> xs = domain.grid(grid_size);
    std::vector<double> ys(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = body(xs[i]);

    const double fa = ys.front();
    const double fb = ys.back();
    auto sign = [](double v) { return (v > 0.0) - (v < 0.0); };

    for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
      const int before = sign(ys[i] - ys[i - 1]);
      const int after = sign(ys[i + 1] - ys[i]);
      if (before != after || before == 0) {
        throw NonMonotone(xs[i - 1], xs[i + 1],
                          "f is not strictly monotone: ordering changes between x1=" + format_real(xs[i - 1]) +
                              " and x2=" + format_real(xs[i + 1]) + " (f(x1)=" + format_real(ys[i - 1]) +
                              ", f(mid)=" + format_real(ys[i]) + ", f(x2)=" + format_real(ys[i + 1]) + ")");
      }
    }
    if (fa == fb) {
      throw NonMonotone(domain.a(), domain.b(), "f is not strictly monotone: f(a) == f(b)");
    }
    const int direction = fa < fb ? 1 : -1;

    ScreeningSummary screening{xs.size(), false, 0};
    if (!body.variables().empty()) {
      const Expression derivative = differentiate(body, body.variables().front());
      std::vector<double> ds;
      ds.reserve(xs.size());
      std::vector<double> at;
      at.reserve(xs.size());
      for (double x : xs) {
        try {
          ds.push_back(derivative(x));
          at.push_back(x);
        } catch (const DomainError&) {
          // derivative undefined here (e.g. sqrt at 0); nothing to screen
        }
      }
      double scale = 0.0;
      for (double d : ds) scale = std::max(scale, std::fabs(d));
      const double slack = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + scale);
      for (std::size_t i = 0; i < ds.size(); ++i) {
        if (direction * ds[i] < -slack) {
          const double h = domain.width() / static_cast<double>(xs.size() - 1);
          throw NonMonotone(std::max(domain.a(), at[i] - h), std::min(domain.b(), at[i] + h),
                            "f' has the wrong sign at x=" + format_real(at[i]) + " (f'=" + format_real(ds[i]) +
                                ")");
        }
      }
      screening.derivative_screened = true;
      screening.derivative_points = ds.size();
    }

    return MonotoneFunction(std::move(body), domain, direction, Codomain{std::min(fa, fb), std::max(fa, fb)},
                            screening);
  }

  double operator()(double x) const { return body_(x); }

  const Expression& body() const noexcept { return body_; }
  const IntervalDomain& domain() const noexcept { return domain_; }
  int direction() const noexcept { return direction_; }
  const Codomain& codomain() const noexcept { return codomain_; }
  const ScreeningSummary& screening() const noexcept { return screening_; }

  // Domain endpoint mapped to the lower codomain endpoint c.
  double preimage_of_lower() const noexcept { return direction_ > 0 ? domain_.a() : domain_.b(); }
  // Domain endpoint mapped to the upper codomain endpoint d.
  double preimage_of_upper() const noexcept { return direction_ > 0 ? domain_.b() : domain_.a(); }

 private:
  MonotoneFunction(Expression body, IntervalDomain domain, int direction, Codomain codomain,
                   ScreeningSummary screening)
      : body_(std::move(body)),
        domain_(domain),
        direction_(direction),
        codomain_(codomain),
        screening_(screening) {}

  Expression body_;
  IntervalDomain domain_;
  int direction_;
  Codomain codomain_;
  ScreeningSummary screening_;
};

inline MonotoneFunction build(Expression body, IntervalDomain domain, std::size_t grid_size = kDefaultGridSize) {
  return MonotoneFunction::build(std::move(body), domain, grid_size);
}

// Solves f(x) = y for x in [a, b] with |f(x) - y| <= tol (1 + |y|).
//
// The bracket [a, b] is valid because f is monotone and y lies in [c, d].
// Steps are Illinois false position, falling back to bisection whenever a
// step fails to halve the bracket; every iterate stays inside the bracket.
inline double invert(const MonotoneFunction& f, double y, double tol = kDefaultInvertTol) {
  if (!(tol > 0.0)) throw std::invalid_argument("inversion tolerance must be positive");
  const auto [c, d] = f.codomain();
  const double slack = tol * (1.0 + std::max(std::fabs(c), std::fabs(d)));
  if (!(y >= c - slack && y <= d + slack)) {
    throw OutOfCodomain("y=" + format_real(y) + " is outside the codomain [" + format_real(c) + ", " +
                        format_real(d) + "]");
  }
  if (y <= c) return f.preimage_of_lower();
  if (y >= d) return f.preimage_of_upper();

  const double target_residual = tol * (1.0 + std::fabs(y));
  const int eps = f.direction();
  // g(x) = eps (f(x) - y) is increasing, g(a) < 0 < g(b).
  double lo = f.domain().a();
  double hi = f.domain().b();
  double glo = eps * (f(lo) - y);
  double ghi = eps * (f(hi) - y);
  int retained = 0;  // -1: lo kept twice in a row, +1: hi kept twice
  bool bisect_next = false;
  double best_x = std::fabs(glo) < std::fabs(ghi) ? lo : hi;
  double best_g = std::min(std::fabs(glo), std::fabs(ghi));

  for (int iter = 0; iter < kInvertIterationCap; ++iter) {
    const double width = hi - lo;
    double x = lo + 0.5 * width;
    if (!bisect_next && ghi != glo) {
      const double secant = lo - glo * width / (ghi - glo);
      if (secant > lo && secant < hi) x = secant;
    }
    if (!(x > lo && x < hi)) break;  // bracket collapsed to adjacent doubles

    const double gx = eps * (f(x) - y);
    if (std::fabs(gx) < best_g) {
      best_g = std::fabs(gx);
      best_x = x;
    }
    if (std::fabs(gx) <= target_residual) return x;

    if (gx < 0.0) {
      lo = x;
      glo = gx;
      if (retained == 1) ghi *= 0.5;
      retained = 1;
    } else {
      hi = x;
      ghi = gx;
      if (retained == -1) glo *= 0.5;
      retained = -1;
    }
    bisect_next = !bisect_next && (hi - lo) > 0.5 * width;
  }
  if (best_g <= target_residual) return best_x;
  throw NoConvergence("inversion of f at y=" + format_real(y) + " did not reach residual " +
                      format_real(target_residual) + " (best " + format_real(best_g) + ")");
}

// f^{-1} as an evaluator on [c, d]. The direction is measured from the
// inverse's own endpoint values, not copied from f.
class InverseFunction {
 public:
  InverseFunction(MonotoneFunction f, double tol) : f_(std::move(f)), tol_(tol) {
    const auto [c, d] = f_.codomain();
    const double at_c = invert(f_, c, tol_);
    const double at_d = invert(f_, d, tol_);
    direction_ = at_c < at_d ? 1 : -1;
  }

  double operator()(double y) const { return invert(f_, y, tol_); }

  const MonotoneFunction& forward() const noexcept { return f_; }
  double tol() const noexcept { return tol_; }
  int direction() const noexcept { return direction_; }
  IntervalDomain domain() const { return IntervalDomain(f_.codomain().c, f_.codomain().d); }

 private:
  MonotoneFunction f_;
  double tol_;
  int direction_ = 1;
};

inline InverseFunction inverse_as_function(const MonotoneFunction& f, double tol = kDefaultInvertTol) {
  return InverseFunction(f, tol);
}

}  // namespace invint
