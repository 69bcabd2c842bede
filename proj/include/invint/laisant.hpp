#pragma once

// Antiderivatives and definite integrals of inverse functions by the closed
// form G(y) = y f^{-1}(y) - F(f^{-1}(y)), never inverting f symbolically, and
// cross-checks of that form against quadrature, the Fubini region identity
// and the Stieltjes change of variable.

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "invint/error.hpp"
#include "invint/expr.hpp"
#include "invint/monotone.hpp"
#include "invint/quad.hpp"
#include "invint/stieltjes.hpp"

namespace invint {

struct Tolerances {
  double invert = kDefaultInvertTol;
  double quad = kDefaultQuadTol;
  RefinementScheme scheme{};
  double verify_rel = 1e-6;  // residual threshold, relative: tol (1 + |reference|)
  std::size_t grid = kDefaultGridSize;
};

// G(y) for f^{-1}, with F anchored at alpha = f^{-1}(c), c the lower codomain
// endpoint. Since F(alpha) = 0 the additive constant is pinned by
// G(c) = c alpha.
class InverseAntiderivative {
 public:
  static constexpr const char* kConstantConvention = "F(alpha) = 0, G(c) = c*f^-1(c)";

  // F obtained by quadrature of f from alpha.
  explicit InverseAntiderivative(MonotoneFunction f, double invert_tol = kDefaultInvertTol)
      : f_(std::move(f)),
        F_(Antiderivative::numeric(f_.body(), f_.preimage_of_lower())),
        invert_tol_(invert_tol) {}

  // F given in closed form; checked against f unless `check` is false.
  InverseAntiderivative(MonotoneFunction f, const Expression& exact_F, bool check = true,
                        double invert_tol = kDefaultInvertTol)
      : f_(std::move(f)),
        F_(check ? Antiderivative::exact_checked(exact_F, f_.body(), f_.domain(), f_.preimage_of_lower())
                 : Antiderivative::exact(exact_F, f_.preimage_of_lower())),
        invert_tol_(invert_tol) {}

  const MonotoneFunction& f() const noexcept { return f_; }
  const Antiderivative& F() const noexcept { return F_; }
  double anchor() const noexcept { return F_.anchor(); }
  double lower() const noexcept { return f_.codomain().c; }
  double invert_tol() const noexcept { return invert_tol_; }

  double operator()(double y, double quad_tol = kDefaultQuadTol) const {
    const double x = invert(f_, y, invert_tol_);
    return y * x - F_.at(x, quad_tol);
  }

 private:
  MonotoneFunction f_;
  Antiderivative F_;
  double invert_tol_;
};

// G(y) = y f^{-1}(y) - F(f^{-1}(y)) under the recorded constant convention.
inline double inverse_antiderivative(const InverseAntiderivative& ia, double y, double tol = kDefaultQuadTol) {
  return ia(y, tol);
}

// Integral of f^{-1} over (y1, y2) as G(y2) - G(y1).
inline double definite_inverse_integral(const InverseAntiderivative& ia, double y1, double y2,
                                        double tol = kDefaultQuadTol) {
  if (y1 == y2) return 0.0;
  return ia(y2, tol) - ia(y1, tol);
}

struct FubiniCheck {
  double lhs = 0.0;     // integral over (c, y) of f^{-1}(t) - f^{-1}(c) dt
  double rhs = 0.0;     // epsilon * region
  double region = 0.0;  // measure of D by the swapped order: eps * int_{f^-1(c)}^{f^-1(y)} (y - f(x)) dx
  int epsilon = 1;
};

// Both iterated integrals over the region D = {c <= f(x) <= t <= y}. The
// region measure is eps times the x-first integral, and the t-first integral
// equals eps times the region measure, so lhs == rhs for either direction.
inline FubiniCheck fubini_region_check(const MonotoneFunction& f, double c, double y, double quad_tol = kDefaultQuadTol,
                                       double invert_tol = kDefaultInvertTol) {
  const int eps = f.direction();
  if (c == y) return {0.0, 0.0, 0.0, eps};
  const InverseFunction inverse = inverse_as_function(f, invert_tol);
  const double alpha = inverse(c);
  const double x_y = inverse(y);

  const auto shifted = [&](double t) { return inverse(t) - alpha; };
  const double lhs = integrate(shifted, c, y, quad_tol).value;

  const auto gap = [&](double x) { return y - f(x); };
  const double region = eps * integrate(gap, alpha, x_y, quad_tol).value;
  return {lhs, eps * region, region, eps};
}

struct GeneralizedResult {
  double formula = 0.0;    // boundary - stieltjes
  double oracle = 0.0;     // quadrature of t -> H(t, f^{-1}(t))
  double boundary = 0.0;   // [H(y, f^{-1}(y)) y] from y1 to y2
  double stieltjes = 0.0;  // integral of f against H(f(x), x) over (f^{-1}(y1), f^{-1}(y2))
  int level = 0;
  std::optional<double> total_variation;
};

namespace detail {

// Evaluates H at (y, u) whatever order H declares its variables in.
inline double eval_yu(const Expression& H, double y, double u) {
  std::array<double, 2> values{};
  const auto& vars = H.variables();
  if (vars.size() > 2) throw std::invalid_argument("H may only use variables y and u");
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (vars[i] == "y") {
      values[i] = y;
    } else if (vars[i] == "u") {
      values[i] = u;
    } else {
      throw UnboundVariable(vars[i]);
    }
  }
  return H.evaluate(std::span<const double>(values.data(), vars.size()));
}

}  // namespace detail

// Integral of H(y, f^{-1}(y)) over (y1, y2) by
//   [H(y, f^{-1}(y)) y] - int f(x) dH(f(x), x),
// with the Stieltjes integrator phi(x) = H(f(x), x). Throws BVRequired if phi
// fails monotone screening and `kind` is not bounded_variation.
inline GeneralizedResult generalized_inverse_integral(const Expression& H, const MonotoneFunction& f, double y1,
                                                      double y2, const RefinementScheme& scheme = {},
                                                      Integrator kind = Integrator::screened,
                                                      double quad_tol = kDefaultQuadTol,
                                                      double invert_tol = kDefaultInvertTol) {
  GeneralizedResult r;
  if (y1 == y2) return r;
  const InverseFunction inverse = inverse_as_function(f, invert_tol);
  const double x1 = inverse(y1);
  const double x2 = inverse(y2);

  r.boundary = detail::eval_yu(H, y2, x2) * y2 - detail::eval_yu(H, y1, x1) * y1;
  const auto phi = [&](double x) { return detail::eval_yu(H, f(x), x); };
  const RsResult rs = rs_integral(f, phi, x1, x2, scheme, kind);
  r.stieltjes = rs.value;
  r.level = rs.level;
  r.total_variation = rs.total_variation;
  r.formula = r.boundary - r.stieltjes;

  const auto along_inverse = [&](double t) { return detail::eval_yu(H, t, inverse(t)); };
  r.oracle = integrate(along_inverse, y1, y2, quad_tol).value;
  return r;
}

struct VerificationTask {
  std::string description;
  Expression f;
  IntervalDomain domain;
  std::optional<Expression> F{};  // closed-form antiderivative of f
  double y1 = 0.0;
  double y2 = 0.0;
  std::optional<Expression> H{};  // bivariate in (y, u)
  bool bounded_variation = false;
};

struct ValuePair {
  double lhs = 0.0;
  double rhs = 0.0;
};

struct VerificationReport {
  std::string task;
  std::optional<double> formula;
  std::optional<double> oracle;
  std::optional<ValuePair> fubini;       // each side reconstructed to the integral over (y1, y2)
  std::optional<ValuePair> stieltjes;    // change of variable: quadrature vs Stieltjes
  std::optional<ValuePair> generalized;  // lhs = formula, rhs = oracle
  std::map<std::string, double> residuals;
  std::map<std::string, double> thresholds;
  std::map<std::string, std::string> errors;
  ScreeningSummary screening;
  int direction = 1;
  double anchor = 0.0;
  bool pass = false;
};

namespace detail {

template <class Fn>
void run_method(VerificationReport& report, const std::string& name, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    report.errors[name] = e.what();
  } catch (const std::invalid_argument& e) {
    report.errors[name] = e.what();
  }
}

inline void record(VerificationReport& report, const std::string& name, const ValuePair& pair, double reference,
                   double rel) {
  report.residuals[name] = std::fabs(pair.lhs - pair.rhs);
  report.thresholds[name] = rel * (1.0 + std::fabs(reference));
}

}  // namespace detail

// Runs the closed form, the quadrature oracle, the Fubini identity and the
// Stieltjes change of variable on one task. Method failures are recorded in
// the report; an invalid f (NonMonotone, DomainError on the screening grid),
// an invalid closed-form F, or bounds outside the codomain throw.
inline VerificationReport verify(const VerificationTask& task, const Tolerances& tol = {}) {
  VerificationReport report;
  report.task = task.description;

  const MonotoneFunction f = MonotoneFunction::build(task.f, task.domain, tol.grid);
  report.screening = f.screening();
  report.direction = f.direction();
  const auto [c, d] = f.codomain();
  for (double y : {task.y1, task.y2}) {
    if (y < c || y > d) {
      throw OutOfCodomain("bound " + format_real(y) + " is outside the codomain [" + format_real(c) + ", " +
                          format_real(d) + "]");
    }
  }
  const InverseAntiderivative ia =
      task.F ? InverseAntiderivative(f, *task.F, true, tol.invert) : InverseAntiderivative(f, tol.invert);
  report.anchor = ia.anchor();

  detail::run_method(report, "formula", [&] {
    report.formula = definite_inverse_integral(ia, task.y1, task.y2, tol.quad);
  });
  detail::run_method(report, "oracle", [&] {
    const InverseFunction inverse = inverse_as_function(f, tol.invert);
    report.oracle = integrate(inverse, task.y1, task.y2, tol.quad).value;
  });
  if (report.formula && report.oracle) {
    detail::record(report, "formula_vs_oracle", {*report.formula, *report.oracle}, *report.oracle, tol.verify_rel);
  }

  detail::run_method(report, "fubini", [&] {
    // Region D is taken from c := y1, so the t-first integral reconstructs
    // the integral over (y1, y2) after adding back f^{-1}(y1) (y2 - y1).
    const FubiniCheck check = fubini_region_check(f, task.y1, task.y2, tol.quad, tol.invert);
    const double shift = invert(f, task.y1, tol.invert) * (task.y2 - task.y1);
    report.fubini = ValuePair{check.lhs + shift, check.rhs + shift};
    detail::record(report, "fubini", *report.fubini, report.fubini->lhs, tol.verify_rel);
  });

  detail::run_method(report, "stieltjes", [&] {
    const ChangeOfVariablePair pair = change_of_variable_pair(f, task.y1, task.y2, tol.scheme, tol.quad, tol.invert);
    report.stieltjes = ValuePair{pair.lhs, pair.rhs};
    detail::record(report, "stieltjes", *report.stieltjes, pair.lhs, tol.verify_rel);
  });

  if (task.H) {
    detail::run_method(report, "generalized", [&] {
      const GeneralizedResult g = generalized_inverse_integral(
          *task.H, f, task.y1, task.y2, tol.scheme,
          task.bounded_variation ? Integrator::bounded_variation : Integrator::screened, tol.quad, tol.invert);
      report.generalized = ValuePair{g.formula, g.oracle};
      detail::record(report, "generalized", *report.generalized, g.oracle, tol.verify_rel);
    });
  }

  report.pass = report.errors.empty();
  for (const auto& [name, residual] : report.residuals) {
    if (!(residual <= report.thresholds.at(name))) report.pass = false;
  }
  return report;
}

}  // namespace invint
