// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all
// criteria pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "corpus_fixture.hpp"
#include "invint/laisant.hpp"

using namespace invint;

namespace {

constexpr double kE = std::numbers::e;

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) detail << "first failure: " << what << "; ";
    ok = ok && cond;
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<MonotoneFunction> corpus() {
  std::vector<MonotoneFunction> out;
  for (const auto& cf : testing::corpus_functions()) out.push_back(testing::build_corpus(cf));
  return out;
}

std::string label(const MonotoneFunction& f) { return f.body().to_string(); }

// 1. Closed form for f = exp against x log x - x.
void golden_example(Check& c) {
  const auto start = std::chrono::steady_clock::now();
  const InverseAntiderivative ia(MonotoneFunction::build(parse("exp(x)", {"x"}), IntervalDomain(0.0, 2.0)));
  const double value = definite_inverse_integral(ia, 1.0, kE);
  c.expect(std::fabs(value - 1.0) <= 1e-8, "integral over (1, e) = " + format_real(value));
  const double g1 = inverse_antiderivative(ia, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double y = 1.0 + (kE - 1.0) * i / 9.0;
    worst = std::max(worst, std::fabs(inverse_antiderivative(ia, y) - g1 - (y * std::log(y) - y + 1.0)));
  }
  c.expect(worst <= 1e-8, "G(y) - G(1) vs y log y - y + 1, worst " + format_real(worst));
  const double elapsed = seconds_since(start);
  c.expect(elapsed < 1.0, "runtime " + format_real(elapsed) + " s");
  c.detail << "value " << format_real(value) << ", worst grid error " << format_real(worst) << ", " << elapsed
           << " s";
}

// 2. Closed form vs quadrature of the numerical inverse, 5 bound pairs each.
void corpus_agreement(Check& c) {
  const auto start = std::chrono::steady_clock::now();
  const auto fs = corpus();
  int decreasing = 0;
  double worst = 0.0;
  for (const auto& f : fs) {
    decreasing += f.direction() < 0;
    const InverseAntiderivative ia(f);
    const InverseFunction inv = inverse_as_function(f);
    for (const auto& [y1, y2] : testing::bound_pairs(f)) {
      const double formula = definite_inverse_integral(ia, y1, y2);
      const double oracle = integrate(inv, y1, y2).value;
      const double rel = std::fabs(formula - oracle) / (1.0 + std::fabs(oracle));
      worst = std::max(worst, rel);
      c.expect(rel <= 1e-6, label(f) + " over (" + format_real(y1) + ", " + format_real(y2) + ")cmd");
    }
  }
  c.expect(fs.size() >= 8, "corpus has at least 8 functions");
  c.expect(decreasing >= 2, "corpus has at least two decreasing functions");
  const double elapsed = seconds_since(start);
  c.expect(elapsed < 30.0, "runtime " + format_real(elapsed) + " s");
  c.detail << fs.size() << " functions (" << decreasing << " decreasing), worst relative residual "
           << format_real(worst) << ", " << elapsed << " s";
}

// 3. Both iterated integrals over the region D.
void fubini(Check& c) {
  bool saw_up = false;
  bool saw_down = false;
  double worst = 0.0;
  for (const auto& f : corpus()) {
    const auto [lo, hi] = f.codomain();
    for (const auto& [y1, y2] : testing::bound_pairs(f)) {
      for (const auto& [cc, y] : {std::pair{lo, y2}, std::pair{y1, y2}}) {
        const FubiniCheck fc = fubini_region_check(f, cc, y);
        saw_up = saw_up || fc.epsilon > 0;
        saw_down = saw_down || fc.epsilon < 0;
        const double rel = std::fabs(fc.lhs - fc.rhs) / (1.0 + std::fabs(fc.lhs));
        worst = std::max(worst, rel);
        c.expect(rel <= 1e-6, label(f) + " c=" + format_real(cc) + " y=" + format_real(y));
        c.expect(fc.epsilon == f.direction(), "epsilon of " + label(f));
      }
    }
  }
  c.expect(saw_up && saw_down, "both epsilon signs exercised");
  c.detail << "worst relative residual " << format_real(worst) << ", eps=+1 and eps=-1 exercised";
}

// 4. Integration by parts and change of variable.
void stieltjes_identities(Check& c) {
  const RefinementScheme scheme{};
  const auto identity = [](double x) { return x; };
  double worst_ibp = 0.0;
  double worst_cov = 0.0;
  for (const auto& f : corpus()) {
    const double r = ibp_residual(identity, f, f.preimage_of_lower(), f.preimage_of_upper(), scheme);
    worst_ibp = std::max(worst_ibp, r);
    c.expect(r <= 3e-8, "ibp residual for " + label(f) + " = " + format_real(r));
    for (const auto& [y1, y2] : testing::bound_pairs(f)) {
      const auto p = change_of_variable_pair(f, y1, y2, scheme);
      const double rel = std::fabs(p.lhs - p.rhs) / (1.0 + std::fabs(p.lhs));
      worst_cov = std::max(worst_cov, rel);
      c.expect(rel <= 1e-6, "change of variable for " + label(f));
    }
  }
  c.detail << "worst ibp residual " << format_real(worst_ibp) << " (limit 3e-8), worst change-of-variable "
           << format_real(worst_cov);
}

// 5. Generalized formula for H in {u, 1, u^2}.
void generalized(Check& c) {
  const RefinementScheme scheme{};
  const MonotoneFunction f = MonotoneFunction::build(parse("exp(x)", {"x"}), IntervalDomain(0.0, 1.0));
  const InverseAntiderivative ia(f);
  for (const char* h : {"u", "1", "u^2"}) {
    const GeneralizedResult r = generalized_inverse_integral(parse(h, {"y", "u"}), f, 1.0, kE, scheme);
    const double diff = std::fabs(r.formula - r.oracle);
    c.expect(diff <= 1e-5, std::string("H=") + h + " formula vs oracle " + format_real(diff));
    c.detail << "H=" << h << ": " << format_real(diff) << "; ";
    if (std::string(h) == "u") {
      const double theorem = definite_inverse_integral(ia, 1.0, kE);
      const double d = std::fabs(r.formula - theorem);
      c.expect(d <= 3 * scheme.tol, "H=u vs closed form " + format_real(d));
      c.detail << "H=u vs closed form " << format_real(d) << "; ";
    }
  }
}

// 6. Inversion round trip, direction, additivity, fundamental theorem.
void properties(Check& c) {
  const double tau = 1e-10;
  const double quad_tol = kDefaultQuadTol;
  double worst_roundtrip = 0.0;
  double worst_ft = 0.0;
  double worst_add = 0.0;
  double worst_oracle_add = 0.0;
  for (const auto& f : corpus()) {
    const auto [lo, hi] = f.codomain();
    const InverseFunction inv = inverse_as_function(f, tau);
    c.expect(inv.direction() == f.direction(), "direction of " + label(f));
    for (int i = 0; i <= 100; ++i) {
      const double y = i == 100 ? hi : lo + (hi - lo) * i / 100.0;
      const double r = std::fabs(f(invert(f, y, tau)) - y) / (1.0 + std::fabs(y));
      worst_roundtrip = std::max(worst_roundtrip, r);
      c.expect(r <= tau, "round trip of " + label(f) + " at " + format_real(y));
    }

    const InverseAntiderivative ia(f);
    const double y1 = lo + 0.15 * (hi - lo);
    const double y2 = lo + 0.5 * (hi - lo);
    const double y3 = lo + 0.9 * (hi - lo);
    const double add = std::fabs(definite_inverse_integral(ia, y1, y2) + definite_inverse_integral(ia, y2, y3) -
                                 definite_inverse_integral(ia, y1, y3));
    worst_add = std::max(worst_add, add);
    c.expect(add <= 2e-10, "formula additivity for " + label(f));
    const InverseFunction oracle_inv = inverse_as_function(f);
    const double oracle_add = std::fabs(integrate(oracle_inv, y1, y2, quad_tol).value +
                                        integrate(oracle_inv, y2, y3, quad_tol).value -
                                        integrate(oracle_inv, y1, y3, quad_tol).value);
    worst_oracle_add = std::max(worst_oracle_add, oracle_add);
    c.expect(oracle_add <= 2e-10 + 3 * quad_tol, "oracle additivity for " + label(f));

    const double h = 1e-5;
    for (int i = 1; i < 20; ++i) {
      const double y = lo + (hi - lo) * i / 20.0;
      const double slope = (inverse_antiderivative(ia, y + h) - inverse_antiderivative(ia, y - h)) / (2 * h);
      const double x = oracle_inv(y);
      const double rel = std::fabs(slope - x) / (1.0 + std::fabs(x));
      worst_ft = std::max(worst_ft, rel);
      c.expect(rel <= 1e-4, "fundamental theorem for " + label(f) + " at " + format_real(y));
    }
  }
  c.detail << "round trip " << format_real(worst_roundtrip) << ", additivity " << format_real(worst_add)
           << " (oracle " << format_real(worst_oracle_add) << "), G' vs f^-1 " << format_real(worst_ft);
}

// 7. sin on [0, 3] violates the hypothesis.
void hypothesis_violation(Check& c) {
  try {
    MonotoneFunction::build(parse("sin(x)", {"x"}), IntervalDomain(0.0, 3.0));
    c.expect(false, "sin on [0, 3] accepted");
  } catch (const NonMonotone& e) {
    const double x1 = e.x1();
    const double x2 = e.x2();
    const double mid = 0.5 * (x1 + x2);
    c.expect(x1 < x2, "witnesses ordered");
    c.expect(std::sin(mid) > std::sin(x1) && std::sin(mid) > std::sin(x2), "ordering flips between witnesses");
    c.expect(x1 < std::numbers::pi / 2 && std::numbers::pi / 2 < x2, "witnesses straddle pi/2");
    c.detail << "witnesses " << format_real(x1) << " < " << format_real(x2) << "; ";
  }
  const std::string cmd = std::string(INVINT_CLI_PATH) +
                          R"cmd( integrate-inverse --f "sin(x)" --domain 0 3 --from 0 --to 0.5 >/dev/null 2>&1)cmd";
  const int status = std::system(cmd.c_str());
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  c.expect(code == 2, "CLI exit code " + std::to_string(code));
  c.detail << "CLI exit code " << code;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Check&)>>> criteria{
      {"golden example: integral of log over (1, e)", golden_example},
      {"corpus agreement: closed form vs quadrature oracle", corpus_agreement},
      {"Fubini region identity, both directions", fubini},
      {"Stieltjes integration by parts and change of variable", stieltjes_identities},
      {"generalized formula for H in {u, 1, u^2}", generalized},
      {"property suites: inversion, direction, additivity, derivative", properties},
      {"hypothesis violation: sin on [0, 3]", hypothesis_violation},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Check c;
    try {
      run(c);
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail << "exception: " << e.what();
    }
    failed += !c.ok;
    std::cout << (c.ok ? "PASS" : "FAIL") << " [" << index << "] " << name << " -- " << c.detail.str() << '\n';
  }
  std::cout << (criteria.size() - failed) << '/' << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
