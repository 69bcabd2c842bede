#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "corpus_fixture.hpp"
#include "invint/laisant.hpp"

using namespace invint;

namespace {

constexpr double kE = std::numbers::e;

MonotoneFunction make(const char* text, double a, double b) {
  return MonotoneFunction::build(parse(text, {"x"}), IntervalDomain(a, b));
}

}  // namespace

TEST_CASE("inverse_antiderivative of exp gives x log x - x") {
  const InverseAntiderivative ia(make("exp(x)", 0.0, 2.0));
  CHECK(ia.anchor() == 0.0);
  CHECK(ia.lower() == 1.0);
  const double g1 = inverse_antiderivative(ia, 1.0);
  for (int i = 0; i <= 9; ++i) {
    const double y = 1.0 + (kE - 1.0) * i / 9.0;
    const double expected = y * std::log(y) - y + 1.0;
    CHECK(std::fabs(inverse_antiderivative(ia, y) - g1 - expected) <= 1e-8);
  }
  CHECK(std::fabs(definite_inverse_integral(ia, 1.0, kE) - 1.0) <= 1e-8);

  // Anchored on [-1, 2]: alpha = -1, yet the difference is unchanged.
  const InverseAntiderivative wide(make("exp(x)", -1.0, 2.0));
  CHECK(wide.anchor() == -1.0);
  CHECK(std::fabs(inverse_antiderivative(wide, kE) - inverse_antiderivative(wide, 1.0) - 1.0) <= 1e-8);
}

TEST_CASE("inverse_antiderivative simple cases") {
  const InverseAntiderivative id(make("x", 0.0, 1.0));
  for (double t : {0.0, 0.25, 0.5, 1.0}) CHECK(std::fabs(inverse_antiderivative(id, t) - t * t / 2) <= 1e-12);

  const InverseAntiderivative cube(make("x^3", 0.0, 2.0));
  CHECK(std::fabs(inverse_antiderivative(cube, 8.0) - 12.0) <= 1e-10);
  // G(y) = 3/4 y^(4/3) on the whole codomain
  for (double y : {0.5, 1.0, 3.0, 7.5}) {
    CHECK(std::fabs(inverse_antiderivative(cube, y) - 0.75 * std::pow(y, 4.0 / 3.0)) <= 1e-9);
  }

  const InverseAntiderivative exact(make("x^3", 0.0, 2.0), parse("x^4/4 + 1", {"x"}));
  CHECK(std::fabs(inverse_antiderivative(exact, 8.0) - 12.0) <= 1e-12);
  CHECK_THROWS_AS(InverseAntiderivative(make("x^3", 0.0, 2.0), parse("x^4", {"x"})), InvalidAntiderivative);
}

TEST_CASE("definite_inverse_integral") {
  const InverseAntiderivative e(make("exp(x)", 0.0, 1.0));
  CHECK(std::fabs(definite_inverse_integral(e, 1.0, kE) - 1.0) <= 1e-8);
  CHECK(definite_inverse_integral(e, kE, 1.5) == -definite_inverse_integral(e, 1.5, kE));
  CHECK(definite_inverse_integral(e, 2.0, 2.0) == 0.0);

  const InverseAntiderivative cube(make("x^3", 0.0, 2.0));
  CHECK(std::fabs(definite_inverse_integral(cube, 0.0, 8.0) - 12.0) <= 1e-9);
  CHECK_THROWS_AS(definite_inverse_integral(cube, 0.0, 9.0), OutOfCodomain);
}

TEST_CASE("constant convention: G(c) = c alpha, alpha an endpoint") {
  for (const auto& cf : testing::corpus_functions()) {
    INFO(cf.text);
    const InverseAntiderivative ia(testing::build_corpus(cf));
    const double alpha = ia.anchor();
    CHECK((alpha == cf.a || alpha == cf.b));
    CHECK(alpha == (cf.direction > 0 ? cf.a : cf.b));
    CHECK(inverse_antiderivative(ia, ia.lower()) == ia.lower() * alpha);
  }
}

TEST_CASE("fubini_region_check") {
  const FubiniCheck up = fubini_region_check(make("exp(x)", 0.0, 1.0), 1.0, kE);
  CHECK(up.epsilon == 1);
  CHECK(std::fabs(up.lhs - 1.0) <= 1e-9);
  CHECK(std::fabs(up.rhs - 1.0) <= 1e-9);

  // f = -x on [0, 1]: both sides are the quadratic area 1/8 with the sign of eps.
  const MonotoneFunction neg = make("-x", 0.0, 1.0);
  const FubiniCheck down = fubini_region_check(neg, -1.0, -0.5);
  CHECK(down.epsilon == -1);
  CHECK(std::fabs(down.region - 0.125) <= 1e-12);
  CHECK(std::fabs(down.lhs + 0.125) <= 1e-12);
  CHECK(std::fabs(down.rhs + 0.125) <= 1e-12);
  const FubiniCheck from_top = fubini_region_check(neg, 0.0, -0.5);
  CHECK(std::fabs(from_top.lhs - from_top.rhs) <= 1e-12);

  const FubiniCheck empty = fubini_region_check(neg, -0.3, -0.3);
  CHECK(empty.lhs == 0.0);
  CHECK(empty.rhs == 0.0);
  CHECK(empty.epsilon == -1);
}

TEST_CASE("generalized_inverse_integral") {
  const MonotoneFunction f = make("exp(x)", 0.0, 1.0);
  const RefinementScheme scheme{};

  SECTION("H = u reduces to the closed form") {
    const GeneralizedResult r = generalized_inverse_integral(parse("u", {"y", "u"}), f, 1.0, kE, scheme);
    const InverseAntiderivative ia(f);
    CHECK(std::fabs(r.formula - definite_inverse_integral(ia, 1.0, kE)) <= 3 * scheme.tol);
    CHECK(std::fabs(r.boundary - kE) <= 1e-12);
  }
  SECTION("H = 1 has a vanishing Stieltjes term") {
    const GeneralizedResult r = generalized_inverse_integral(parse("1", {"y", "u"}), f, 1.0, 2.0, scheme);
    CHECK(r.stieltjes == 0.0);
    CHECK(r.formula == 1.0);
    CHECK(std::fabs(r.oracle - 1.0) <= 1e-12);
  }
  SECTION("H = u^2: integral of log^2 over (1, e) is e - 2") {
    const GeneralizedResult r = generalized_inverse_integral(parse("u^2", {"y", "u"}), f, 1.0, kE, scheme);
    CHECK(std::fabs(r.oracle - (kE - 2.0)) <= 1e-9);
    CHECK(std::fabs(r.formula - (kE - 2.0)) <= 1e-5);
  }
  SECTION("H mixing y and u") {
    const GeneralizedResult r = generalized_inverse_integral(parse("y*u", {"y", "u"}), f, 1.0, kE, scheme);
    // integral of t log t over (1, e) = (e^2 + 1) / 4
    CHECK(std::fabs(r.oracle - (kE * kE + 1.0) / 4.0) <= 1e-9);
    CHECK(std::fabs(r.formula - r.oracle) <= 1e-5);
  }
  SECTION("non-monotone integrator needs a BV declaration") {
    const Expression H = parse("sin(6*u)", {"y", "u"});
    CHECK_THROWS_AS(generalized_inverse_integral(H, f, 1.0, kE, scheme), BVRequired);
    const GeneralizedResult r = generalized_inverse_integral(H, f, 1.0, kE, scheme, Integrator::bounded_variation);
    CHECK(r.total_variation.has_value());
    CHECK(std::fabs(r.formula - r.oracle) <= 1e-5);
  }
}

TEST_CASE("corpus: closed form, fundamental theorem, additivity, Fubini") {
  for (const auto& cf : testing::corpus_functions()) {
    INFO(cf.text);
    const MonotoneFunction f = testing::build_corpus(cf);
    const InverseAntiderivative ia(f);
    const InverseFunction inv = inverse_as_function(f);
    const auto [c, d] = f.codomain();

    for (const auto& [y1, y2] : testing::bound_pairs(f)) {
      const double formula = definite_inverse_integral(ia, y1, y2);
      const double oracle = integrate(inv, y1, y2).value;
      CHECK(std::fabs(formula - oracle) <= 1e-6 * (1.0 + std::fabs(oracle)));
      if (cf.inverse) {
        // closed-form inverse as an oracle independent of the numerical inversion
        const double independent = integrate(cf.inverse, y1, y2, 1e-11).value;
        CHECK(std::fabs(formula - independent) <= 1e-6 * (1.0 + std::fabs(independent)));
      }
    }

    const double h = 1e-5;
    for (int i = 1; i < 20; ++i) {
      const double y = c + (d - c) * i / 20.0;
      const double slope = (inverse_antiderivative(ia, y + h) - inverse_antiderivative(ia, y - h)) / (2 * h);
      const double x = inv(y);
      CHECK(std::fabs(slope - x) <= 1e-4 * (1.0 + std::fabs(x)));
    }

    const double y1 = c + 0.1 * (d - c);
    const double y2 = c + 0.55 * (d - c);
    const double y3 = c + 0.8 * (d - c);
    const double split = definite_inverse_integral(ia, y1, y2) + definite_inverse_integral(ia, y2, y3);
    CHECK(std::fabs(split - definite_inverse_integral(ia, y1, y3)) <= 2e-10);

    for (double t : {0.2, 0.7, 1.0}) {
      const double y = c + t * (d - c);
      const FubiniCheck fc = fubini_region_check(f, c, y);
      CHECK(fc.epsilon == f.direction());
      CHECK(fc.region >= 0.0);
      CHECK(std::fabs(fc.lhs - fc.rhs) <= 1e-6 * (1.0 + std::fabs(fc.lhs)));
    }
  }
}

TEST_CASE("verify assembles a consistent report") {
  const VerificationReport r = verify({.description = "exp",
                                       .f = parse("exp(x)", {"x"}),
                                       .domain = IntervalDomain(0.0, 2.0),
                                       .y1 = 1.0,
                                       .y2 = kE});
  CHECK(r.pass);
  CHECK(r.errors.empty());
  REQUIRE(r.formula);
  REQUIRE(r.oracle);
  REQUIRE(r.fubini);
  REQUIRE(r.stieltjes);
  for (double v : {*r.formula, *r.oracle, r.fubini->lhs, r.fubini->rhs, r.stieltjes->lhs, r.stieltjes->rhs}) {
    CHECK(std::fabs(v - 1.0) <= 1e-7);
  }
  CHECK(r.residuals.at("formula_vs_oracle") == std::fabs(*r.formula - *r.oracle));
  CHECK(r.residuals.at("fubini") == std::fabs(r.fubini->lhs - r.fubini->rhs));
  CHECK(r.residuals.at("stieltjes") == std::fabs(r.stieltjes->lhs - r.stieltjes->rhs));

  const VerificationReport cube = verify({.description = "cube",
                                          .f = parse("x^3", {"x"}),
                                          .domain = IntervalDomain(0.0, 2.0),
                                          .F = parse("x^4/4", {"x"}),
                                          .y1 = 0.0,
                                          .y2 = 8.0});
  CHECK(cube.pass);
  CHECK(std::fabs(*cube.formula - 12.0) <= 1e-9);
  CHECK(std::fabs(cube.fubini->rhs - 12.0) <= 1e-7);
  CHECK(std::fabs(cube.stieltjes->rhs - 12.0) <= 1e-7);

  CHECK_THROWS_AS(verify({.description = "sin",
                          .f = parse("sin(x)", {"x"}),
                          .domain = IntervalDomain(0.0, 3.0),
                          .y1 = 0.0,
                          .y2 = 0.5}),
                  NonMonotone);
}

TEST_CASE("verify records method failures instead of throwing") {
  Tolerances tol;
  tol.scheme.max_levels = 2;
  tol.scheme.tol = 1e-14;
  const VerificationReport r = verify({.description = "tight",
                                       .f = parse("exp(x)", {"x"}),
                                       .domain = IntervalDomain(0.0, 2.0),
                                       .y1 = 1.0,
                                       .y2 = kE},
                                      tol);
  CHECK_FALSE(r.pass);
  CHECK(r.errors.count("stieltjes") == 1);
  CHECK(r.formula.has_value());
}
