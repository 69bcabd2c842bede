// invint: integrals of inverse functions from the command line.
//
//   invint integrate-inverse --f "exp(x)" --domain 0 2 --from 1 --to e [--verify] [--json]
//   invint verify --corpus corpus/standard.txt [--json]
//   invint stieltjes --g "x" --phi "x^2" --from 0 --to 1 [--bv]

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "invint/task.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Antiderivatives and definite integrals of inverse functions"};
  app.require_subcommand(1);

  invint::TaskSpec spec;
  std::vector<std::string> domain;
  std::optional<double> tol;
  std::size_t grid = invint::kDefaultGridSize;
  bool do_verify = false;
  bool json = false;

  auto* integrate = app.add_subcommand("integrate-inverse", "integral of f^-1 over [from, to]");
  integrate->add_option("--f", spec.f_text, "f(x)")->required();
  integrate->add_option("--domain", domain, "domain endpoints A B")->expected(2)->required();
  integrate->add_option("--from", spec.from_text, "lower bound y1 (accepts e, pi)")->required();
  integrate->add_option("--to", spec.to_text, "upper bound y2")->required();
  integrate->add_option("--F", spec.F_text, "closed-form antiderivative of f");
  integrate->add_option("--H", spec.H_text, "H(y, u): also integrate H(y, f^-1(y))");
  integrate->add_option("--tol", tol, "verification tolerance (relative)");
  integrate->add_option("--grid", grid, "monotonicity screening grid size")->check(CLI::Range(2, 1 << 24));
  integrate->add_flag("--verify", do_verify, "cross-check against quadrature, Fubini and Stieltjes");
  integrate->add_flag("--json", json, "machine-readable output");
  integrate->add_flag("--bv", spec.bv, "declare H(f(x), x) bounded-variation");

  std::string corpus;
  auto* verify = app.add_subcommand("verify", "verify every task of a corpus file");
  verify->add_option("--corpus,corpus", corpus, "corpus file")->required()->check(CLI::ExistingFile);
  verify->add_option("--tol", tol, "default verification tolerance (relative)");
  verify->add_flag("--json", json, "machine-readable output");

  invint::StieltjesOptions rs;
  auto* stieltjes = app.add_subcommand("stieltjes", "Riemann-Stieltjes integral of g against phi");
  stieltjes->add_option("--g", rs.g_text, "integrand g(x)")->required();
  stieltjes->add_option("--phi", rs.phi_text, "integrator phi(x)")->required();
  stieltjes->add_option("--from", rs.from_text, "lower bound")->required();
  stieltjes->add_option("--to", rs.to_text, "upper bound")->required();
  stieltjes->add_option("--tol", rs.scheme.tol, "successive-level tolerance");
  stieltjes->add_option("--max-levels", rs.scheme.max_levels, "refinement levels before giving up")
      ->check(CLI::Range(1, 30));
  stieltjes->add_flag("--bv", rs.bv, "declare phi bounded-variation (skips monotone screening)");
  stieltjes->add_flag("--json", rs.json, "machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : invint::kExitInputError;
  }

  double default_tol = invint::kDefaultVerifyTol;
  try {
    default_tol = tol.value_or(invint::default_verify_tol());
    if (!(default_tol > 0.0)) throw std::invalid_argument("--tol must be positive");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return invint::kExitInputError;
  }

  if (*integrate) {
    spec.domain_a = domain.at(0);
    spec.domain_b = domain.at(1);
    spec.grid = grid;
    invint::IntegrateOptions opts{do_verify, json, default_tol};
    return invint::cmd_integrate_inverse(spec, opts, std::cout, std::cerr);
  }
  if (*verify) {
    std::ifstream in(corpus);
    try {
      return invint::cmd_verify(invint::parse_corpus(in), json, default_tol, std::cout);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return invint::kExitInputError;
    }
  }
  return invint::cmd_stieltjes(rs, std::cout, std::cerr);
}
