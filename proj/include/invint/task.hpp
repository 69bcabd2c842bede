#pragma once

// Task definitions, the line-oriented corpus format, report rendering (text
// and JSON), and the command implementations behind the invint CLI.
//
// Corpus format: records of key=value lines separated by blank lines. Lines
// starting with '#' are comments. Keys:
//   name=    optional label
//   f=       f(x), required
//   domain=  "A B", required
//   from=    y1, required
//   to=      y2, required
//   F=       closed-form antiderivative of f, optional
//   H=       H(y, u) for the generalized integral, optional
//   tol=     verification tolerance (relative), optional
//   grid=    monotonicity screening grid size, optional
//   bv=      "true" to declare H(f(x), x) bounded-variation, optional
// Numeric fields accept constant expressions such as e, pi or 2*pi.

#include <cstdlib>
#include <exception>
#include <future>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "invint/error.hpp"
#include "invint/expr.hpp"
#include "invint/format.hpp"
#include "invint/laisant.hpp"
#include "invint/monotone.hpp"
#include "invint/stieltjes.hpp"

namespace invint {

enum ExitCode : int {
  kExitPass = 0,
  kExitInputError = 2,
  kExitVerificationFailure = 3,
  kExitNoConvergence = 4,
};

inline constexpr const char* kDefaultTolEnv = "INVINT_DEFAULT_TOL";
inline constexpr double kDefaultVerifyTol = 1e-6;

class CorpusError : public Error {
 public:
  CorpusError(std::size_t line, const std::string& message)
      : Error("corpus line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct TaskSpec {
  std::string name;
  std::string f_text;
  std::string domain_a;
  std::string domain_b;
  std::string from_text;
  std::string to_text;
  std::optional<std::string> F_text;
  std::optional<std::string> H_text;
  std::optional<double> tol;
  std::optional<std::size_t> grid;
  bool bv = false;
  std::size_t line = 0;  // first line of the record in its corpus file

  std::string label() const {
    if (!name.empty()) return name;
    return "f=" + f_text + " on [" + domain_a + ", " + domain_b + "] over (" + from_text + ", " + to_text + ")";
  }
};

// Value of a constant expression such as "e", "-1.4" or "pi/2".
inline double parse_real_literal(std::string_view text) { return parse(text, {}).evaluate({}); }

namespace detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

inline std::pair<std::string, std::string> split_pair(std::string_view text, std::size_t line) {
  std::istringstream in{std::string(text)};
  std::string a;
  std::string b;
  std::string extra;
  if (!(in >> a >> b) || (in >> extra)) throw CorpusError(line, "domain needs exactly two values, got '" + std::string(text) + "'");
  return {a, b};
}

inline bool parse_bool(const std::string& v, std::size_t line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw CorpusError(line, "expected a boolean, got '" + v + "'");
}

inline void finish_record(std::vector<TaskSpec>& out, std::optional<TaskSpec>& current) {
  if (!current) return;
  const TaskSpec& t = *current;
  auto require = [&](bool present, const char* key) {
    if (!present) throw CorpusError(t.line, std::string("record is missing required key '") + key + "'");
  };
  require(!t.f_text.empty(), "f");
  require(!t.domain_a.empty(), "domain");
  require(!t.from_text.empty(), "from");
  require(!t.to_text.empty(), "to");
  out.push_back(std::move(*current));
  current.reset();
}

}  // namespace detail

inline std::vector<TaskSpec> parse_corpus(std::istream& in) {
  std::vector<TaskSpec> tasks;
  std::optional<TaskSpec> current;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = detail::trim(raw);
    if (text.empty()) {
      detail::finish_record(tasks, current);
      continue;
    }
    if (text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw CorpusError(line, "expected key=value, got '" + text + "'");
    const std::string key = detail::trim(std::string_view(text).substr(0, eq));
    const std::string value = detail::trim(std::string_view(text).substr(eq + 1));
    if (!current) {
      current.emplace();
      current->line = line;
    }
    TaskSpec& t = *current;
    if (key == "name") {
      t.name = value;
    } else if (key == "f") {
      t.f_text = value;
    } else if (key == "domain") {
      std::tie(t.domain_a, t.domain_b) = detail::split_pair(value, line);
    } else if (key == "from") {
      t.from_text = value;
    } else if (key == "to") {
      t.to_text = value;
    } else if (key == "F") {
      t.F_text = value;
    } else if (key == "H") {
      t.H_text = value;
    } else if (key == "tol") {
      try {
        t.tol = parse_real_literal(value);
      } catch (const Error& e) {
        throw CorpusError(line, std::string("bad tol: ") + e.what());
      }
      if (!(*t.tol > 0.0)) throw CorpusError(line, "tol must be positive");
    } else if (key == "grid") {
      char* end = nullptr;
      const unsigned long long n = std::strtoull(value.c_str(), &end, 10);
      if (end == value.c_str() || *end != '\0' || n < 2) throw CorpusError(line, "grid must be an integer >= 2");
      t.grid = static_cast<std::size_t>(n);
    } else if (key == "bv") {
      t.bv = detail::parse_bool(value, line);
    } else {
      throw CorpusError(line, "unknown key '" + key + "'");
    }
  }
  detail::finish_record(tasks, current);
  return tasks;
}

inline VerificationTask to_task(const TaskSpec& spec) {
  VerificationTask task{
      .description = spec.label(),
      .f = parse(spec.f_text, {"x"}),
      .domain = IntervalDomain(parse_real_literal(spec.domain_a), parse_real_literal(spec.domain_b)),
      .F = std::nullopt,
      .y1 = parse_real_literal(spec.from_text),
      .y2 = parse_real_literal(spec.to_text),
      .H = std::nullopt,
      .bounded_variation = spec.bv,
  };
  if (spec.F_text) task.F = parse(*spec.F_text, {"x"});
  if (spec.H_text) task.H = parse(*spec.H_text, {"y", "u"});
  return task;
}

// Default verification tolerance, overridable through INVINT_DEFAULT_TOL.
inline double default_verify_tol() {
  const char* env = std::getenv(kDefaultTolEnv);
  if (env == nullptr || *env == '\0') return kDefaultVerifyTol;
  double v = 0.0;
  try {
    v = parse_real_literal(env);
  } catch (const Error& e) {
    throw std::invalid_argument(std::string(kDefaultTolEnv) + " is not a number: " + e.what());
  }
  if (!(v > 0.0)) throw std::invalid_argument(std::string(kDefaultTolEnv) + " must be positive");
  return v;
}

inline Tolerances tolerances_for(const TaskSpec& spec, double default_tol) {
  Tolerances tol;
  tol.verify_rel = spec.tol.value_or(default_tol);
  if (spec.grid) tol.grid = *spec.grid;
  return tol;
}

// Exit code for an exception thrown outside a report.
inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NoConvergence*>(&e) != nullptr || dynamic_cast<const MaxSubdivision*>(&e) != nullptr) {
    return kExitNoConvergence;
  }
  return kExitInputError;
}

inline int exit_code_for(const VerificationReport& report) {
  return report.pass ? kExitPass : kExitVerificationFailure;
}

namespace detail {

inline nlohmann::json opt_number(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline nlohmann::json opt_pair(const std::optional<ValuePair>& p) {
  return p ? nlohmann::json::array({p->lhs, p->rhs}) : nlohmann::json(nullptr);
}

}  // namespace detail

inline nlohmann::json report_to_json(const VerificationReport& r) {
  nlohmann::json values{
      {"formula", detail::opt_number(r.formula)},
      {"oracle", detail::opt_number(r.oracle)},
      {"fubini", detail::opt_pair(r.fubini)},
      {"stieltjes", detail::opt_pair(r.stieltjes)},
  };
  if (r.generalized) values["generalized"] = detail::opt_pair(r.generalized);
  return nlohmann::json{
      {"task", r.task},
      {"values", values},
      {"residuals", r.residuals},
      {"tolerances", r.thresholds},
      {"errors", r.errors},
      {"direction", r.direction},
      {"anchor", r.anchor},
      {"screening", r.screening.describe()},
      {"pass", r.pass},
  };
}

inline void write_report(std::ostream& out, const VerificationReport& r) {
  out << "task: " << r.task << '\n';
  out << "  direction " << (r.direction > 0 ? "+1" : "-1") << ", anchor " << format_real(r.anchor) << ", "
      << r.screening.describe() << '\n';
  auto value = [&](const char* name, const std::optional<double>& v) {
    out << "  " << name << ' ' << (v ? format_real(*v) : std::string("-")) << '\n';
  };
  auto pair = [&](const char* name, const std::optional<ValuePair>& p) {
    out << "  " << name << ' ';
    if (p) {
      out << format_real(p->lhs) << " | " << format_real(p->rhs) << '\n';
    } else {
      out << "-\n";
    }
  };
  value("formula   ", r.formula);
  value("oracle    ", r.oracle);
  pair("fubini    ", r.fubini);
  pair("stieltjes ", r.stieltjes);
  if (r.generalized) pair("generalized", r.generalized);
  for (const auto& [name, residual] : r.residuals) {
    const double limit = r.thresholds.at(name);
    out << "  residual " << name << ' ' << format_real(residual) << " (limit " << format_real(limit) << ") "
        << (residual <= limit ? "ok" : "FAIL") << '\n';
  }
  for (const auto& [name, message] : r.errors) out << "  error " << name << ": " << message << '\n';
  out << "  " << (r.pass ? "PASS" : "FAIL") << '\n';
}

struct IntegrateOptions {
  bool verify = false;
  bool json = false;
  double default_tol = kDefaultVerifyTol;
};

// Integral of f^{-1} over (from, to); with `verify`, the full cross-check.
inline int cmd_integrate_inverse(const TaskSpec& spec, const IntegrateOptions& opts, std::ostream& out,
                                 std::ostream& err) {
  try {
    const VerificationTask task = to_task(spec);
    const Tolerances tol = tolerances_for(spec, opts.default_tol);
    if (opts.verify) {
      const VerificationReport report = verify(task, tol);
      if (opts.json) {
        out << report_to_json(report).dump() << '\n';
      } else {
        write_report(out, report);
      }
      return exit_code_for(report);
    }

    const MonotoneFunction f = MonotoneFunction::build(task.f, task.domain, tol.grid);
    const InverseAntiderivative ia =
        task.F ? InverseAntiderivative(f, *task.F, true, tol.invert) : InverseAntiderivative(f, tol.invert);
    const auto [c, d] = f.codomain();
    for (double y : {task.y1, task.y2}) {
      if (y < c || y > d) {
        throw OutOfCodomain("bound " + format_real(y) + " is outside the codomain [" + format_real(c) + ", " +
                            format_real(d) + "]");
      }
    }
    const double value = definite_inverse_integral(ia, task.y1, task.y2, tol.quad);
    std::optional<GeneralizedResult> general;
    if (task.H) {
      general = generalized_inverse_integral(
          *task.H, f, task.y1, task.y2, tol.scheme,
          task.bounded_variation ? Integrator::bounded_variation : Integrator::screened, tol.quad, tol.invert);
    }
    if (opts.json) {
      nlohmann::json j{{"task", task.description}, {"value", value}};
      if (general) j["generalized"] = general->formula;
      out << j.dump() << '\n';
    } else {
      out << "value " << format_real(value) << '\n';
      if (general) out << "generalized " << format_real(general->formula) << '\n';
    }
    return kExitPass;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

struct TaskOutcome {
  std::optional<VerificationReport> report;
  std::string error;
  int exit_code = kExitPass;
};

inline TaskOutcome run_task(const TaskSpec& spec, double default_tol) {
  try {
    VerificationReport report = verify(to_task(spec), tolerances_for(spec, default_tol));
    const int code = exit_code_for(report);
    return {std::move(report), {}, code};
  } catch (const std::exception& e) {
    return {std::nullopt, e.what(), exit_code_for(e)};
  }
}

// Runs every task (concurrently), emits results in input order followed by
// "passed k/n". Exit 0 iff every task passed.
inline int cmd_verify(const std::vector<TaskSpec>& tasks, bool json, double default_tol, std::ostream& out) {
  std::vector<std::future<TaskOutcome>> pending;
  pending.reserve(tasks.size());
  for (const TaskSpec& spec : tasks) {
    pending.push_back(std::async(std::launch::async, [&spec, default_tol] { return run_task(spec, default_tol); }));
  }
  std::size_t passed = 0;
  nlohmann::json reports = nlohmann::json::array();
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const TaskOutcome outcome = pending[i].get();
    if (outcome.exit_code == kExitPass) ++passed;
    if (json) {
      if (outcome.report) {
        reports.push_back(report_to_json(*outcome.report));
      } else {
        reports.push_back({{"task", tasks[i].label()}, {"error", outcome.error}, {"pass", false}});
      }
    } else if (outcome.report) {
      write_report(out, *outcome.report);
    } else {
      out << "task: " << tasks[i].label() << "\n  error: " << outcome.error << "\n  FAIL\n";
    }
  }
  if (json) {
    out << nlohmann::json{{"reports", reports}, {"passed", passed}, {"total", tasks.size()}}.dump() << '\n';
  } else {
    out << "passed " << passed << '/' << tasks.size() << '\n';
  }
  return passed == tasks.size() ? kExitPass : kExitVerificationFailure;
}

struct StieltjesOptions {
  std::string g_text;
  std::string phi_text;
  std::string from_text;
  std::string to_text;
  bool bv = false;
  bool json = false;
  RefinementScheme scheme{};
};

inline int cmd_stieltjes(const StieltjesOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const Expression g = parse(opts.g_text, {"x"});
    const Expression phi = parse(opts.phi_text, {"x"});
    const double u = parse_real_literal(opts.from_text);
    const double v = parse_real_literal(opts.to_text);
    const RsResult r =
        rs_integral(g, phi, u, v, opts.scheme, opts.bv ? Integrator::bounded_variation : Integrator::screened);
    if (opts.json) {
      nlohmann::json j{{"value", r.value}, {"level", r.level}, {"panels", r.panels}};
      if (r.total_variation) j["total_variation"] = *r.total_variation;
      out << j.dump() << '\n';
    } else {
      out << "value " << format_real(r.value) << '\n';
      out << "level " << r.level << " (" << r.panels << " panels)\n";
      if (r.total_variation) out << "total_variation " << format_real(*r.total_variation) << '\n';
    }
    return kExitPass;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace invint
