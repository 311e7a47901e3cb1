#pragma once

// Command dispatch behind the `strobo` executable. Exit codes: 0 pass or
// success, 1 failed verdict or failed computation, 2 usage, parse or I/O error.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "strobo/averaging/orbit.hpp"
#include "strobo/averaging/recursion.hpp"
#include "strobo/averaging/verify.hpp"
#include "strobo/bell/partitions.hpp"
#include "strobo/cli/report.hpp"
#include "strobo/errors.hpp"
#include "strobo/flow/displacement.hpp"
#include "strobo/sysdsl/system.hpp"

namespace strobo::cli {

enum ExitCode : int { kExitOk = 0, kExitFail = 1, kExitError = 2 };

struct RunConfig {
  std::string command;
  std::string system_path;
  std::optional<std::size_t> ell;
  std::optional<std::size_t> order;
  std::optional<unsigned> spatial_order;
  std::size_t steps = 2000;
  double tol_hypothesis = 1e-8;
  double tol_identity = 1e-7;
  double tol_closure = 1e-6;
  /// Explicit sample points; when empty, `samples` points are drawn uniformly
  /// from [-box, box]^n with a generator seeded by `seed`.
  std::vector<std::vector<double>> points;
  std::size_t samples = 3;
  std::uint64_t seed = 0;
  double box = 1.0;
  std::vector<double> guess;
  std::optional<double> eps;
  std::size_t max_iterations = 50;
  double newton_tolerance = 1e-10;
  unsigned bell_j = 0;
  unsigned bell_m = 0;
  /// Report path; empty writes the report to the output stream.
  std::string out;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Sample points for `cfg`: the explicit list, or a seeded uniform draw. The
/// draw maps raw 64-bit generator output to [0,1) by hand so that the points do
/// not depend on the standard library's distribution implementation.
inline std::vector<std::vector<double>> resolve_points(const RunConfig& cfg, std::size_t dim) {
  if (!cfg.points.empty()) {
    for (const auto& p : cfg.points) {
      if (p.size() != dim) {
        throw UsageError("sample point has " + std::to_string(p.size()) + " coordinates, system has " +
                         std::to_string(dim));
      }
    }
    return cfg.points;
  }
  if (!(cfg.box > 0.0)) throw UsageError("--box must be positive");
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::vector<double>> pts(cfg.samples, std::vector<double>(dim));
  for (auto& p : pts) {
    for (double& v : p) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      v = cfg.box * (2.0 * u - 1.0);
    }
  }
  return pts;
}

namespace detail {

using nlohmann::json;

inline json config_json(const RunConfig& cfg, const std::vector<std::vector<double>>& points,
                        std::size_t order, unsigned spatial_order) {
  json c;
  c["command"] = cfg.command;
  c["system_path"] = cfg.system_path;
  c["order"] = order;
  c["spatial_order"] = spatial_order;
  c["steps"] = cfg.steps;
  c["ell"] = cfg.ell ? json(*cfg.ell) : json(nullptr);
  c["tol_hypothesis"] = cfg.tol_hypothesis;
  c["tol_identity"] = cfg.tol_identity;
  c["tol_closure"] = cfg.tol_closure;
  c["samples"] = cfg.points.empty() ? cfg.samples : cfg.points.size();
  c["seed"] = cfg.seed;
  c["box"] = cfg.box;
  c["points"] = points;
  return c;
}

inline json levels_json(const JetTable& t) {
  json out = json::array();
  for (std::size_t i = 1; i <= t.order(); ++i) out.push_back(t.value(i));
  return out;
}

inline json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline SystemSpec load_for(const RunConfig& cfg) {
  if (cfg.system_path.empty()) throw UsageError("a system file is required");
  SystemSpec sys = load_system(cfg.system_path);
  if (cfg.order) sys = sys.with_order(*cfg.order);
  return sys;
}

inline unsigned spatial_order_for(const RunConfig& cfg, const SystemSpec& sys) {
  const unsigned d = cfg.spatial_order.value_or(static_cast<unsigned>(sys.order - 1));
  if (d + 1 < sys.order) {
    throw UsageError("--spatial-order must be at least order - 1 = " + std::to_string(sys.order - 1));
  }
  return d;
}

inline void add_periodicity(json& report, const SystemSpec& sys, std::ostream& err) {
  const auto per = check_periodicity(sys);
  report["summary"]["periodicity_violations"] = per.violations.size();
  if (per.ok()) return;
  const auto& v = per.violations.front();
  char msg[256];
  std::snprintf(msg, sizeof msg,
                "F_%zu component %zu is not %s-periodic: F(%.6g,x) = %.6g, F(%.6g+T,x) = %.6g (%zu violations)",
                v.eps_power, v.component + 1, sys.period_text.c_str(), v.time, v.at_time, v.time, v.one_period_later,
                per.violations.size());
  report["warnings"].push_back(msg);
  err << "strobo: warning: " << msg << "\n";
}

inline int run_table(const RunConfig& cfg, json& report, std::ostream& err) {
  const SystemSpec sys = load_for(cfg);
  const unsigned d = spatial_order_for(cfg, sys);
  const auto points = resolve_points(cfg, sys.dim);
  report["system"] = system_to_json(sys);
  report["config"] = config_json(cfg, points, sys.order, d);
  add_periodicity(report, sys, err);
  for (const auto& z : points) {
    const auto f = integrate_displacement(sys, z, d, cfg.steps);
    const auto g = averaged_from_melnikov(f, sys.period);
    report["results"].push_back({{"z", z}, {"f", levels_json(f)}, {"g", levels_json(g)}});
  }
  report["summary"]["samples"] = points.size();
  return kExitOk;
}

inline int run_verify(const RunConfig& cfg, json& report, std::ostream& err) {
  const SystemSpec sys = load_for(cfg);
  if (!cfg.ell) throw UsageError("verify needs --ell");
  const std::size_t ell = *cfg.ell;
  if (ell < 2 || ell > sys.order) {
    throw UsageError("--ell must satisfy 2 <= ell <= order (got ell=" + std::to_string(ell) +
                     ", order=" + std::to_string(sys.order) + ")");
  }
  const unsigned d = spatial_order_for(cfg, sys);
  const auto points = resolve_points(cfg, sys.dim);
  report["system"] = system_to_json(sys);
  report["config"] = config_json(cfg, points, sys.order, d);
  const auto per = check_periodicity(sys);
  if (!per.ok()) {
    add_periodicity(report, sys, err);
    throw UsageError("system is not periodic in t with the declared period; verification needs T-periodic fields");
  }
  report["summary"]["periodicity_violations"] = 0;

  VerifyConfig vc;
  vc.steps = cfg.steps;
  vc.spatial_order = d;
  vc.tol_hypothesis = cfg.tol_hypothesis;
  vc.tol_identity = cfg.tol_identity;
  vc.tol_closure = cfg.tol_closure;
  const auto rep = verify_proposition(sys, ell, points, vc);
  for (const auto& s : rep.samples) {
    json ids = json::array();
    for (const auto& id : s.identities) {
      ids.push_back({{"level", id.level}, {"residual", id.residual}, {"scaled", id.scaled}});
    }
    report["results"].push_back({{"z", s.z},
                                 {"f", s.f},
                                 {"g", s.g},
                                 {"hypothesis_f", s.hypothesis_f},
                                 {"hypothesis_g", s.hypothesis_g},
                                 {"hypothesis_f_jet", s.hypothesis_f_jet},
                                 {"hypothesis_g_jet", s.hypothesis_g_jet},
                                 {"identities", ids},
                                 {"closure", opt_json(s.closure)},
                                 {"closure_scaled", opt_json(s.closure_scaled)},
                                 {"closed_form_gap", opt_json(s.closed_form_gap)},
                                 {"closed_form_scaled", opt_json(s.closed_form_scaled)}});
  }
  auto& sum = report["summary"];
  sum["ell"] = ell;
  sum["verdict"] = rep.verdict;
  sum["hypothesis_ok"] = rep.hypothesis_ok;
  sum["identities_ok"] = rep.identities_ok;
  sum["closure_ok"] = rep.closure_ok;
  sum["closure"] = rep.closure_status();
  sum["max_hypothesis_residual"] = rep.max_hypothesis;
  sum["max_identity_residual"] = rep.max_identity;
  sum["max_closure_residual"] = opt_json(rep.max_closure);
  err << "strobo: verify ell=" << ell << ": " << rep.verdict << "\n";
  return rep.verdict == "pass" ? kExitOk : kExitFail;
}

inline int run_find_orbit(const RunConfig& cfg, json& report, std::ostream& err) {
  const SystemSpec sys = load_for(cfg);
  const std::size_t ell = cfg.ell.value_or(1);
  if (ell < 1 || ell > sys.order) {
    throw UsageError("--ell must satisfy 1 <= ell <= order (got ell=" + std::to_string(ell) + ")");
  }
  if (cfg.guess.size() != sys.dim) {
    throw UsageError("find-orbit needs --guess with " + std::to_string(sys.dim) + " coordinates");
  }
  report["system"] = system_to_json(sys);
  auto c = config_json(cfg, {}, sys.order, static_cast<unsigned>(ell));
  c.erase("points");
  c.erase("samples");
  c.erase("seed");
  c.erase("box");
  c.erase("tol_identity");
  c.erase("tol_closure");
  c["ell"] = ell;
  c["guess"] = cfg.guess;
  c["eps"] = opt_json(cfg.eps);
  c["max_iterations"] = cfg.max_iterations;
  c["newton_tolerance"] = cfg.newton_tolerance;
  report["config"] = c;
  add_periodicity(report, sys, err);

  OrbitConfig oc;
  oc.steps = cfg.steps;
  oc.max_iterations = cfg.max_iterations;
  oc.tolerance = cfg.newton_tolerance;
  oc.validation_eps = cfg.eps;
  auto& sum = report["summary"];
  try {
    const auto rep = find_periodic_orbit(sys, ell, cfg.guess, oc);
    json r{{"zero", rep.zero},
           {"g_value", rep.g_value},
           {"jacobian", rep.jacobian},
           {"residual", rep.residual},
           {"iterations", rep.iterations},
           {"residual_trace", rep.residual_trace},
           {"hypothesis_residual", rep.hypothesis_residual}};
    bool ok = true;
    if (ell > 1 && !(rep.hypothesis_residual <= cfg.tol_hypothesis)) {
      report["warnings"].push_back("lower averaged functions do not vanish at the guess; the zero of g_ell may not "
                                   "correspond to a periodic orbit");
    }
    if (rep.validation) {
      const auto& v = *rep.validation;
      r["validation"] = {{"eps", v.eps},
                         {"initial_condition", v.initial_condition},
                         {"iterations", v.iterations},
                         {"converged", v.converged},
                         {"map_residual", v.map_residual},
                         {"periodicity_residual", v.periodicity_residual}};
      ok = v.converged;
    }
    report["results"].push_back(r);
    sum["status"] = ok ? "converged" : "validation-failed";
    err << "strobo: find-orbit: " << sum["status"].get<std::string>() << "\n";
    return ok ? kExitOk : kExitFail;
  } catch (const OrbitError& e) {
    sum["status"] = OrbitError::kind_name(e.kind());
    sum["message"] = e.what();
    sum["residual_trace"] = e.residual_trace();
    err << "strobo: find-orbit: " << OrbitError::kind_name(e.kind()) << ": " << e.what() << "\n";
    return kExitFail;
  }
}

inline int run_bell_debug(const RunConfig& cfg, json& report, std::ostream& out) {
  if (cfg.bell_m < 1 || cfg.bell_m > cfg.bell_j) throw UsageError("bell-debug needs 1 <= m <= j");
  report["config"] = {{"command", cfg.command}, {"j", cfg.bell_j}, {"m", cfg.bell_m}};
  const auto terms = enumerate_partitions(cfg.bell_j, cfg.bell_m);
  out << "B_{" << cfg.bell_j << "," << cfg.bell_m << "}: " << terms.size() << " term(s)\n";
  std::uint64_t total = 0;
  for (const auto& t : terms) {
    out << "  b=(";
    for (std::size_t i = 0; i < t.counts.size(); ++i) out << (i ? "," : "") << t.counts[i];
    out << ")  coeff " << t.coefficient << "\n";
    report["results"].push_back({{"b", t.counts}, {"coefficient", t.coefficient}});
    total += t.coefficient;
  }
  report["summary"]["terms"] = terms.size();
  report["summary"]["coefficient_sum"] = total;
  return kExitOk;
}

}  // namespace detail

/// Runs one command. The report goes to cfg.out, or to `out` when cfg.out is
/// empty (bell-debug prints its table to `out` and writes JSON only with --out).
/// Diagnostics go to `err`.
inline int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  nlohmann::json report = make_report(cfg.command);
  int code = kExitError;
  try {
    if (cfg.command == "table") {
      code = detail::run_table(cfg, report, err);
    } else if (cfg.command == "verify") {
      code = detail::run_verify(cfg, report, err);
    } else if (cfg.command == "find-orbit") {
      code = detail::run_find_orbit(cfg, report, err);
    } else if (cfg.command == "bell-debug") {
      code = detail::run_bell_debug(cfg, report, out);
    } else {
      throw UsageError("unknown command '" + cfg.command + "'");
    }
    if (!cfg.out.empty()) {
      write_report(report, cfg.out);
    } else if (cfg.command != "bell-debug") {
      validate_report(report);
      out << dump_report(report);
    }
    return code;
  } catch (const IntegrationError& e) {
    err << "strobo: integration failed: " << e.what() << "\n";
    return kExitFail;
  } catch (const ParseError& e) {
    err << "strobo: parse error: " << e.what() << "\n";
  } catch (const IoError& e) {
    err << "strobo: I/O error: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    err << "strobo: error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "strobo: error: " << e.what() << "\n";
  }
  return kExitError;
}

}  // namespace strobo::cli
