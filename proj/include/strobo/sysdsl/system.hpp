#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "strobo/errors.hpp"
#include "strobo/sysdsl/expr.hpp"

namespace strobo {

/// A T-periodic family x' = sum_{i=1..k} eps^i F_i(t, x) on R^n.
struct SystemSpec {
  std::string name;
  std::size_t dim = 1;
  double period = 0.0;
  std::string period_text;
  std::size_t order = 1;
  /// fields[i] holds the dim components of F_i; absent i means F_i = 0.
  std::map<std::size_t, std::vector<ExprPtr>> fields;

  const std::vector<ExprPtr>* field(std::size_t i) const {
    auto it = fields.find(i);
    return it == fields.end() ? nullptr : &it->second;
  }

  /// Copy with the truncation order replaced. Fields above the new order are
  /// dropped since they cannot contribute below eps^(order+1).
  SystemSpec with_order(std::size_t new_order) const {
    if (new_order < 1) throw StructuralError("order must be at least 1");
    SystemSpec s = *this;
    s.order = new_order;
    for (auto it = s.fields.begin(); it != s.fields.end();) {
      it = it->first > new_order ? s.fields.erase(it) : std::next(it);
    }
    return s;
  }
};

namespace detail {

inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

[[noreturn]] inline void schema_error(const std::string& context, const std::string& msg,
                                      ParseError::Kind kind = ParseError::Kind::schema) {
  throw ParseError(kind, context, 1, 1, msg);
}

inline std::size_t positive_integer(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key)) schema_error(key, "missing required key");
  const auto& v = doc.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1) schema_error(key, "must be a positive integer");
  return v.get<std::size_t>();
}

}  // namespace detail

/// Parses a system document (JSON). See docs/system-format.md.
inline SystemSpec parse_system(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, col] = detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError(ParseError::Kind::syntax, "document", line, col, e.what());
  }
  if (!doc.is_object()) detail::schema_error("document", "top level must be an object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "name" && key != "dim" && key != "period" && key != "order" && key != "fields") {
      detail::schema_error(key, "unknown key");
    }
  }

  SystemSpec s;
  if (!doc.contains("name") || !doc["name"].is_string()) detail::schema_error("name", "must be a string");
  s.name = doc["name"].get<std::string>();
  s.dim = detail::positive_integer(doc, "dim");
  s.order = detail::positive_integer(doc, "order");

  if (!doc.contains("period")) detail::schema_error("period", "missing required key");
  const auto& period = doc["period"];
  if (period.is_string()) {
    s.period_text = period.get<std::string>();
  } else if (period.is_number()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", period.get<double>());
    s.period_text = buf;
  } else {
    detail::schema_error("period", "must be an expression string or a number");
  }
  auto period_expr = parse_expression(s.period_text, s.dim, "period");
  if (!period_expr->is_constant()) {
    detail::schema_error("period", "must not depend on t or the state", ParseError::Kind::period);
  }
  s.period = eval_real(*period_expr, 0.0, {});
  if (!(s.period > 0.0) || !std::isfinite(s.period)) {
    detail::schema_error("period", "must be positive and finite", ParseError::Kind::period);
  }

  if (!doc.contains("fields") || !doc["fields"].is_object()) {
    detail::schema_error("fields", "must be an object mapping eps powers to component arrays");
  }
  for (const auto& [key, comps] : doc["fields"].items()) {
    const std::string ctx = "fields." + key;
    std::size_t power = 0;
    auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), power);
    if (ec != std::errc() || ptr != key.data() + key.size()) {
      detail::schema_error(ctx, "eps power must be an integer", ParseError::Kind::eps_power);
    }
    if (power < 1 || power > s.order) {
      detail::schema_error(ctx, "eps power outside 1.." + std::to_string(s.order),
                           ParseError::Kind::eps_power);
    }
    if (!comps.is_array() || comps.size() != s.dim) {
      detail::schema_error(ctx, "expected an array of " + std::to_string(s.dim) + " expressions",
                           ParseError::Kind::arity);
    }
    std::vector<ExprPtr> parsed;
    for (std::size_t c = 0; c < comps.size(); ++c) {
      const std::string cctx = ctx + "[" + std::to_string(c) + "]";
      if (!comps[c].is_string()) detail::schema_error(cctx, "component must be an expression string");
      parsed.push_back(parse_expression(comps[c].get<std::string>(), s.dim, cctx));
    }
    s.fields.emplace(power, std::move(parsed));
  }
  return s;
}

inline SystemSpec load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open system file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_system(buf.str());
}

/// Inverse of parse_system up to whitespace and number formatting.
inline nlohmann::json system_to_json(const SystemSpec& s) {
  nlohmann::json fields = nlohmann::json::object();
  for (const auto& [i, comps] : s.fields) {
    auto arr = nlohmann::json::array();
    for (const auto& c : comps) arr.push_back(print_expression(*c));
    fields[std::to_string(i)] = arr;
  }
  return {{"name", s.name}, {"dim", s.dim}, {"period", s.period_text},
          {"order", s.order}, {"fields", fields}};
}

/// F_i(t, x) over reals.
inline std::vector<double> eval_field(const SystemSpec& s, std::size_t i, double t,
                                      std::span<const double> x) {
  std::vector<double> out(s.dim, 0.0);
  if (const auto* f = s.field(i)) {
    for (std::size_t c = 0; c < s.dim; ++c) out[c] = eval_real(*(*f)[c], t, x);
  }
  return out;
}

struct PeriodicityViolation {
  std::size_t eps_power;
  std::size_t component;
  std::vector<double> point;
  double time;
  double at_time;
  double one_period_later;
};

struct PeriodicityReport {
  std::size_t samples = 0;
  double tolerance = 0.0;
  std::vector<PeriodicityViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Samples |F_i(t,x) - F_i(t+T,x)| at t = 0 and random t in [0, T), x in [-box, box]^n. Violations are
/// reported, never thrown.
inline PeriodicityReport check_periodicity(const SystemSpec& s, std::size_t samples = 32,
                                           double tol = 1e-9, std::uint64_t seed = 0,
                                           double box = 1.0) {
  if (samples < 1) throw StructuralError("periodicity check needs at least one sample");
  PeriodicityReport rep;
  rep.samples = samples;
  rep.tolerance = tol;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-box, box);
  std::uniform_real_distribution<double> phase(0.0, s.period);
  std::vector<double> x(s.dim);
  for (std::size_t k = 0; k < samples; ++k) {
    for (double& v : x) v = dist(rng);
    const double t = k == 0 ? 0.0 : phase(rng);
    for (const auto& [i, comps] : s.fields) {
      for (std::size_t c = 0; c < s.dim; ++c) {
        const double a = eval_real(*comps[c], t, x);
        const double b = eval_real(*comps[c], t + s.period, x);
        if (!(std::abs(a - b) <= tol * (1.0 + std::abs(a)))) {
          rep.violations.push_back({i, c, x, t, a, b});
        }
      }
    }
  }
  return rep;
}

}  // namespace strobo
