#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "strobo/sysdsl/system.hpp"
#include "strobo/tpsa/series.hpp"

namespace strobo::testing {

inline TruncatedSeries random_series(std::mt19937_64& rng, std::size_t n, unsigned d, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  TruncatedSeries s = TruncatedSeries::zero(n, d);
  for (double& c : s.coefficients()) c = dist(rng);
  return s;
}

inline std::vector<double> random_point(std::mt19937_64& rng, std::size_t n, double box = 1.0) {
  std::uniform_real_distribution<double> dist(-box, box);
  std::vector<double> p(n);
  for (double& v : p) v = dist(rng);
  return p;
}

inline double rel_err(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

/// Every multi-index of length n with total degree <= d, by brute-force counting.
inline std::vector<MultiIndex> all_multi_indices(std::size_t n, unsigned d) {
  std::vector<MultiIndex> out;
  MultiIndex a(n, 0);
  while (true) {
    unsigned tot = 0;
    for (unsigned v : a) tot += v;
    if (tot <= d) out.push_back(a);
    std::size_t i = 0;
    while (i < n && a[i] == d) a[i++] = 0;
    if (i == n) break;
    ++a[i];
  }
  return out;
}

/// A system document with the given fields (key = eps power).
inline std::string system_json(const std::string& name, std::size_t dim, const std::string& period,
                               std::size_t order,
                               const std::vector<std::pair<int, std::vector<std::string>>>& fields) {
  nlohmann::json f = nlohmann::json::object();
  for (const auto& [i, comps] : fields) f[std::to_string(i)] = comps;
  nlohmann::json doc{{"name", name}, {"dim", dim}, {"period", period}, {"order", order}, {"fields", f}};
  return doc.dump();
}

inline SystemSpec make_system(std::size_t dim, const std::string& period, std::size_t order,
                              const std::vector<std::pair<int, std::vector<std::string>>>& fields) {
  return parse_system(system_json("test", dim, period, order, fields));
}

/// Random trigonometric-polynomial field component in x1..xn: a sum of terms
/// c * (cos|sin)(q t) * x_j^p.
inline std::string random_trig_component(std::mt19937_64& rng, std::size_t n, int terms = 3) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_int_distribution<int> harmonic(0, 2), var(1, static_cast<int>(n)), power(0, 2), fn(0, 1);
  std::string out;
  for (int k = 0; k < terms; ++k) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s%.6f*%s(%d*t)*x%d^%d", k ? " + " : "", coef(rng), fn(rng) ? "cos" : "sin",
                  harmonic(rng), var(rng), power(rng));
    out += buf;
  }
  return out;
}

}  // namespace strobo::testing
