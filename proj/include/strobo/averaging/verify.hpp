#pragma once

// Executable check of the relationship between Melnikov and averaged functions
// when the first l-1 of them vanish: f_i = T g_i for l <= i <= 2l-1, and
// f_2l = T g_2l + (T^2/2) dg_l . g_l.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "strobo/averaging/recursion.hpp"
#include "strobo/flow/displacement.hpp"
#include "strobo/sysdsl/system.hpp"

namespace strobo {

struct VerifyConfig {
  std::size_t steps = 2000;
  /// Defaults to order - 1.
  std::optional<unsigned> spatial_order;
  double tol_hypothesis = 1e-8;
  double tol_identity = 1e-7;
  double tol_closure = 1e-6;
};

struct IdentityResidual {
  std::size_t level = 0;
  /// |f_i - T g_i|
  double residual = 0.0;
  /// residual / (1 + |f_i|)
  double scaled = 0.0;
};

struct SampleVerification {
  std::vector<double> z;
  std::vector<std::vector<double>> f;  // f_1..f_k values
  std::vector<std::vector<double>> g;  // g_1..g_k values
  /// max |f_i(z)| and max |g_i(z)| over i < l.
  double hypothesis_f = 0.0;
  double hypothesis_g = 0.0;
  /// Same maxima taken over every available derivative entry as well.
  double hypothesis_f_jet = 0.0;
  double hypothesis_g_jet = 0.0;
  std::vector<IdentityResidual> identities;
  /// |f_2l - T g_2l - (T^2/2) dg_l . g_l| and its (1 + |f_2l|)-scaled form.
  std::optional<double> closure;
  std::optional<double> closure_scaled;
  /// |(1/T)(f_2l - (1/2) df_l . f_l) - g_2l| and its (1 + |g_2l|)-scaled form.
  std::optional<double> closed_form_gap;
  std::optional<double> closed_form_scaled;
};

struct VerificationReport {
  std::size_t ell = 0;
  std::size_t order = 0;
  double period = 0.0;
  VerifyConfig config;
  std::vector<SampleVerification> samples;
  double max_hypothesis = 0.0;
  double max_identity = 0.0;
  std::optional<double> max_closure;
  bool closure_computable = false;
  bool hypothesis_ok = true;
  bool identities_ok = true;
  bool closure_ok = true;
  /// "pass", "fail" or "hypothesis-failed".
  std::string verdict = "pass";

  const char* closure_status() const { return closure_computable ? "checked" : "not computable at this order"; }
};

namespace detail {

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double max_abs_jet(const JetTable& t, std::size_t i) {
  double m = 0.0;
  for (const auto& L : t.derivs[i - 1]) {
    for (std::size_t f = 0; f < L.size(); ++f) m = std::max(m, max_abs(L.entry_at(f)));
  }
  return m;
}

inline std::vector<double> apply_linear(const MultilinearMap<double>& L, const std::vector<double>& v) {
  std::vector<std::vector<double>> args{v};
  return L.apply(args);
}

}  // namespace detail

/// Checks the identities at one base point given already computed tables.
inline SampleVerification check_sample(const MelnikovTable& f, const AveragedTable& g, std::size_t ell,
                                       double period) {
  const std::size_t k = f.order();
  SampleVerification s;
  s.z = f.base_point;
  for (std::size_t i = 1; i <= k; ++i) {
    s.f.push_back(f.value(i));
    s.g.push_back(g.value(i));
  }
  for (std::size_t i = 1; i < ell; ++i) {
    s.hypothesis_f = std::max(s.hypothesis_f, detail::max_abs(f.value(i)));
    s.hypothesis_g = std::max(s.hypothesis_g, detail::max_abs(g.value(i)));
    s.hypothesis_f_jet = std::max(s.hypothesis_f_jet, detail::max_abs_jet(f, i));
    s.hypothesis_g_jet = std::max(s.hypothesis_g_jet, detail::max_abs_jet(g, i));
  }
  for (std::size_t i = ell; i <= std::min(2 * ell - 1, k); ++i) {
    std::vector<double> diff = f.value(i);
    for (std::size_t c = 0; c < diff.size(); ++c) diff[c] -= period * g.value(i)[c];
    const double r = detail::max_abs(diff);
    s.identities.push_back({i, r, r / (1.0 + detail::max_abs(f.value(i)))});
  }
  if (2 * ell <= k) {
    const auto& f2l = f.value(2 * ell);
    const auto& g2l = g.value(2 * ell);
    const auto dgg = detail::apply_linear(g.deriv(ell, 1), g.value(ell));
    const auto dff = detail::apply_linear(f.deriv(ell, 1), f.value(ell));
    std::vector<double> closure(f2l.size()), gap(f2l.size());
    for (std::size_t c = 0; c < f2l.size(); ++c) {
      closure[c] = f2l[c] - period * g2l[c] - 0.5 * period * period * dgg[c];
      gap[c] = (f2l[c] - 0.5 * dff[c]) / period - g2l[c];
    }
    s.closure = detail::max_abs(closure);
    s.closure_scaled = *s.closure / (1.0 + detail::max_abs(f2l));
    s.closed_form_gap = detail::max_abs(gap);
    s.closed_form_scaled = *s.closed_form_gap / (1.0 + detail::max_abs(g2l));
  }
  return s;
}

/// Integrates the system at each sample point, runs the recursion and checks
/// hypothesis, identities and the order-2l closure.
inline VerificationReport verify_proposition(const SystemSpec& sys, std::size_t ell,
                                             const std::vector<std::vector<double>>& z_samples,
                                             const VerifyConfig& cfg = {}) {
  const std::size_t k = sys.order;
  if (ell < 2 || ell > k) {
    throw StructuralError("hypothesis index must satisfy 2 <= l <= k (got l=" + std::to_string(ell) +
                          ", k=" + std::to_string(k) + ")");
  }
  const unsigned d = cfg.spatial_order.value_or(static_cast<unsigned>(k - 1));
  VerificationReport rep;
  rep.ell = ell;
  rep.order = k;
  rep.period = sys.period;
  rep.config = cfg;
  rep.closure_computable = 2 * ell <= k;
  for (const auto& z : z_samples) {
    auto f = integrate_displacement(sys, z, d, cfg.steps);
    auto g = averaged_from_melnikov(f, sys.period);
    rep.samples.push_back(check_sample(f, g, ell, sys.period));
  }
  for (const auto& s : rep.samples) {
    const double hyp = std::min(s.hypothesis_f_jet, s.hypothesis_g_jet);
    rep.max_hypothesis = std::max(rep.max_hypothesis, std::min(s.hypothesis_f, s.hypothesis_g));
    if (!(hyp <= cfg.tol_hypothesis)) rep.hypothesis_ok = false;
    for (const auto& id : s.identities) {
      rep.max_identity = std::max(rep.max_identity, id.scaled);
      if (!(id.scaled <= cfg.tol_identity)) rep.identities_ok = false;
    }
    if (s.closure) {
      rep.max_closure = std::max(rep.max_closure.value_or(0.0), *s.closure);
      if (!(*s.closure_scaled <= cfg.tol_closure)) rep.closure_ok = false;
    }
  }
  if (!rep.hypothesis_ok) {
    rep.verdict = "hypothesis-failed";
  } else if (!rep.identities_ok || !rep.closure_ok) {
    rep.verdict = "fail";
  }
  return rep;
}

}  // namespace strobo
