#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <type_traits>
#include <vector>

#include "strobo/errors.hpp"
#include "strobo/flow/graded.hpp"
#include "strobo/flow/rk4.hpp"
#include "strobo/sysdsl/expr.hpp"
#include "strobo/sysdsl/system.hpp"
#include "strobo/tpsa/multilinear.hpp"

namespace strobo {

/// Values and derivative tensors of a family of functions h_1..h_k at a base point.
/// derivs[i-1][m] is the arity-m derivative of h_i; arity 0 is the value.
struct JetTable {
  std::vector<double> base_point;
  std::vector<std::vector<MultilinearMap<double>>> derivs;

  std::size_t order() const noexcept { return derivs.size(); }
  std::size_t dim() const noexcept { return base_point.size(); }
  const std::vector<double>& value(std::size_t i) const { return deriv(i, 0).value(); }
  const MultilinearMap<double>& deriv(std::size_t i, std::size_t m) const {
    if (i < 1 || i > derivs.size()) throw StructuralError("level " + std::to_string(i) + " out of range");
    if (m >= derivs[i - 1].size()) {
      throw StructuralError("arity " + std::to_string(m) + " not available at level " +
                            std::to_string(i));
    }
    return derivs[i - 1][m];
  }
  std::size_t max_arity(std::size_t i) const { return derivs.at(i - 1).size() - 1; }
};

/// f_i(z) and d^m f_i(z), with Delta(z, eps) = sum_i eps^i f_i(z) + O(eps^(k+1)).
struct MelnikovTable : JetTable {};

/// sum_{i} eps^i F_i(t, x) over the graded algebra.
inline EpsGradedState graded_rhs(const SystemSpec& s, double t, const EpsGradedState& x) {
  const std::size_t k = x.eps_order();
  const TruncatedSeries zero = zero_like(x[0][0]);
  std::vector<GradedSeries> out(s.dim, GradedSeries(k, zero));
  for (const auto& [i, comps] : s.fields) {
    if (i > k) continue;
    std::vector<GradedSeries> xi;
    xi.reserve(s.dim);
    for (const auto& c : x.components()) xi.push_back(c.truncated_eps(k - i));
    for (std::size_t c = 0; c < s.dim; ++c) {
      GradedSeries v = eval_ast<GradedSeries>(*comps[c], t, xi);
      out[c] += v.shifted(i, k);
    }
  }
  return EpsGradedState(std::move(out));
}

/// Integrates x' = sum eps^i F_i(t, x), x(0) = z0 + dz, over [0, T] with
/// `steps` RK4 steps and returns the eps^1..eps^k components of
/// Delta = x(T) - (z0 + dz) as series of spatial order d.
inline std::vector<std::vector<TruncatedSeries>> displacement_jets(const SystemSpec& s,
                                                                   std::span<const double> z0,
                                                                   unsigned spatial_order,
                                                                   std::size_t steps) {
  if (steps < 1) throw StructuralError("steps must be at least 1");
  if (z0.size() != s.dim) throw StructuralError("base point has wrong dimension");
  const std::size_t k = s.order;
  EpsGradedState init = EpsGradedState::initial(z0, spatial_order, k);
  std::vector<GradedSeries> x = init.components();
  auto rhs = [&](double t, const std::vector<GradedSeries>& state) {
    return graded_rhs(s, t, EpsGradedState(state)).components();
  };
  rk4_integrate(rhs, 0.0, s.period, steps, x, [](std::size_t step, const std::vector<GradedSeries>& st) {
    for (const auto& c : st) {
      if (!c.all_finite()) throw IntegrationError(step);
    }
  });
  std::vector<std::vector<TruncatedSeries>> out(k);
  for (std::size_t i = 1; i <= k; ++i) {
    for (std::size_t j = 0; j < s.dim; ++j) out[i - 1].push_back(x[j][i]);
  }
  return out;
}

/// Melnikov functions at z0 with derivative arities m = 0..(d + 1 - i).
/// Requires d >= k - 1 so every level carries at least its value.
inline MelnikovTable integrate_displacement(const SystemSpec& s, std::span<const double> z0,
                                            unsigned spatial_order, std::size_t steps) {
  const std::size_t k = s.order;
  if (spatial_order + 1 < k) {
    throw StructuralError("spatial order " + std::to_string(spatial_order) +
                          " cannot carry eps order " + std::to_string(k) + " (need >= " +
                          std::to_string(k - 1) + ")");
  }
  auto jets = displacement_jets(s, z0, spatial_order, steps);
  MelnikovTable table;
  table.base_point.assign(z0.begin(), z0.end());
  for (std::size_t i = 1; i <= k; ++i) {
    table.derivs.push_back(extract_all(jets[i - 1], spatial_order + 1 - i));
  }
  return table;
}

inline MelnikovTable integrate_displacement(const SystemSpec& s, std::span<const double> z0) {
  return integrate_displacement(s, z0, static_cast<unsigned>(s.order - 1), 2000);
}

/// Time-T map of x' = sum eps^i F_i(t, x) for a numeric eps over algebra A
/// (double for plain simulation, TruncatedSeries for Jacobians).
template <class A>
std::vector<A> time_map(const SystemSpec& s, double eps, std::vector<A> x, std::size_t steps) {
  if (steps < 1) throw StructuralError("steps must be at least 1");
  auto rhs = [&](double t, const std::vector<A>& state) {
    std::vector<A> out;
    out.reserve(s.dim);
    for (std::size_t c = 0; c < s.dim; ++c) out.push_back(lift(state[0], 0.0));
    double epow = 1.0;
    for (std::size_t i = 1; i <= s.order; ++i) {
      epow *= eps;
      const auto* f = s.field(i);
      if (!f) continue;
      for (std::size_t c = 0; c < s.dim; ++c) {
        detail::axpy(out[c], eval_ast<A>(*(*f)[c], t, state), epow);
      }
    }
    return out;
  };
  rk4_integrate(rhs, 0.0, s.period, steps, x, [](std::size_t step, const std::vector<A>& st) {
    for (const auto& c : st) {
      if constexpr (std::is_same_v<A, double>) {
        if (!std::isfinite(c)) throw IntegrationError(step);
      } else {
        if (!c.all_finite()) throw IntegrationError(step);
      }
    }
  });
  return x;
}

}  // namespace strobo
