#pragma once

// Periodic orbits from simple zeros of the first non-vanishing averaged
// function g_l, with optional confirmation on the full system.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "strobo/averaging/recursion.hpp"
#include "strobo/errors.hpp"
#include "strobo/flow/displacement.hpp"
#include "strobo/sysdsl/system.hpp"

namespace strobo {

struct OrbitConfig {
  std::size_t steps = 2000;
  std::size_t max_iterations = 50;
  double tolerance = 1e-10;
  /// Jacobians with sigma_min <= singular_ratio * sigma_max count as singular.
  double singular_ratio = 1e-12;
  /// When set, the zero is continued to the full system at this eps.
  std::optional<double> validation_eps;
  /// Steps for the independent plain-RK4 periodicity check; 0 means 2 * steps.
  std::size_t validation_steps = 0;
  double validation_tolerance = 1e-13;
};

struct OrbitValidation {
  double eps = 0.0;
  std::vector<double> initial_condition;
  std::size_t iterations = 0;
  bool converged = false;
  /// |Delta(z, eps)| at the corrected point, from the jet-carrying integration.
  double map_residual = 0.0;
  /// |x(T) - x(0)| from a separate double-precision simulation.
  double periodicity_residual = 0.0;
};

struct OrbitReport {
  std::size_t ell = 1;
  std::vector<double> initial_guess;
  std::vector<double> zero;
  std::vector<double> g_value;
  /// jacobian[c][i] = d g_c / d z_i at the zero.
  std::vector<std::vector<double>> jacobian;
  double residual = 0.0;
  std::size_t iterations = 0;
  std::vector<double> residual_trace;
  /// max |g_i| over i < l at the initial guess.
  double hypothesis_residual = 0.0;
  std::optional<OrbitValidation> validation;
};

namespace detail {

struct AveragedAt {
  Eigen::VectorXd value;
  Eigen::MatrixXd jacobian;
  double lower_levels = 0.0;
};

inline AveragedAt averaged_at(const SystemSpec& sys, std::size_t ell, const Eigen::VectorXd& z,
                              std::size_t steps) {
  const SystemSpec truncated = sys.with_order(ell);
  std::vector<double> zv(z.data(), z.data() + z.size());
  auto f = integrate_displacement(truncated, zv, static_cast<unsigned>(ell), steps);
  auto g = averaged_from_melnikov(f, sys.period);
  const std::size_t n = sys.dim;
  AveragedAt out{Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
  const auto& d1 = g.deriv(ell, 1);
  for (std::size_t c = 0; c < n; ++c) {
    out.value(c) = g.value(ell)[c];
    for (std::size_t i = 0; i < n; ++i) out.jacobian(c, i) = d1.entry_at(i)[c];
  }
  for (std::size_t i = 1; i < ell; ++i) {
    for (double v : g.value(i)) out.lower_levels = std::max(out.lower_levels, std::abs(v));
  }
  return out;
}

inline bool is_singular(const Eigen::MatrixXd& J, double ratio) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
  const auto& sv = svd.singularValues();
  const double smax = sv.maxCoeff();
  return !(smax > 0.0) || !(sv.minCoeff() > ratio * smax);
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace detail

/// Newton on the time-T displacement Delta(., eps) of the full system starting
/// from `start`, then an independent plain simulation of the corrected point.
inline OrbitValidation validate_orbit(const SystemSpec& sys, double eps, const std::vector<double>& start,
                                      const OrbitConfig& cfg = {}) {
  const std::size_t n = sys.dim;
  OrbitValidation v;
  v.eps = eps;
  Eigen::VectorXd z = Eigen::Map<const Eigen::VectorXd>(start.data(), static_cast<Eigen::Index>(n));
  auto evaluate = [&](const Eigen::VectorXd& at, Eigen::VectorXd& delta, Eigen::MatrixXd& jac) {
    std::vector<TruncatedSeries> x0;
    for (std::size_t j = 0; j < n; ++j) x0.push_back(TruncatedSeries::variable(n, 1, j, at(j)));
    auto xT = time_map(sys, eps, x0, cfg.steps);
    delta.resize(n);
    jac.resize(n, n);
    for (std::size_t c = 0; c < n; ++c) {
      delta(c) = xT[c].constant_term() - at(c);
      for (std::size_t i = 0; i < n; ++i) {
        MultiIndex e(n, 0);
        e[i] = 1;
        jac(c, i) = xT[c].coefficient(e) - (c == i ? 1.0 : 0.0);
      }
    }
  };
  Eigen::VectorXd delta;
  Eigen::MatrixXd jac;
  evaluate(z, delta, jac);
  for (; v.iterations < cfg.max_iterations; ++v.iterations) {
    if (delta.lpNorm<Eigen::Infinity>() <= cfg.validation_tolerance) {
      v.converged = true;
      break;
    }
    const Eigen::VectorXd step = jac.fullPivLu().solve(-delta);
    z += step;
    evaluate(z, delta, jac);
    if (step.lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + z.lpNorm<Eigen::Infinity>())) {
      v.converged = true;
      ++v.iterations;
      break;
    }
  }
  v.initial_condition = detail::to_std(z);
  v.map_residual = delta.lpNorm<Eigen::Infinity>();
  const std::size_t steps = cfg.validation_steps == 0 ? 2 * cfg.steps : cfg.validation_steps;
  auto xT = time_map(sys, eps, v.initial_condition, steps);
  for (std::size_t c = 0; c < n; ++c) {
    v.periodicity_residual = std::max(v.periodicity_residual, std::abs(xT[c] - v.initial_condition[c]));
  }
  return v;
}

/// Newton iteration on g_l with the recursion-derived Jacobian. Throws
/// OrbitError on a singular Jacobian or when the iteration does not converge.
inline OrbitReport find_periodic_orbit(const SystemSpec& sys, std::size_t ell,
                                       const std::vector<double>& guess, const OrbitConfig& cfg = {}) {
  if (ell < 1 || ell > sys.order) {
    throw StructuralError("averaged level l must satisfy 1 <= l <= k (got l=" + std::to_string(ell) + ")");
  }
  if (guess.size() != sys.dim) throw StructuralError("initial guess has wrong dimension");
  OrbitReport rep;
  rep.ell = ell;
  rep.initial_guess = guess;
  Eigen::VectorXd z = Eigen::Map<const Eigen::VectorXd>(guess.data(), static_cast<Eigen::Index>(guess.size()));
  auto cur = detail::averaged_at(sys, ell, z, cfg.steps);
  rep.hypothesis_residual = cur.lower_levels;
  double res = cur.value.lpNorm<Eigen::Infinity>();
  rep.residual_trace.push_back(res);
  for (std::size_t it = 0;; ++it) {
    if (detail::is_singular(cur.jacobian, cfg.singular_ratio)) {
      throw OrbitError(OrbitError::Kind::degenerate_zero, rep.residual_trace,
                       "averaged function has a singular Jacobian at iterate " + std::to_string(it));
    }
    if (res <= cfg.tolerance) {
      rep.iterations = it;
      break;
    }
    if (it == cfg.max_iterations) {
      throw OrbitError(OrbitError::Kind::no_convergence, rep.residual_trace,
                       "Newton iteration did not converge in " + std::to_string(it) + " iterations");
    }
    const Eigen::VectorXd step = cur.jacobian.fullPivLu().solve(-cur.value);
    double lambda = 1.0;
    Eigen::VectorXd trial = z + step;
    auto next = detail::averaged_at(sys, ell, trial, cfg.steps);
    double next_res = next.value.lpNorm<Eigen::Infinity>();
    for (int halvings = 0; !(next_res <= res) && halvings < 30; ++halvings) {
      lambda *= 0.5;
      trial = z + lambda * step;
      next = detail::averaged_at(sys, ell, trial, cfg.steps);
      next_res = next.value.lpNorm<Eigen::Infinity>();
    }
    z = trial;
    cur = std::move(next);
    res = next_res;
    rep.residual_trace.push_back(res);
  }
  rep.zero = detail::to_std(z);
  rep.g_value = detail::to_std(cur.value);
  rep.residual = res;
  for (Eigen::Index c = 0; c < cur.jacobian.rows(); ++c) {
    rep.jacobian.emplace_back(static_cast<std::size_t>(cur.jacobian.cols()));
    for (Eigen::Index i = 0; i < cur.jacobian.cols(); ++i) rep.jacobian.back()[i] = cur.jacobian(c, i);
  }

  if (cfg.validation_eps) {
    rep.validation = validate_orbit(sys, *cfg.validation_eps, rep.zero, cfg);
  }
  return rep;
}

}  // namespace strobo
