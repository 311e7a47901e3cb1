#pragma once

// Conversion between Melnikov functions f_i (coefficients of the time-T
// displacement) and stroboscopic averaged functions g_i (coefficients of the
// averaged vector field), through the Bell-polynomial recursion
//
//   g_i = (1/T) (f_i - sum_{j<i} sum_{m<=j} (1/j!) d^m g_{i-j} int_0^T B_{j,m}(y_1..y_{j-m+1}))
//   y_1 = t g_1,
//   y_i = i! t g_i + sum_{j<i} sum_{m<=j} (i!/j!) d^m g_{i-j} int_0^t B_{j,m}(y_1..y_{j-m+1}).
//
// Every quantity is carried as a truncated series in the displacement dz from
// the base point, so derivatives of g_i come out of the same recursion that
// produces the values.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "strobo/bell/bell_apply.hpp"
#include "strobo/bell/time_poly.hpp"
#include "strobo/errors.hpp"
#include "strobo/flow/displacement.hpp"
#include "strobo/tpsa/multilinear.hpp"
#include "strobo/tpsa/series.hpp"

namespace strobo {

/// g_i(z), d^m g_i(z) and the time polynomials y_i(., z).
struct AveragedTable : JetTable {
  double period = 0.0;
  std::vector<TimePoly<double>> ytilde;
};

/// Series-level working state of the recursion. g[i-1] holds the n
/// components of g_i around the base point; ytilde[i-1] holds y_i.
struct AveragingJets {
  std::size_t dim = 0;
  double period = 0.0;
  std::vector<std::vector<TruncatedSeries>> g;
  std::vector<TimePoly<TruncatedSeries>> ytilde;
};

struct RecursionOptions {
  /// When nonzero, assume g_1 = ... = g_{l-1} = 0 and sum only j <= i - l.
  std::size_t reduced_ell = 0;
};

namespace detail {

inline double factorial(std::size_t n) {
  double f = 1.0;
  for (std::size_t q = 2; q <= n; ++q) f *= static_cast<double>(q);
  return f;
}

/// Spatial order reachable at each level: r_1 = arity_1, r_i = min(arity_i, r_{i-1} - 1).
inline std::vector<unsigned> level_orders(const JetTable& t) {
  std::vector<unsigned> r;
  for (std::size_t i = 1; i <= t.order(); ++i) {
    long avail = static_cast<long>(t.max_arity(i));
    if (i > 1) avail = std::min(avail, static_cast<long>(r.back()) - 1);
    if (avail < 0) {
      throw StructuralError("level " + std::to_string(i) + " needs derivative arity " +
                            std::to_string(t.order() - 1) + " at level 1 but only " +
                            std::to_string(t.max_arity(1)) + " is available");
    }
    r.push_back(static_cast<unsigned>(avail));
  }
  return r;
}

inline std::vector<TruncatedSeries> truncate_all(const std::vector<TruncatedSeries>& v, unsigned r) {
  std::vector<TruncatedSeries> out;
  out.reserve(v.size());
  for (const auto& s : v) out.push_back(s.truncated(r));
  return out;
}

inline TimePoly<TruncatedSeries> truncate_poly(const TimePoly<TruncatedSeries>& p, unsigned r) {
  const TruncatedSeries zero = TruncatedSeries::zero(p.zero_scalar().num_vars(), r);
  return p.map([r](const TruncatedSeries& s) { return s.truncated(r); }, zero);
}

inline std::vector<MultilinearMap<double>> leading_maps(const JetTable& t, std::size_t i, unsigned r) {
  const auto& all = t.derivs[i - 1];
  return {all.begin(), all.begin() + r + 1};
}

}  // namespace detail

/// sum_{j=1..j_max} sum_{m=1..j} (1/j!) d^m g_{i-j}[B_{j,m}(y_1, ..., y_{j-m+1})](t)
/// at spatial order r. Needs g_1..g_{i-1} and y_1..y_{i-1}.
inline TimePoly<TruncatedSeries> bell_sum(std::size_t i, const AveragingJets& jets, unsigned r,
                                          std::size_t j_max) {
  const std::size_t n = jets.dim;
  if (jets.g.size() + 1 < i || jets.ytilde.size() + 1 < i) {
    throw StructuralError("level " + std::to_string(i) + " needs g and y up to level " +
                          std::to_string(i - 1));
  }
  const TruncatedSeries zero = TruncatedSeries::zero(n, r);
  TimePoly<TruncatedSeries> acc(n, zero);
  j_max = std::min(j_max, i - 1);
  std::vector<TimePoly<TruncatedSeries>> ys;
  for (std::size_t p = 1; p <= j_max; ++p) ys.push_back(detail::truncate_poly(jets.ytilde[p - 1], r));
  for (std::size_t j = 1; j <= j_max; ++j) {
    const auto& g = jets.g[i - j - 1];
    TimePoly<TruncatedSeries> level(n, zero);
    for (std::size_t m = 1; m <= j; ++m) {
      const std::size_t width = j - m + 1;
      bool any = false;
      for (std::size_t p = 0; p < width; ++p) any = any || !ys[p].is_zero();
      if (!any) continue;
      auto L = derivative_map(g, m, r);
      level += bell_apply<TruncatedSeries>(L, std::span(ys.data(), width), zero);
    }
    acc += level * (1.0 / detail::factorial(j));
  }
  return acc;
}

/// y_i = i! (t g_i + int_0^t S_i) given the Bell sum S_i of level i.
inline TimePoly<TruncatedSeries> ytilde_from_sum(std::size_t i, const std::vector<TruncatedSeries>& g_i,
                                                 const TimePoly<TruncatedSeries>& sum) {
  const auto zero = zero_like(g_i.front());
  auto y = TimePoly<TruncatedSeries>::monomial(1, g_i, zero) + sum.integral();
  return y * detail::factorial(i);
}

/// y_i from the recursion; needs g_1..g_i and y_1..y_{i-1} in `jets`.
inline TimePoly<TruncatedSeries> compute_ytilde(std::size_t i, const AveragingJets& jets) {
  if (i < 1 || jets.g.size() < i) throw StructuralError("compute_ytilde needs g up to level " + std::to_string(i));
  const auto& g_i = jets.g[i - 1];
  const unsigned r = g_i.front().max_order();
  return ytilde_from_sum(i, g_i, bell_sum(i, jets, r, i - 1));
}

inline AveragingJets averaging_jets(const MelnikovTable& f, double period, RecursionOptions opts = {}) {
  if (!(period > 0.0)) throw StructuralError("period must be positive");
  const auto orders = detail::level_orders(f);
  AveragingJets jets;
  jets.dim = f.dim();
  jets.period = period;
  for (std::size_t i = 1; i <= f.order(); ++i) {
    const unsigned r = orders[i - 1];
    const auto maps = detail::leading_maps(f, i, r);
    auto fi = series_from_multilinear(maps);
    const std::size_t j_max = opts.reduced_ell == 0 ? i - 1 : (i > opts.reduced_ell ? i - opts.reduced_ell : 0);
    auto sum = bell_sum(i, jets, r, j_max);
    auto integral = sum.integrate_to(period);
    std::vector<TruncatedSeries> gi;
    for (std::size_t c = 0; c < fi.size(); ++c) gi.push_back((fi[c] - integral[c]) * (1.0 / period));
    jets.ytilde.push_back(ytilde_from_sum(i, gi, sum));
    jets.g.push_back(std::move(gi));
  }
  return jets;
}

inline AveragedTable table_from_jets(const AveragingJets& jets, std::span<const double> base_point) {
  AveragedTable t;
  t.period = jets.period;
  t.base_point.assign(base_point.begin(), base_point.end());
  for (std::size_t i = 0; i < jets.g.size(); ++i) {
    t.derivs.push_back(extract_all(jets.g[i], jets.g[i].front().max_order()));
    t.ytilde.push_back(jets.ytilde[i].map([](const TruncatedSeries& s) { return s.constant_term(); }, 0.0));
  }
  return t;
}

/// Averaged functions g_1..g_k (with derivatives) from Melnikov functions.
inline AveragedTable averaged_from_melnikov(const MelnikovTable& f, double period,
                                            RecursionOptions opts = {}) {
  return table_from_jets(averaging_jets(f, period, opts), f.base_point);
}

/// Melnikov functions from averaged functions: the recursion solved for f_i.
inline MelnikovTable melnikov_from_averaged(const AveragedTable& g, double period) {
  if (!(period > 0.0)) throw StructuralError("period must be positive");
  const auto orders = detail::level_orders(g);
  AveragingJets jets;
  jets.dim = g.dim();
  jets.period = period;
  MelnikovTable out;
  out.base_point = g.base_point;
  for (std::size_t i = 1; i <= g.order(); ++i) {
    const unsigned r = orders[i - 1];
    auto gi = series_from_multilinear(detail::leading_maps(g, i, r));
    auto sum = bell_sum(i, jets, r, i - 1);
    auto integral = sum.integrate_to(period);
    std::vector<TruncatedSeries> fi;
    for (std::size_t c = 0; c < gi.size(); ++c) fi.push_back(gi[c] * period + integral[c]);
    out.derivs.push_back(extract_all(fi, r));
    jets.ytilde.push_back(ytilde_from_sum(i, gi, sum));
    jets.g.push_back(std::move(gi));
  }
  return out;
}

}  // namespace strobo
