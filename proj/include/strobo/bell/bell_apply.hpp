#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "strobo/bell/partitions.hpp"
#include "strobo/bell/time_poly.hpp"
#include "strobo/errors.hpp"
#include "strobo/tpsa/multilinear.hpp"

namespace strobo {

namespace detail {

// Scalar polynomials in t as plain coefficient vectors (may carry trailing zeros).
template <class S>
using ScalarPoly = std::vector<S>;

template <class S>
void poly_accumulate_product(ScalarPoly<S>& acc, const ScalarPoly<S>& a, const ScalarPoly<S>& b,
                             const S& zero) {
  if (a.empty() || b.empty()) return;
  if (acc.size() < a.size() + b.size() - 1) acc.resize(a.size() + b.size() - 1, zero);
  for (std::size_t p = 0; p < a.size(); ++p) {
    for (std::size_t q = 0; q < b.size(); ++q) acc[p + q] += a[p] * b[q];
  }
}

// Component c of a time polynomial as a scalar polynomial.
template <class S>
ScalarPoly<S> component(const TimePoly<S>& y, std::size_t c) {
  ScalarPoly<S> out;
  out.reserve(y.coefficients().size());
  for (const auto& v : y.coefficients()) out.push_back(v[c]);
  return out;
}

}  // namespace detail

/// L[y_1(t), ..., y_m(t)] for time polynomials, expanded by multilinearity:
/// sum over coefficient powers p_1..p_m of t^{p_1+...+p_m} L[c_{p_1}, ..., c_{p_m}].
/// Contracts the trailing argument first, so cost is linear in the entry count.
template <class S>
TimePoly<S> apply_to_polys(const MultilinearMap<S>& L, std::span<const TimePoly<S>* const> args,
                           const S& zero) {
  const std::size_t n = L.dim();
  const std::size_t m = L.arity();
  if (args.size() != m) throw StructuralError("argument count does not match arity");
  for (const auto* a : args) {
    if (a->dim() != n) throw StructuralError("time polynomial dimension does not match map");
    if (a->is_zero()) return TimePoly<S>(n, zero);
  }
  // cur[flat][c]: scalar polynomial, flat over the leading r indices.
  std::vector<std::vector<detail::ScalarPoly<S>>> cur(L.size());
  for (std::size_t f = 0; f < L.size(); ++f) {
    for (std::size_t c = 0; c < n; ++c) cur[f].push_back({L.entry_at(f)[c]});
  }
  for (std::size_t r = m; r-- > 0;) {
    std::vector<detail::ScalarPoly<S>> comps;
    for (std::size_t i = 0; i < n; ++i) comps.push_back(detail::component(*args[r], i));
    std::vector<std::vector<detail::ScalarPoly<S>>> next(cur.size() / n,
                                                          std::vector<detail::ScalarPoly<S>>(n));
    for (std::size_t base = 0; base < next.size(); ++base) {
      for (std::size_t c = 0; c < n; ++c) {
        auto& acc = next[base][c];
        for (std::size_t i = 0; i < n; ++i) {
          detail::poly_accumulate_product(acc, cur[base * n + i][c], comps[i], zero);
        }
      }
    }
    cur = std::move(next);
  }
  std::size_t len = 0;
  for (const auto& p : cur[0]) len = std::max(len, p.size());
  std::vector<std::vector<S>> coeffs(len, std::vector<S>(n, zero));
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t p = 0; p < cur[0][c].size(); ++p) coeffs[p][c] = cur[0][c][p];
  }
  return TimePoly<S>(n, std::move(coeffs), zero);
}

/// L applied to the partial Bell polynomial B_{j,m}(y_1, ..., y_{j-m+1}) with
/// m = arity(L) and j = ys.size() + m - 1:
///   sum over partition terms of coeff * L[y_1 (b_1 times), ..., y_r (b_r times)].
/// Terms that use a zero polynomial vanish.
template <class S>
TimePoly<S> bell_apply(const MultilinearMap<S>& L, std::span<const TimePoly<S>> ys, const S& zero) {
  const unsigned m = static_cast<unsigned>(L.arity());
  if (m < 1) throw StructuralError("bell_apply needs a map of arity >= 1");
  if (ys.empty()) throw StructuralError("bell_apply needs at least one argument polynomial");
  for (const auto& y : ys) {
    if (y.dim() != L.dim()) throw StructuralError("time polynomial dimension does not match map");
  }
  const unsigned j = static_cast<unsigned>(ys.size()) + m - 1;
  TimePoly<S> result(L.dim(), zero);
  std::vector<const TimePoly<S>*> args;
  for (const auto& term : enumerate_partitions(j, m)) {
    args.clear();
    bool vanishes = false;
    for (std::size_t i = 0; i < term.counts.size(); ++i) {
      if (term.counts[i] == 0) continue;
      if (ys[i].is_zero()) {
        vanishes = true;
        break;
      }
      args.insert(args.end(), term.counts[i], &ys[i]);
    }
    if (vanishes) continue;
    result += apply_to_polys<S>(L, args, zero) * static_cast<double>(term.coefficient);
  }
  return result;
}

inline TimePoly<double> bell_apply(const MultilinearMap<double>& L, std::span<const TimePoly<double>> ys) {
  return bell_apply<double>(L, ys, 0.0);
}

}  // namespace strobo
