#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "strobo/errors.hpp"
#include "strobo/tpsa/series.hpp"

namespace strobo {

/// Symmetric m-linear map R^n x ... x R^n -> R^n with scalar type S.
///
/// Entries are stored densely (n^m output vectors) in row-major order of the
/// input indices. Arity 0 holds a single vector, the function value.
template <class S>
class MultilinearMap {
 public:
  MultilinearMap(std::size_t arity, std::size_t dim, std::vector<std::vector<S>> entries)
      : arity_(arity), dim_(dim), entries_(std::move(entries)) {
    if (entries_.size() != count(dim, arity)) throw StructuralError("multilinear entry count");
    for (const auto& e : entries_) {
      if (e.size() != dim) throw StructuralError("multilinear entry has wrong dimension");
    }
  }

  /// Map with every entry equal to `zero` (one copy per output component).
  static MultilinearMap zeros(std::size_t arity, std::size_t dim, const S& zero) {
    return MultilinearMap(arity, dim,
                          std::vector<std::vector<S>>(count(dim, arity), std::vector<S>(dim, zero)));
  }

  std::size_t arity() const noexcept { return arity_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return entries_.size(); }

  const std::vector<S>& entry(std::span<const std::size_t> idx) const {
    return entries_[flat(idx)];
  }
  const std::vector<S>& entry_at(std::size_t flat_index) const { return entries_[flat_index]; }
  std::vector<S>& entry_at(std::size_t flat_index) { return entries_[flat_index]; }

  /// The arity-0 value.
  const std::vector<S>& value() const {
    if (arity_ != 0) throw StructuralError("value() needs an arity-0 map");
    return entries_[0];
  }

  std::size_t flat(std::span<const std::size_t> idx) const {
    if (idx.size() != arity_) throw StructuralError("index count does not match arity");
    std::size_t f = 0;
    for (std::size_t i : idx) {
      if (i >= dim_) throw StructuralError("multilinear index out of range");
      f = f * dim_ + i;
    }
    return f;
  }

  std::vector<std::size_t> unflatten(std::size_t f) const {
    std::vector<std::size_t> idx(arity_);
    for (std::size_t k = arity_; k-- > 0;) {
      idx[k] = f % dim_;
      f /= dim_;
    }
    return idx;
  }

  /// L[u_1, ..., u_m] by successive contraction of the trailing index.
  std::vector<S> apply(std::span<const std::vector<S>> args) const {
    if (args.size() != arity_) throw StructuralError("argument count does not match arity");
    for (const auto& a : args) {
      if (a.size() != dim_) throw StructuralError("argument has wrong dimension");
    }
    std::vector<std::vector<S>> cur = entries_;
    for (std::size_t r = arity_; r-- > 0;) {
      const auto& u = args[r];
      std::vector<std::vector<S>> next;
      next.reserve(cur.size() / dim_);
      for (std::size_t base = 0; base < cur.size(); base += dim_) {
        std::vector<S> acc;
        acc.reserve(dim_);
        for (std::size_t c = 0; c < dim_; ++c) {
          S sum = cur[base][c] * u[0];
          for (std::size_t i = 1; i < dim_; ++i) sum += cur[base + i][c] * u[i];
          acc.push_back(std::move(sum));
        }
        next.push_back(std::move(acc));
      }
      cur = std::move(next);
    }
    return cur.front();
  }

  static std::size_t count(std::size_t dim, std::size_t arity) {
    std::size_t c = 1;
    for (std::size_t k = 0; k < arity; ++k) c *= dim;
    return c;
  }

 private:
  std::size_t arity_;
  std::size_t dim_;
  std::vector<std::vector<S>> entries_;
};

/// Largest deviation between entries related by swapping adjacent indices.
inline double symmetry_defect(const MultilinearMap<double>& L) {
  double worst = 0.0;
  for (std::size_t f = 0; f < L.size(); ++f) {
    auto idx = L.unflatten(f);
    for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
      auto swapped = idx;
      std::swap(swapped[k], swapped[k + 1]);
      const auto& a = L.entry_at(f);
      const auto& b = L.entry(swapped);
      for (std::size_t c = 0; c < a.size(); ++c) worst = std::max(worst, std::abs(a[c] - b[c]));
    }
  }
  return worst;
}

namespace detail {

inline MultiIndex counts_of(std::span<const std::size_t> idx, std::size_t n) {
  MultiIndex alpha(n, 0);
  for (std::size_t i : idx) ++alpha[i];
  return alpha;
}

inline double multi_factorial(const MultiIndex& alpha) {
  double f = 1.0;
  for (unsigned a : alpha) {
    for (unsigned q = 2; q <= a; ++q) f *= q;
  }
  return f;
}

inline void check_components(std::span<const TruncatedSeries> comps) {
  if (comps.empty()) throw StructuralError("empty component list");
  for (const auto& c : comps) {
    if (c.num_vars() != comps.size()) {
      throw StructuralError("component series must have one variable per component");
    }
  }
}

}  // namespace detail

/// m-th derivative at dz = 0 as a symmetric multilinear map.
///
/// entries[i_1..i_m] = alpha! * c_alpha where alpha counts the occurrences of
/// each index, so that L[u, ..., u] = m! * (degree-m part evaluated at u).
inline MultilinearMap<double> extract_multilinear(std::span<const TruncatedSeries> comps,
                                                  std::size_t m) {
  detail::check_components(comps);
  const std::size_t n = comps.size();
  for (const auto& c : comps) {
    if (m > c.max_order()) {
      throw StructuralError("arity " + std::to_string(m) + " exceeds series order " +
                            std::to_string(c.max_order()));
    }
  }
  auto L = MultilinearMap<double>::zeros(m, n, 0.0);
  for (std::size_t f = 0; f < L.size(); ++f) {
    auto idx = L.unflatten(f);
    MultiIndex alpha = detail::counts_of(idx, n);
    const double scale = detail::multi_factorial(alpha);
    for (std::size_t c = 0; c < n; ++c) L.entry_at(f)[c] = scale * comps[c].coefficient(alpha);
  }
  return L;
}

/// Derivative maps of arity 0..max_arity.
inline std::vector<MultilinearMap<double>> extract_all(std::span<const TruncatedSeries> comps,
                                                       std::size_t max_arity) {
  std::vector<MultilinearMap<double>> out;
  for (std::size_t m = 0; m <= max_arity; ++m) out.push_back(extract_multilinear(comps, m));
  return out;
}

/// Inverse of extract_all: rebuilds the order-r series from maps of arity 0..r.
inline std::vector<TruncatedSeries> series_from_multilinear(
    std::span<const MultilinearMap<double>> maps) {
  if (maps.empty()) throw StructuralError("need at least the arity-0 map");
  const std::size_t n = maps[0].dim();
  const unsigned r = static_cast<unsigned>(maps.size() - 1);
  for (std::size_t m = 0; m < maps.size(); ++m) {
    if (maps[m].arity() != m || maps[m].dim() != n) {
      throw StructuralError("derivative maps must have consecutive arities and equal dimension");
    }
  }
  auto layout = SeriesLayout::get(n, r);
  std::vector<TruncatedSeries> out(n, TruncatedSeries(layout));
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < layout->size(); ++k) {
    const MultiIndex& alpha = layout->monomial(k);
    idx.clear();
    for (std::size_t v = 0; v < n; ++v) idx.insert(idx.end(), alpha[v], v);
    const auto& e = maps[idx.size()].entry(idx);
    const double scale = detail::multi_factorial(alpha);
    for (std::size_t c = 0; c < n; ++c) out[c].coefficients()[k] = e[c] / scale;
  }
  return out;
}

/// m-th derivative as a map whose entries are series in dz (the derivative
/// at z + dz), truncated to `out_order`. Requires m + out_order <= series order.
inline MultilinearMap<TruncatedSeries> derivative_map(std::span<const TruncatedSeries> comps,
                                                      std::size_t m, unsigned out_order) {
  detail::check_components(comps);
  const std::size_t n = comps.size();
  for (const auto& c : comps) {
    if (m + out_order > c.max_order()) {
      throw StructuralError("series order " + std::to_string(c.max_order()) +
                            " too low for arity " + std::to_string(m) + " at order " +
                            std::to_string(out_order));
    }
  }
  std::map<MultiIndex, std::vector<TruncatedSeries>> cache;
  const TruncatedSeries zero = TruncatedSeries::zero(n, out_order);
  auto L = MultilinearMap<TruncatedSeries>::zeros(m, n, zero);
  for (std::size_t f = 0; f < L.size(); ++f) {
    auto idx = L.unflatten(f);
    MultiIndex alpha = detail::counts_of(idx, n);
    auto it = cache.find(alpha);
    if (it == cache.end()) {
      std::vector<TruncatedSeries> d;
      for (const auto& c : comps) {
        TruncatedSeries s = c;
        for (std::size_t v = 0; v < n; ++v) {
          for (unsigned q = 0; q < alpha[v]; ++q) s = s.partial(v);
        }
        d.push_back(s.truncated(out_order));
      }
      it = cache.emplace(alpha, std::move(d)).first;
    }
    L.entry_at(f) = it->second;
  }
  return L;
}

}  // namespace strobo
