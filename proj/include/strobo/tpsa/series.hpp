#pragma once

// Truncated multivariate Taylor polynomials in the displacement variables
// dz_1..dz_n, truncated at total degree d.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "strobo/algebra.hpp"
#include "strobo/errors.hpp"

namespace strobo {

using MultiIndex = std::vector<unsigned>;

inline unsigned total_degree(const MultiIndex& a) {
  unsigned s = 0;
  for (unsigned e : a) s += e;
  return s;
}

/// Monomial basis and precomputed product/derivative tables for one (n, d) pair.
///
/// Monomials are ordered by total degree first, then lexicographically
/// descending within a degree. The ordering inside a degree does not depend on
/// d, so the layout for (n, r) is a prefix of the layout for (n, d) when r <= d.
class SeriesLayout {
 public:
  struct ProductTerm {
    std::uint32_t lhs;
    std::uint32_t rhs;
    std::uint32_t out;
  };
  struct PartialTerm {
    std::uint32_t src;
    std::uint32_t dst;
    double factor;
  };

  static std::shared_ptr<const SeriesLayout> get(std::size_t num_vars, unsigned max_order) {
    if (num_vars == 0) throw StructuralError("series needs at least one variable");
    static std::mutex mutex;
    static std::map<std::pair<std::size_t, unsigned>, std::shared_ptr<const SeriesLayout>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{num_vars, max_order}];
    if (!slot) slot.reset(new SeriesLayout(num_vars, max_order));
    return slot;
  }

  std::size_t num_vars() const noexcept { return n_; }
  unsigned max_order() const noexcept { return d_; }
  std::size_t size() const noexcept { return monomials_.size(); }
  const MultiIndex& monomial(std::size_t k) const { return monomials_[k]; }
  unsigned degree(std::size_t k) const { return degrees_[k]; }

  /// Number of monomials with total degree <= r.
  std::size_t prefix_size(unsigned r) const {
    return r >= d_ ? size() : degree_offsets_[r + 1];
  }

  std::ptrdiff_t find(const MultiIndex& alpha) const {
    auto it = index_.find(alpha);
    return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
  }

  /// Pairs (lhs <= rhs) whose product survives truncation.
  const std::vector<ProductTerm>& products() const noexcept { return products_; }

  /// Terms of d/d(dz_var); dst indexes into the (n, d-1) layout.
  const std::vector<PartialTerm>& partials(std::size_t var) const { return partials_[var]; }

 private:
  SeriesLayout(std::size_t n, unsigned d) : n_(n), d_(d) {
    for (unsigned deg = 0; deg <= d; ++deg) {
      degree_offsets_.push_back(monomials_.size());
      MultiIndex cur(n, 0);
      emit_degree(cur, 0, deg);
    }
    degree_offsets_.push_back(monomials_.size());
    for (std::size_t k = 0; k < monomials_.size(); ++k) {
      degrees_.push_back(total_degree(monomials_[k]));
      index_.emplace(monomials_[k], k);
    }
    MultiIndex sum(n);
    for (std::size_t a = 0; a < size(); ++a) {
      for (std::size_t b = a; b < size(); ++b) {
        if (degrees_[a] + degrees_[b] > d) continue;
        for (std::size_t v = 0; v < n; ++v) sum[v] = monomials_[a][v] + monomials_[b][v];
        products_.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                             static_cast<std::uint32_t>(index_.at(sum))});
      }
    }
    partials_.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t k = 0; k < size(); ++k) {
        if (monomials_[k][v] == 0) continue;
        MultiIndex lowered = monomials_[k];
        --lowered[v];
        // Within-degree order matches across layouts, so the (n, d-1) index equals ours.
        partials_[v].push_back({static_cast<std::uint32_t>(k),
                                static_cast<std::uint32_t>(index_.at(lowered)),
                                static_cast<double>(monomials_[k][v])});
      }
    }
  }

  // Lexicographically descending enumeration of exponents with the given total.
  void emit_degree(MultiIndex& cur, std::size_t var, unsigned remaining) {
    if (var + 1 == cur.size()) {
      cur[var] = remaining;
      monomials_.push_back(cur);
      return;
    }
    for (unsigned e = remaining + 1; e-- > 0;) {
      cur[var] = e;
      emit_degree(cur, var + 1, remaining - e);
    }
    cur[var] = 0;
  }

  std::size_t n_;
  unsigned d_;
  std::vector<MultiIndex> monomials_;
  std::vector<unsigned> degrees_;
  std::vector<std::size_t> degree_offsets_;
  std::map<MultiIndex, std::size_t> index_;
  std::vector<ProductTerm> products_;
  std::vector<std::vector<PartialTerm>> partials_;
};

/// A multivariate polynomial in dz_1..dz_n truncated at total degree max_order.
class TruncatedSeries {
 public:
  using LayoutPtr = std::shared_ptr<const SeriesLayout>;

  explicit TruncatedSeries(LayoutPtr layout)
      : layout_(std::move(layout)), coeffs_(layout_->size(), 0.0) {}

  static TruncatedSeries zero(std::size_t num_vars, unsigned max_order) {
    return TruncatedSeries(SeriesLayout::get(num_vars, max_order));
  }
  static TruncatedSeries constant(std::size_t num_vars, unsigned max_order, double c) {
    TruncatedSeries s = zero(num_vars, max_order);
    s.coeffs_[0] = c;
    return s;
  }
  /// c + dz_var
  static TruncatedSeries variable(std::size_t num_vars, unsigned max_order, std::size_t var,
                                  double c = 0.0) {
    if (var >= num_vars) throw StructuralError("variable index out of range");
    TruncatedSeries s = constant(num_vars, max_order, c);
    if (max_order > 0) {
      MultiIndex e(num_vars, 0);
      e[var] = 1;
      s.coeffs_[s.layout_->find(e)] = 1.0;
    }
    return s;
  }

  std::size_t num_vars() const noexcept { return layout_->num_vars(); }
  unsigned max_order() const noexcept { return layout_->max_order(); }
  const LayoutPtr& layout() const noexcept { return layout_; }

  std::span<const double> coefficients() const noexcept { return coeffs_; }
  std::span<double> coefficients() noexcept { return coeffs_; }

  double coefficient(const MultiIndex& alpha) const {
    check_index(alpha);
    auto k = layout_->find(alpha);
    return k < 0 ? 0.0 : coeffs_[static_cast<std::size_t>(k)];
  }
  void set_coefficient(const MultiIndex& alpha, double value) {
    check_index(alpha);
    auto k = layout_->find(alpha);
    if (k < 0) throw StructuralError("multi-index exceeds truncation order");
    coeffs_[static_cast<std::size_t>(k)] = value;
  }

  double constant_term() const noexcept { return coeffs_[0]; }

  bool is_zero() const noexcept {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return c == 0.0; });
  }
  bool all_finite() const noexcept {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return std::isfinite(c); });
  }

  /// Drops every term of degree above r (r >= max_order is a copy).
  TruncatedSeries truncated(unsigned r) const {
    if (r >= max_order()) return *this;
    TruncatedSeries out(SeriesLayout::get(num_vars(), r));
    std::copy_n(coeffs_.begin(), out.coeffs_.size(), out.coeffs_.begin());
    return out;
  }

  /// Formal partial derivative; the result is truncated one order lower.
  TruncatedSeries partial(std::size_t var) const {
    if (var >= num_vars()) throw StructuralError("partial derivative variable out of range");
    if (max_order() == 0) return zero(num_vars(), 0);
    TruncatedSeries out(SeriesLayout::get(num_vars(), max_order() - 1));
    for (const auto& term : layout_->partials(var)) {
      out.coeffs_[term.dst] += term.factor * coeffs_[term.src];
    }
    return out;
  }

  double eval(std::span<const double> point) const {
    if (point.size() != num_vars()) throw StructuralError("evaluation point has wrong dimension");
    double sum = 0.0;
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
      if (coeffs_[k] == 0.0) continue;
      double term = coeffs_[k];
      const auto& alpha = layout_->monomial(k);
      for (std::size_t v = 0; v < alpha.size(); ++v) {
        for (unsigned e = 0; e < alpha[v]; ++e) term *= point[v];
      }
      sum += term;
    }
    return sum;
  }

  TruncatedSeries& operator+=(const TruncatedSeries& o) {
    check_same(o);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
    return *this;
  }
  TruncatedSeries& operator-=(const TruncatedSeries& o) {
    check_same(o);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
    return *this;
  }
  TruncatedSeries& operator*=(double s) {
    for (double& c : coeffs_) c *= s;
    return *this;
  }
  TruncatedSeries& operator+=(double c) {
    coeffs_[0] += c;
    return *this;
  }

  /// a += s * x without a temporary.
  TruncatedSeries& add_scaled(const TruncatedSeries& x, double s) {
    check_same(x);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += s * x.coeffs_[k];
    return *this;
  }

  friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) { return a += b; }
  friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) { return a -= b; }
  friend TruncatedSeries operator*(TruncatedSeries a, double s) { return a *= s; }
  friend TruncatedSeries operator*(double s, TruncatedSeries a) { return a *= s; }
  friend TruncatedSeries operator+(TruncatedSeries a, double c) { return a += c; }
  friend TruncatedSeries operator+(double c, TruncatedSeries a) { return a += c; }
  friend TruncatedSeries operator-(TruncatedSeries a) {
    for (double& c : a.coeffs_) c = -c;
    return a;
  }

  /// Cauchy product; terms beyond max_order are discarded. Bitwise commutative.
  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    a.check_same(b);
    TruncatedSeries out(a.layout_);
    const double* x = a.coeffs_.data();
    const double* y = b.coeffs_.data();
    double* z = out.coeffs_.data();
    for (const auto& p : a.layout_->products()) {
      if (p.lhs == p.rhs) {
        z[p.out] += x[p.lhs] * y[p.rhs];
      } else {
        z[p.out] += x[p.lhs] * y[p.rhs] + x[p.rhs] * y[p.lhs];
      }
    }
    return out;
  }
  TruncatedSeries& operator*=(const TruncatedSeries& o) { return *this = *this * o; }

  friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) {
    return a.num_vars() == b.num_vars() && a.max_order() == b.max_order() &&
           a.coeffs_ == b.coeffs_;
  }

 private:
  void check_same(const TruncatedSeries& o) const {
    if (layout_ != o.layout_) {
      throw StructuralError("series operands differ in variable count or truncation order");
    }
  }
  void check_index(const MultiIndex& alpha) const {
    if (alpha.size() != num_vars()) throw StructuralError("multi-index has wrong length");
  }

  LayoutPtr layout_;
  std::vector<double> coeffs_;
};

namespace detail {

// fn(c + v) = sum_q fn^(q)(c) v^q / q!, with derivs[q] = fn^(q)(c).
inline TruncatedSeries compose_taylor(const TruncatedSeries& a, std::span<const double> derivs) {
  TruncatedSeries nil = a;
  nil.coefficients()[0] = 0.0;
  TruncatedSeries out = TruncatedSeries::constant(a.num_vars(), a.max_order(), derivs[0]);
  TruncatedSeries power = TruncatedSeries::constant(a.num_vars(), a.max_order(), 1.0);
  double factorial = 1.0;
  for (unsigned q = 1; q <= a.max_order(); ++q) {
    power = power * nil;
    factorial *= q;
    out.add_scaled(power, derivs[q] / factorial);
  }
  return out;
}

}  // namespace detail

inline TruncatedSeries sin(const TruncatedSeries& a) {
  const double c = a.constant_term();
  const double cycle[4] = {std::sin(c), std::cos(c), -std::sin(c), -std::cos(c)};
  std::vector<double> d(a.max_order() + 1);
  for (std::size_t q = 0; q < d.size(); ++q) d[q] = cycle[q % 4];
  return detail::compose_taylor(a, d);
}

inline TruncatedSeries cos(const TruncatedSeries& a) {
  const double c = a.constant_term();
  const double cycle[4] = {std::cos(c), -std::sin(c), -std::cos(c), std::sin(c)};
  std::vector<double> d(a.max_order() + 1);
  for (std::size_t q = 0; q < d.size(); ++q) d[q] = cycle[q % 4];
  return detail::compose_taylor(a, d);
}

inline TruncatedSeries exp(const TruncatedSeries& a) {
  std::vector<double> d(a.max_order() + 1, std::exp(a.constant_term()));
  return detail::compose_taylor(a, d);
}

/// Constant of the same shape as `like`; used by algebra-generic code.
inline TruncatedSeries lift(const TruncatedSeries& like, double c) {
  TruncatedSeries s(like.layout());
  s.coefficients()[0] = c;
  return s;
}

inline bool is_zero(const TruncatedSeries& s) { return s.is_zero(); }

inline TruncatedSeries zero_like(const TruncatedSeries& like) {
  return TruncatedSeries(like.layout());
}

}  // namespace strobo
