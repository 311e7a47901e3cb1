#pragma once

#include <cstddef>
#include <vector>

#include "strobo/errors.hpp"
#include "strobo/tpsa/series.hpp"

namespace strobo {

/// sum_{p=0..k} eps^p a_p with series coefficients a_p; products beyond eps^k are dropped.
class GradedSeries {
 public:
  GradedSeries(std::size_t eps_order, const TruncatedSeries& zero)
      : terms_(eps_order + 1, zero_like(zero)) {}

  explicit GradedSeries(std::vector<TruncatedSeries> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw StructuralError("graded series needs at least the eps^0 term");
  }

  std::size_t eps_order() const noexcept { return terms_.size() - 1; }
  const TruncatedSeries& operator[](std::size_t p) const { return terms_[p]; }
  TruncatedSeries& operator[](std::size_t p) { return terms_[p]; }
  const std::vector<TruncatedSeries>& terms() const noexcept { return terms_; }

  /// Keeps eps powers 0..k only.
  GradedSeries truncated_eps(std::size_t k) const {
    if (k >= eps_order()) return *this;
    return GradedSeries(std::vector<TruncatedSeries>(terms_.begin(), terms_.begin() + k + 1));
  }

  /// Multiplies by eps^s and re-embeds into eps order k.
  GradedSeries shifted(std::size_t s, std::size_t k) const {
    GradedSeries out(k, terms_[0]);
    for (std::size_t p = 0; p + s <= k && p <= eps_order(); ++p) out.terms_[p + s] = terms_[p];
    return out;
  }

  bool all_finite() const {
    for (const auto& t : terms_) {
      if (!t.all_finite()) return false;
    }
    return true;
  }

  GradedSeries& operator+=(const GradedSeries& o) {
    check_same(o);
    for (std::size_t p = 0; p < terms_.size(); ++p) terms_[p] += o.terms_[p];
    return *this;
  }
  GradedSeries& operator-=(const GradedSeries& o) {
    check_same(o);
    for (std::size_t p = 0; p < terms_.size(); ++p) terms_[p] -= o.terms_[p];
    return *this;
  }
  GradedSeries& operator*=(double s) {
    for (auto& t : terms_) t *= s;
    return *this;
  }
  GradedSeries& operator+=(double c) {
    terms_[0] += c;
    return *this;
  }
  GradedSeries& add_scaled(const GradedSeries& x, double s) {
    check_same(x);
    for (std::size_t p = 0; p < terms_.size(); ++p) terms_[p].add_scaled(x.terms_[p], s);
    return *this;
  }

  friend GradedSeries operator+(GradedSeries a, const GradedSeries& b) { return a += b; }
  friend GradedSeries operator-(GradedSeries a, const GradedSeries& b) { return a -= b; }
  friend GradedSeries operator*(GradedSeries a, double s) { return a *= s; }
  friend GradedSeries operator*(double s, GradedSeries a) { return a *= s; }
  friend GradedSeries operator+(GradedSeries a, double c) { return a += c; }
  friend GradedSeries operator-(GradedSeries a) {
    for (auto& t : a.terms_) t = -t;
    return a;
  }

  /// Convolution in the eps grading.
  friend GradedSeries operator*(const GradedSeries& a, const GradedSeries& b) {
    a.check_same(b);
    const std::size_t k = a.eps_order();
    GradedSeries out(k, a.terms_[0]);
    std::vector<bool> za(k + 1), zb(k + 1);
    for (std::size_t p = 0; p <= k; ++p) {
      za[p] = a.terms_[p].is_zero();
      zb[p] = b.terms_[p].is_zero();
    }
    for (std::size_t p = 0; p <= k; ++p) {
      if (za[p]) continue;
      for (std::size_t q = 0; p + q <= k; ++q) {
        if (zb[q]) continue;
        out.terms_[p + q] += a.terms_[p] * b.terms_[q];
      }
    }
    return out;
  }

  friend bool operator==(const GradedSeries& a, const GradedSeries& b) {
    return a.terms_ == b.terms_;
  }

 private:
  void check_same(const GradedSeries& o) const {
    if (o.terms_.size() != terms_.size()) throw StructuralError("graded series differ in eps order");
  }

  std::vector<TruncatedSeries> terms_;
};

namespace detail {

// fn(a0 + v) = sum_q fn^(q)(a0) v^q / q! with v the eps-nilpotent part.
template <class Derivative>
GradedSeries compose_graded(const GradedSeries& a, Derivative&& derivative) {
  const std::size_t k = a.eps_order();
  GradedSeries nil = a;
  nil[0] = zero_like(a[0]);
  GradedSeries out(k, a[0]);
  out[0] = derivative(0);
  GradedSeries power(k, a[0]);
  power[0] = lift(a[0], 1.0);
  double factorial = 1.0;
  for (std::size_t q = 1; q <= k; ++q) {
    power = power * nil;
    factorial *= static_cast<double>(q);
    GradedSeries c(k, a[0]);
    c[0] = derivative(q);
    out.add_scaled(c * power, 1.0 / factorial);
  }
  return out;
}

}  // namespace detail

inline GradedSeries sin(const GradedSeries& a) {
  const TruncatedSeries s = sin(a[0]), c = cos(a[0]);
  return detail::compose_graded(a, [&](std::size_t q) {
    switch (q % 4) {
      case 0: return s;
      case 1: return c;
      case 2: return -s;
      default: return -c;
    }
  });
}

inline GradedSeries cos(const GradedSeries& a) {
  const TruncatedSeries s = sin(a[0]), c = cos(a[0]);
  return detail::compose_graded(a, [&](std::size_t q) {
    switch (q % 4) {
      case 0: return c;
      case 1: return -s;
      case 2: return -c;
      default: return s;
    }
  });
}

inline GradedSeries exp(const GradedSeries& a) {
  const TruncatedSeries e = exp(a[0]);
  return detail::compose_graded(a, [&](std::size_t) { return e; });
}

inline GradedSeries lift(const GradedSeries& like, double c) {
  GradedSeries out(like.eps_order(), like[0]);
  out[0] = lift(like[0], c);
  return out;
}

/// The flow state: one graded series per coordinate, all sharing (n, d, k).
class EpsGradedState {
 public:
  EpsGradedState(std::vector<GradedSeries> comps) : comps_(std::move(comps)) {
    if (comps_.empty()) throw StructuralError("state needs at least one component");
    for (const auto& c : comps_) {
      if (c.eps_order() != comps_[0].eps_order() ||
          c[0].layout() != comps_[0][0].layout()) {
        throw StructuralError("state components must share eps and spatial order");
      }
    }
  }

  /// z0 + dz at eps order 0, zero at higher eps orders.
  static EpsGradedState initial(std::span<const double> z0, unsigned spatial_order,
                                std::size_t eps_order) {
    std::vector<GradedSeries> comps;
    for (std::size_t j = 0; j < z0.size(); ++j) {
      auto var = TruncatedSeries::variable(z0.size(), spatial_order, j, z0[j]);
      GradedSeries g(eps_order, var);
      g[0] = var;
      comps.push_back(std::move(g));
    }
    return EpsGradedState(std::move(comps));
  }

  std::size_t dim() const noexcept { return comps_.size(); }
  std::size_t eps_order() const noexcept { return comps_[0].eps_order(); }
  unsigned spatial_order() const noexcept { return comps_[0][0].max_order(); }

  const std::vector<GradedSeries>& components() const noexcept { return comps_; }
  std::vector<GradedSeries>& components() noexcept { return comps_; }
  const GradedSeries& operator[](std::size_t j) const { return comps_[j]; }

 private:
  std::vector<GradedSeries> comps_;
};

}  // namespace strobo
