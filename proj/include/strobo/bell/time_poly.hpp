#pragma once

#include <cstddef>
#include <type_traits>
#include <vector>

#include "strobo/algebra.hpp"
#include "strobo/errors.hpp"

namespace strobo {

namespace detail {

template <class S>
bool scalar_is_zero(const S& x) {
  return is_zero(x);
}

}  // namespace detail

/// Polynomial in t with vector coefficients: sum_p t^p c_p, c_p in S^n.
///
/// Trailing zero coefficients are trimmed, so the zero polynomial has no
/// coefficients. `zero` fixes the shape of scalars the polynomial produces
/// when it has to materialize a zero (for series, the layout).
template <class S>
class TimePoly {
 public:
  explicit TimePoly(std::size_t dim, S zero = S{0.0}) : dim_(dim), zero_(std::move(zero)) {}

  TimePoly(std::size_t dim, std::vector<std::vector<S>> coeffs, S zero = S{0.0})
      : dim_(dim), zero_(std::move(zero)), coeffs_(std::move(coeffs)) {
    for (const auto& c : coeffs_) {
      if (c.size() != dim_) throw StructuralError("time polynomial coefficient has wrong dimension");
    }
    trim();
  }

  /// t^power * v
  static TimePoly monomial(std::size_t power, std::vector<S> v, S zero = S{0.0}) {
    const std::size_t dim = v.size();
    std::vector<std::vector<S>> coeffs(power + 1, std::vector<S>(dim, zero));
    coeffs[power] = std::move(v);
    return TimePoly(dim, std::move(coeffs), std::move(zero));
  }

  std::size_t dim() const noexcept { return dim_; }
  const S& zero_scalar() const noexcept { return zero_; }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  /// -1 for the zero polynomial.
  long degree() const noexcept { return static_cast<long>(coeffs_.size()) - 1; }
  const std::vector<std::vector<S>>& coefficients() const noexcept { return coeffs_; }

  std::vector<S> coefficient(std::size_t p) const {
    return p < coeffs_.size() ? coeffs_[p] : std::vector<S>(dim_, zero_);
  }

  std::vector<S> evaluate(double t) const {
    std::vector<S> out(dim_, zero_);
    for (std::size_t p = coeffs_.size(); p-- > 0;) {
      for (std::size_t c = 0; c < dim_; ++c) {
        out[c] = out[c] * t;
        out[c] += coeffs_[p][c];
      }
    }
    return out;
  }

  /// s -> int_0^s p(u) du as a polynomial (degree + 1, zero constant term).
  TimePoly integral() const {
    if (is_zero()) return *this;
    std::vector<std::vector<S>> out(coeffs_.size() + 1, std::vector<S>(dim_, zero_));
    for (std::size_t p = 0; p < coeffs_.size(); ++p) {
      for (std::size_t c = 0; c < dim_; ++c) out[p + 1][c] = coeffs_[p][c] * (1.0 / static_cast<double>(p + 1));
    }
    return TimePoly(dim_, std::move(out), zero_);
  }

  /// int_0^upper p(u) du.
  std::vector<S> integrate_to(double upper) const {
    std::vector<S> out(dim_, zero_);
    double power = upper;
    for (std::size_t p = 0; p < coeffs_.size(); ++p) {
      const double w = power / static_cast<double>(p + 1);
      for (std::size_t c = 0; c < dim_; ++c) out[c] += coeffs_[p][c] * w;
      power *= upper;
    }
    return out;
  }

  /// Multiplies by t.
  TimePoly times_t() const {
    if (is_zero()) return *this;
    std::vector<std::vector<S>> out;
    out.reserve(coeffs_.size() + 1);
    out.emplace_back(dim_, zero_);
    out.insert(out.end(), coeffs_.begin(), coeffs_.end());
    return TimePoly(dim_, std::move(out), zero_);
  }

  TimePoly& operator+=(const TimePoly& o) {
    if (o.dim_ != dim_) throw StructuralError("time polynomial dimension mismatch");
    if (coeffs_.size() < o.coeffs_.size()) coeffs_.resize(o.coeffs_.size(), std::vector<S>(dim_, zero_));
    for (std::size_t p = 0; p < o.coeffs_.size(); ++p) {
      for (std::size_t c = 0; c < dim_; ++c) coeffs_[p][c] += o.coeffs_[p][c];
    }
    trim();
    return *this;
  }
  TimePoly& operator*=(double s) {
    for (auto& v : coeffs_) {
      for (auto& x : v) x = x * s;
    }
    trim();
    return *this;
  }
  friend TimePoly operator+(TimePoly a, const TimePoly& b) { return a += b; }
  friend TimePoly operator*(TimePoly a, double s) { return a *= s; }
  friend TimePoly operator*(double s, TimePoly a) { return a *= s; }

  /// Applies `fn` to every scalar coefficient (e.g. truncation or projection).
  template <class Fn, class R = std::invoke_result_t<Fn, const S&>>
  TimePoly<R> map(Fn&& fn, R zero) const {
    std::vector<std::vector<R>> out;
    out.reserve(coeffs_.size());
    for (const auto& v : coeffs_) {
      std::vector<R> w;
      w.reserve(dim_);
      for (const auto& x : v) w.push_back(fn(x));
      out.push_back(std::move(w));
    }
    return TimePoly<R>(dim_, std::move(out), std::move(zero));
  }

 private:
  void trim() {
    while (!coeffs_.empty()) {
      bool all_zero = true;
      for (const auto& x : coeffs_.back()) {
        if (!detail::scalar_is_zero(x)) {
          all_zero = false;
          break;
        }
      }
      if (!all_zero) break;
      coeffs_.pop_back();
    }
  }

  std::size_t dim_;
  S zero_;
  std::vector<std::vector<S>> coeffs_;
};

}  // namespace strobo
