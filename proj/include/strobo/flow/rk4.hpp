#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace strobo {

namespace detail {

template <class A>
void axpy(A& y, const A& x, double a) {
  y.add_scaled(x, a);
}
inline void axpy(double& y, double x, double a) { y += a * x; }

}  // namespace detail

/// Classical fixed-step RK4 over vectors of any algebra supporting +, scalar *
/// and add_scaled (or the double overload below). `rhs(t, x)` returns x'.
/// `after_step(step_index, x)` is invoked after every step.
template <class A, class Rhs, class AfterStep>
void rk4_integrate(Rhs&& rhs, double t0, double t1, std::size_t steps, std::vector<A>& x,
                   AfterStep&& after_step) {
  const double h = (t1 - t0) / static_cast<double>(steps);
  const std::size_t n = x.size();
  std::vector<A> tmp = x;
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = t0 + h * static_cast<double>(s);
    auto stage = [&](const std::vector<A>& k, double a) {
      for (std::size_t j = 0; j < n; ++j) {
        tmp[j] = x[j];
        detail::axpy(tmp[j], k[j], a);
      }
    };
    std::vector<A> k1 = rhs(t, x);
    stage(k1, 0.5 * h);
    std::vector<A> k2 = rhs(t + 0.5 * h, tmp);
    stage(k2, 0.5 * h);
    std::vector<A> k3 = rhs(t + 0.5 * h, tmp);
    stage(k3, h);
    std::vector<A> k4 = rhs(t + h, tmp);
    for (std::size_t j = 0; j < n; ++j) {
      detail::axpy(x[j], k1[j], h / 6.0);
      detail::axpy(x[j], k2[j], h / 3.0);
      detail::axpy(x[j], k3[j], h / 3.0);
      detail::axpy(x[j], k4[j], h / 6.0);
    }
    after_step(s, x);
  }
}

template <class A, class Rhs>
void rk4_integrate(Rhs&& rhs, double t0, double t1, std::size_t steps, std::vector<A>& x) {
  rk4_integrate(std::forward<Rhs>(rhs), t0, t1, steps, x, [](std::size_t, const std::vector<A>&) {});
}

}  // namespace strobo
