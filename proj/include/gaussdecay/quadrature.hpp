#pragma once

#include <cmath>
#include <type_traits>
#include <utility>

#include <boost/math/quadrature/gauss.hpp>

#include "gaussdecay/core.hpp"

namespace gd::quad {

namespace detail {

template <typename T>
double magnitude(const T& v) {
  if constexpr (std::is_arithmetic_v<T>) {
    return std::abs(v);
  } else if constexpr (std::is_same_v<T, cplx>) {
    return std::abs(v);
  } else {
    return v.norm();
  }
}

template <typename T>
struct RuleResult {
  T value;
  double abs_value;  // integral of the pointwise magnitude, used as the tolerance scale
};

// 10-point Gauss-Legendre on [a, b].
template <typename F>
auto gauss10(const F& f, double a, double b) {
  using Rule = boost::math::quadrature::gauss<double, 10>;
  const auto& nodes = Rule::abscissa();
  const auto& weights = Rule::weights();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  using T = std::decay_t<decltype(f(mid))>;
  T sum = f(mid + half * nodes[0]) * 0.0;
  double abs_sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const T lo = f(mid - half * nodes[i]);
    const T hi = f(mid + half * nodes[i]);
    sum = sum + weights[i] * (lo + hi);
    abs_sum += weights[i] * (magnitude(lo) + magnitude(hi));
  }
  return RuleResult<T>{half * sum, std::abs(half) * abs_sum};
}

template <typename F, typename T>
T refine(const F& f, double a, double b, const T& whole, double tol, int depth) {
  const double mid = 0.5 * (a + b);
  auto left = gauss10(f, a, mid);
  auto right = gauss10(f, mid, b);
  T halves = left.value + right.value;
  if (magnitude(halves - whole) <= tol) return halves;
  if (depth <= 0) {
    throw ConvergenceError("adaptive Gauss-Legendre: maximum subdivision depth reached");
  }
  return refine(f, a, mid, left.value, 0.5 * tol, depth - 1) +
         refine(f, mid, b, right.value, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Gauss-Legendre quadrature of f over [a, b]. Works for any value
/// type with +, scalar * and a magnitude (double, complex, Eigen vectors).
/// The tolerance is relative to the integral of |f|, so integrals that cancel
/// to zero still terminate.
template <typename F>
auto integrate(const F& f, double a, double b, double rel_tol = 1e-10, double abs_tol = 0.0,
               int max_depth = 40) {
  using T = std::decay_t<decltype(f(a))>;
  if (a == b) return T(f(a) * 0.0);
  auto first = detail::gauss10(f, a, b);
  const double tol = std::max(abs_tol, rel_tol * first.abs_value);
  if (tol == 0.0) return T(first.value);
  return T(detail::refine(f, a, b, first.value, tol, max_depth));
}

}  // namespace gd::quad
