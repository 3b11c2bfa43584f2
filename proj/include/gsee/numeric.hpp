#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <type_traits>

#include "gsee/error.hpp"

namespace gsee {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kE = std::numbers::e;

/// Smallest term kept in a lattice series before truncation.
inline constexpr double kSeriesFloor = 1e-300;

/// Round to nearest integer, ties to even. Implemented explicitly so the
/// result never depends on the current floating-point rounding mode.
inline double round_half_even(double x) {
  const double fl = std::floor(x);
  const double diff = x - fl;
  if (diff < 0.5) return fl;
  if (diff > 0.5) return fl + 1.0;
  return std::fmod(fl, 2.0) == 0.0 ? fl : fl + 1.0;
}

inline double factorial(int n) {
  if (n < 0) throw DomainError("factorial: negative argument");
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

/// Lower real branch W_{-1}(y) of w*exp(w) = y for y in [-1/e, 0).
///
/// Near the branch point the iteration starts from the series in
/// p = -sqrt(2(e*y + 1)); elsewhere from the midpoint of the sandwich
/// 1 + sqrt(2u) + 2u/3 < -W_{-1}(-exp(-u-1)) < 1 + sqrt(2u) + u.
/// Away from the branch point Newton runs on the logarithmic form
/// w + log(-w) = log(-y), which stays finite for tiny |y|.
inline double lambert_Wm1(double y) {
  constexpr double inv_e = 1.0 / kE;
  if (!(y < 0.0) || y < -inv_e * (1.0 + 8 * std::numeric_limits<double>::epsilon())) {
    throw DomainError("lambert_Wm1: argument outside [-1/e, 0)");
  }
  const double t = kE * y + 1.0;
  if (t <= 0.0) return -1.0;

  const double u = -std::log(-y) - 1.0;
  if (u < 2.0) {
    const double p = -std::sqrt(2.0 * t);
    double w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    for (int it = 0; it < 100; ++it) {
      const double ew = std::exp(w);
      const double f = w * ew - y;
      const double wp1 = w + 1.0;
      if (wp1 == 0.0) break;
      const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
      w -= step;
      if (std::abs(step) <= 1e-16 * std::abs(w)) break;
    }
    return std::min(w, -1.0);
  }

  const double log_neg_y = std::log(-y);
  double w = -(1.0 + std::sqrt(2.0 * u) + 5.0 / 6.0 * u);
  for (int it = 0; it < 100; ++it) {
    const double f = w + std::log(-w) - log_neg_y;
    const double step = f / (1.0 + 1.0 / w);
    w -= step;
    if (std::abs(step) <= 1e-16 * std::abs(w)) break;
  }
  return w;
}

/// Cauchy-estimate derivative bound |f^(n)(z)| <= M n! 2^n / r^n on |z| <= r/2.
inline double derivative_bound(int n, double r, double max_modulus) {
  if (n < 0 || !(r > 0.0) || max_modulus < 0.0) {
    throw DomainError("derivative_bound: need n >= 0, r > 0, M >= 0");
  }
  return max_modulus * factorial(n) * std::pow(2.0 / r, n);
}

/// Maximum of a continuous function of mu_tilde over the closed interval
/// [-1/2, 1/2]: 33-point grid followed by golden-section refinement around
/// the best grid point. The supremum over the half-open interval used by the
/// lemmas equals this maximum by continuity. `f` may return any ordered
/// floating type.
template <class F>
auto maximize_over_offset(F&& f, double* argmax = nullptr) -> decltype(f(0.0)) {
  using R = decltype(f(0.0));
  constexpr int kGrid = 33;
  double best_x = -0.5;
  R best = f(best_x);
  for (int i = 1; i < kGrid; ++i) {
    const double x = -0.5 + static_cast<double>(i) / (kGrid - 1);
    const R v = f(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  const double h = 1.0 / (kGrid - 1);
  double a = std::max(-0.5, best_x - h);
  double b = std::min(0.5, best_x + h);
  constexpr double invphi = 0.6180339887498949;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  R fc = f(c);
  R fd = f(d);
  for (int it = 0; it < 60 && (b - a) > 1e-12; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  if (fc > best) {
    best = fc;
    best_x = c;
  }
  if (fd > best) {
    best = fd;
    best_x = d;
  }
  if (argmax) *argmax = best_x;
  return best;
}

template <class F>
auto minimize_over_offset(F&& f, double* argmin = nullptr) -> decltype(f(0.0)) {
  return -maximize_over_offset([&](double x) { return -f(x); }, argmin);
}

/// Truncation floor for lattice series: 1e-300 in double, the smallest
/// normal value for wider types.
template <class Real>
constexpr Real series_floor() {
  if constexpr (std::is_same_v<Real, double>) {
    return Real(kSeriesFloor);
  } else {
    return std::numeric_limits<Real>::min();
  }
}

}  // namespace gsee
