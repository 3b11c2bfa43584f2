#pragma once

// Scalar and series mathematics of discretized periodic Gaussians: density,
// periodic residues, normalization, tail masses, continuous Fourier moments
// and their aliasing (Poisson) series.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>

#include "gsee/error.hpp"
#include "gsee/numeric.hpp"

namespace gsee {

/// Width and center of a Gaussian measured in outcome bins on a grid of 2^q bins.
struct GaussianParams {
  double sigma = 1.0;
  double mu = 0.0;
  int q = 1;

  GaussianParams() = default;
  GaussianParams(double sigma_bins, double mu_bins, int register_bits)
      : sigma(sigma_bins), mu(mu_bins), q(register_bits) {
    validate();
  }

  void validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("GaussianParams: sigma must be positive");
    if (q < 1 || q > 62) throw DomainError("GaussianParams: q must lie in [1, 62]");
    if (!std::isfinite(mu)) throw DomainError("GaussianParams: mu must be finite");
  }

  /// mu - round_half_even(mu), in [-1/2, 1/2].
  double mu_wrapped() const { return mu - round_half_even(mu); }
  std::int64_t grid_size() const { return std::int64_t{1} << q; }
};

template <class Real>
Real g0(Real x, Real sigma, Real mu) {
  using std::exp;
  using std::sqrt;
  const Real inv_sqrt_2pi = Real(1) / sqrt(Real(2) * std::numbers::pi_v<Real>);
  const Real z = (x - mu) / sigma;
  return inv_sqrt_2pi / sigma * exp(Real(-0.5) * z * z);
}

/// Signed periodic residue r = (k - mu) - 2^q round_half_even((k - mu) / 2^q).
inline double wrap_mod(std::int64_t k, double mu, int q) {
  const double period = std::ldexp(1.0, q);
  const double d = static_cast<double>(k) - mu;
  return d - period * round_half_even(d / period);
}

inline constexpr std::int64_t kMinusInfinity = std::numeric_limits<std::int64_t>::min() / 4;
inline constexpr std::int64_t kPlusInfinity = std::numeric_limits<std::int64_t>::max() / 4;

/// Sum over integers n in [lo, hi] of n^power * g0(n, mu). Terms are
/// accumulated outward from the lattice point nearest mu and each direction
/// stops once a term drops below series_floor<Real>() beyond
/// mu +/- (10 + 2 sqrt(power)) sigma. `lo`/`hi` may be kMinusInfinity/kPlusInfinity.
template <class Real>
Real lattice_sum(std::int64_t lo, std::int64_t hi, Real sigma, Real mu, int power = 0) {
  using std::abs;
  using std::sqrt;
  if (lo > hi) return Real(0);
  const Real floor_value = series_floor<Real>();
  const Real span = (Real(10) + Real(2) * sqrt(Real(power))) * sigma;
  auto term = [&](std::int64_t n) {
    const Real x = static_cast<Real>(n);
    Real xp = Real(1);
    for (int i = 0; i < power; ++i) xp *= x;
    return xp * g0(x, sigma, mu);
  };
  const auto nearest = static_cast<std::int64_t>(std::llround(static_cast<double>(mu)));
  const std::int64_t start = std::clamp(nearest, lo, hi);

  Real up = 0;
  for (std::int64_t n = start; n <= hi; ++n) {
    const Real t = term(n);
    up += t;
    if (abs(t) < floor_value && static_cast<Real>(n) - mu > span) break;
  }
  Real down = 0;
  for (std::int64_t n = start - 1; n >= lo; --n) {
    const Real t = term(n);
    down += t;
    if (abs(t) < floor_value && mu - static_cast<Real>(n) > span) break;
  }
  return up + down;
}

/// 𝒩 = sum_{k=-2^q/2}^{2^q/2-1} g0(k, mu_tilde).
inline double normalization_N(const GaussianParams& p) {
  p.validate();
  const std::int64_t half = p.grid_size() / 2;
  return lattice_sum(-half, half - 1, p.sigma, p.mu_wrapped());
}

struct TailMassResult {
  double exact_sum = 0.0;
  double analytic_bound = 0.0;
  /// K >= 1 and sigma <= K - 1/2; outside that regime the comparison is
  /// reported as not applicable.
  bool preconditions_met = false;
};

/// Lattice mass of g0(., mu_tilde) strictly outside [-K, K] together with the
/// bound exp(-(K - 1/2)^2 / (2 sigma^2)).
inline TailMassResult tail_mass(std::int64_t K, const GaussianParams& p) {
  p.validate();
  if (K <= 0) throw DomainError("tail_mass: K must be positive");
  const double mu = p.mu_wrapped();
  TailMassResult r;
  r.exact_sum = lattice_sum(K + 1, kPlusInfinity, p.sigma, mu) + lattice_sum(kMinusInfinity, -K - 1, p.sigma, mu);
  const double kh = static_cast<double>(K) - 0.5;
  r.analytic_bound = std::exp(-kh * kh / (2.0 * p.sigma * p.sigma));
  r.preconditions_met = p.sigma <= kh;
  return r;
}

/// G_m(k) = i^m (2 pi)^{-m} d^m/dk^m G_0(k), with G_0(k) = exp(-2 pi k (pi k sigma^2 + i mu)),
/// the Fourier transform (kernel exp(-2 pi i x k)) of x^m g0(x, mu). Closed forms
/// for m <= 4 follow from G_0 = exp(a k^2 + b k), a = -2 pi^2 sigma^2, b = -2 pi i mu.
template <class Real>
std::complex<Real> continuous_moment_Gm(Real k, int m, Real sigma, Real mu) {
  if (m < 0 || m > 4) throw DomainError("continuous_moment_Gm: m must lie in [0, 4]");
  using cr = std::complex<Real>;
  const Real pi = std::numbers::pi_v<Real>;
  const Real a = Real(-2) * pi * pi * sigma * sigma;
  const cr b(Real(0), Real(-2) * pi * mu);
  const cr g = std::exp(cr(a * k * k) + b * k);
  const cr s = cr(Real(2) * a * k) + b;
  cr d;
  switch (m) {
    case 0: d = Real(1); break;
    case 1: d = s; break;
    case 2: d = s * s + cr(Real(2) * a); break;
    case 3: d = s * s * s + Real(6) * a * s; break;
    default: d = s * s * s * s + Real(12) * a * s * s + cr(Real(12) * a * a); break;
  }
  cr factor(Real(1));
  const cr step(Real(0), Real(1) / (Real(2) * pi));
  for (int i = 0; i < m; ++i) factor *= step;
  return factor * d * g;
}

inline std::complex<double> continuous_moment_Gm(double k, int m, const GaussianParams& p) {
  return continuous_moment_Gm(k, m, p.sigma, p.mu);
}

struct AliasingResult {
  /// sum_{k != 0} |G_m(-k)|
  double exact_abs_series = 0.0;
  /// sum_{k != 0} G_m(-k), which equals (lattice moment) - G_m(0) by Poisson summation.
  std::complex<double> signed_series{0.0, 0.0};
  /// 4 e^{2 pi d1 |mu|} e^{2 pi^2 (d1^2 + 2 d1) sigma^2} e^{-2 pi^2 sigma^2} m! / (pi^m d1^m)
  double bound = 0.0;
  /// The tighter pre-geometric-sum form of the same chain.
  double intermediate_bound = 0.0;
  /// exp(-2 pi^2 sigma^2) <= 1/2, exp(-2 pi^2 sigma^2 (1 - 2 d1)) <= 1/2 and 0 < d1 < 1/2.
  bool preconditions_met = false;
  std::int64_t terms_used = 0;
};

template <class Real>
struct PoissonSeries {
  Real abs_series = 0;
  std::complex<Real> signed_series{0, 0};
  std::int64_t terms = 0;
};

/// sum_{k != 0} G_m(-k) and sum_{k != 0} |G_m(-k)|, truncated once a pair of
/// terms falls below series_floor<Real>().
template <class Real>
PoissonSeries<Real> poisson_series(int m, Real sigma, Real mu) {
  PoissonSeries<Real> r;
  for (std::int64_t k = 1;; ++k) {
    const auto plus = continuous_moment_Gm(static_cast<Real>(k), m, sigma, mu);
    const auto minus = continuous_moment_Gm(-static_cast<Real>(k), m, sigma, mu);
    r.signed_series += plus + minus;
    const Real last = std::abs(plus) + std::abs(minus);
    r.abs_series += last;
    r.terms = k;
    if (last < series_floor<Real>()) break;
  }
  return r;
}

/// Poisson aliasing series of the m-th lattice moment and the analytic
/// discretization bound evaluated at Cauchy radius `delta1`.
/// `k_max == 0` selects the number of terms automatically.
inline AliasingResult aliasing_error(int m, const GaussianParams& p, std::int64_t k_max, double delta1) {
  p.validate();
  if (m < 0 || m > 4) throw DomainError("aliasing_error: m must lie in [0, 4]");
  if (!(delta1 > 0.0)) throw DomainError("aliasing_error: delta1 must be positive");
  const double s2 = p.sigma * p.sigma;
  const double pi2 = kPi * kPi;

  AliasingResult r;
  const bool automatic = k_max == 0;
  const std::int64_t cap = automatic ? std::int64_t{1} << 40 : k_max;
  double last = 0.0;
  std::int64_t k = 1;
  for (; k <= cap; ++k) {
    const auto plus = continuous_moment_Gm(static_cast<double>(k), m, p.sigma, p.mu);
    const auto minus = continuous_moment_Gm(-static_cast<double>(k), m, p.sigma, p.mu);
    r.signed_series += plus + minus;
    last = std::abs(plus) + std::abs(minus);
    r.exact_abs_series += last;
    if (automatic && last < kSeriesFloor) break;
  }
  r.terms_used = std::min(k, cap);
  if (!automatic && last >= kSeriesFloor) {
    throw DomainError("aliasing_error: k_max too small for the series to reach 1e-300");
  }

  const double mf = factorial(m);
  const double abs_mu = std::abs(p.mu);
  const double log_prefix = 2.0 * kPi * delta1 * abs_mu + std::log(mf) - m * std::log(kPi * delta1);
  r.bound = 4.0 * std::exp(log_prefix + 2.0 * pi2 * (delta1 * delta1 + 2.0 * delta1) * s2 - 2.0 * pi2 * s2);

  double geometric = 0.0;
  for (std::int64_t j = 1; j < 100000; ++j) {
    const double jd = static_cast<double>(j);
    const double t = std::exp(4.0 * pi2 * jd * delta1 * s2 - 2.0 * pi2 * jd * jd * s2);
    geometric += t;
    if (t < kSeriesFloor && jd > 2.0 * delta1) break;
  }
  r.intermediate_bound = 2.0 * std::exp(log_prefix + 2.0 * pi2 * delta1 * delta1 * s2) * geometric;

  r.preconditions_met = delta1 < 0.5 && std::exp(-2.0 * pi2 * s2) <= 0.5 &&
                        std::exp(-2.0 * pi2 * s2 * (1.0 - 2.0 * delta1)) <= 0.5;
  return r;
}

/// (lattice sum of n^m g0(n, mu)) - G_m(0), computed through the Poisson series,
/// which is free of the cancellation that the direct lattice difference suffers.
inline double lattice_moment_minus_continuous(int m, double sigma, double mu) {
  if (sigma < 0.25) {
    return lattice_sum(kMinusInfinity, kPlusInfinity, sigma, mu, m) - continuous_moment_Gm(0.0, m, sigma, mu).real();
  }
  return aliasing_error(m, GaussianParams(sigma, mu, 62), 0, 0.25).signed_series.real();
}

}  // namespace gsee
