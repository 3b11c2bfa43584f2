#pragma once

// Both sides of every appendix inequality evaluated on concrete points.
//
// Lattice quantities are accumulated in long double. At planner-produced
// points the tail and contamination masses sit far below the double range
// (e^-2700 and smaller), and the extended exponent keeps them comparable
// instead of flushing both sides to zero.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "gsee/error.hpp"
#include "gsee/gaussian_core.hpp"
#include "gsee/numeric.hpp"
#include "gsee/parallel.hpp"
#include "gsee/planner.hpp"
#include "gsee/rng.hpp"
#include "gsee/spectrum_sim.hpp"

namespace gsee {

using lab_real = long double;

enum class BoundDirection { upper, lower };
enum class BoundStatus { pass, fail, not_applicable };

inline const char* to_string(BoundStatus s) {
  switch (s) {
    case BoundStatus::pass: return "pass";
    case BoundStatus::fail: return "fail";
    default: return "not_applicable";
  }
}

/// One evaluation point (sigma, q, Delta, eta, K, m). Plan-derived points also
/// carry the round quantities used by the failure-rate and 2^q checks.
struct BoundPoint {
  std::string label;
  double sigma = 1.0;
  int q = 8;
  double Delta = 0.1;
  std::int64_t K = 1;
  double eta = 1.0;
  int m = 1;

  bool from_plan = false;
  double sigma_tilde = 0.0;
  double u = 0.0;
  double eps_tilde = 0.0;
  double C_eta = 0.0;
  double log_inv_delta = std::log(100.0);
  std::int64_t M0 = 0;

  /// Cauchy radii; 0 selects the values substituted in the 2^q theorem:
  /// delta1 = delta3 = 1/(pi 2^q), delta2 = 1/pi.
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta3 = 0.0;

  std::int64_t N() const { return std::int64_t{1} << q; }
  double shift_bins() const { return Delta * static_cast<double>(N()); }
  double radius1() const { return delta1 > 0.0 ? delta1 : 1.0 / (kPi * static_cast<double>(N())); }
  double radius2() const { return delta2 > 0.0 ? delta2 : 1.0 / kPi; }
  double radius3() const { return delta3 > 0.0 ? delta3 : 1.0 / (kPi * static_cast<double>(N())); }
  /// Printed sample count ceil(16/(3 eta) ln(3/delta)) unless set explicitly.
  std::int64_t samples() const {
    return M0 > 0 ? M0 : ceil_to_int(16.0 / (3.0 * eta) * (std::log(3.0) + log_inv_delta));
  }

  void validate() const {
    if (!(sigma > 0.0)) throw DomainError("BoundPoint: sigma must be positive");
    if (q < 2 || q > 24) throw DomainError("BoundPoint: q must lie in [2, 24]");
    if (!(Delta > 0.0 && Delta < 1.0)) throw DomainError("BoundPoint: Delta must lie in (0, 1)");
    if (K < 1 || 2 * K + 1 >= N()) throw DomainError("BoundPoint: need 1 <= K and 2K + 1 < 2^q");
    if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("BoundPoint: eta must lie in (0, 1]");
    if (m < 0 || m > 4) throw DomainError("BoundPoint: m must lie in [0, 4]");
  }
};

/// Point built from a sampling-round plan at gap Delta, failure budget delta
/// and relative target eps_tilde.
inline BoundPoint plan_point(double eta, double delta, double Delta, int m, double eps_tilde) {
  PlanInputs in;
  in.delta_fail = delta;
  in.eta = eta;
  in.Delta_true = Delta;
  in.epsilon = std::min(0.01, Delta / 2.0);
  in.m = m;
  const PlanParams plan = plan_sampling_round(in, eps_tilde);
  BoundPoint p;
  std::ostringstream label;
  label << "plan eta=" << eta << " delta=" << delta << " Delta=" << Delta << " m=" << m;
  p.label = label.str();
  p.sigma = plan.sigma_bins;
  p.q = plan.q;
  p.Delta = plan.Delta_work;
  p.K = plan.K;
  p.eta = eta;
  p.m = m;
  p.from_plan = true;
  p.sigma_tilde = plan.sigma_tilde;
  p.u = plan.u;
  p.eps_tilde = eps_tilde;
  p.C_eta = plan.C_eta;
  p.log_inv_delta = plan.log_inv_delta;
  p.M0 = plan.M0;
  return p;
}

/// Point on a fixed 2^q grid with gap given in bins, K = floor(F/2) for
/// F = floor((2/3) gap_bins).
inline BoundPoint grid_point(double sigma, int q, double gap_bins, double eta, int m, double delta = 0.01) {
  BoundPoint p;
  std::ostringstream label;
  label << "grid sigma=" << sigma << " q=" << q << " gap_bins=" << gap_bins << " eta=" << eta << " m=" << m;
  p.label = label.str();
  p.sigma = sigma;
  p.q = q;
  p.Delta = gap_bins / static_cast<double>(p.N());
  p.K = static_cast<std::int64_t>(std::floor(2.0 / 3.0 * gap_bins)) / 2;
  p.eta = eta;
  p.m = m;
  p.sigma_tilde = sigma / static_cast<double>(p.N());
  p.log_inv_delta = std::log(1.0 / delta);
  return p;
}

struct BoundCase {
  std::string name;
  /// Which printed form or sub-inequality of the lemma is evaluated.
  std::string variant;
  std::string point;
  std::string constant;
  std::string note;
  double sigma = 0.0;
  int q = 0;
  double Delta = 0.0;
  std::int64_t K = 0;
  double eta = 0.0;
  int m = 0;
  /// Offset used, or the extremizer when the case is a sup/inf over offsets.
  double mu_tilde = 0.0;
  lab_real exact = 0;
  lab_real bound = 0;
  /// Numerical uncertainty of `exact` (simulator distance to the ideal law,
  /// or working-precision floor). A case passes when the inequality holds to
  /// within this amount.
  lab_real resolution = 0;
  BoundDirection direction = BoundDirection::upper;
  bool preconditions_met = false;

  lab_real margin() const { return direction == BoundDirection::upper ? bound - exact : exact - bound; }
  BoundStatus status() const {
    if (!preconditions_met) return BoundStatus::not_applicable;
    return margin() + resolution >= 0 ? BoundStatus::pass : BoundStatus::fail;
  }
};

struct BoundReport {
  std::string grid;
  std::vector<BoundCase> cases;

  std::vector<BoundCase> failures() const {
    std::vector<BoundCase> out;
    for (const auto& c : cases) {
      if (c.status() == BoundStatus::fail) out.push_back(c);
    }
    return out;
  }
  std::size_t applicable() const {
    return static_cast<std::size_t>(
        std::count_if(cases.begin(), cases.end(), [](const BoundCase& c) { return c.preconditions_met; }));
  }
  std::map<std::string, std::size_t> count_by_name() const {
    std::map<std::string, std::size_t> out;
    for (const auto& c : cases) ++out[c.name];
    return out;
  }
};

inline const std::vector<double>& default_offsets() {
  static const std::vector<double> v{-0.5, -0.25, 0.0, 0.25};
  return v;
}

namespace lab {

using R = lab_real;

inline R window_sum(std::int64_t lo, std::int64_t hi, R sigma, R mu, int power = 0) {
  return lattice_sum<R>(lo, hi, sigma, mu, power);
}

/// sum_{|n| > K} n^power g0(n, mu)
inline R outside_sum(std::int64_t K, R sigma, R mu, int power = 0) {
  return lattice_sum<R>(K + 1, kPlusInfinity, sigma, mu, power) +
         lattice_sum<R>(kMinusInfinity, -K - 1, sigma, mu, power);
}

/// sum_{k != 0} G_m(-k) (real part) and sum_{k != 0} |G_m(-k)|.
inline PoissonSeries<R> alias(int m, R sigma, R mu) { return poisson_series<R>(m, sigma, mu); }

/// 𝒩(mu) - 1 without cancellation: the lattice sum over the whole line is
/// 1 + (signed Poisson series), minus the mass outside [-N/2, N/2 - 1].
inline R normalization_excess(R sigma, R mu, std::int64_t N) {
  const std::int64_t half = N / 2;
  return alias(0, sigma, mu).signed_series.real() - lattice_sum<R>(half, kPlusInfinity, sigma, mu) -
         lattice_sum<R>(kMinusInfinity, -half - 1, sigma, mu);
}

inline R wrapped(R x) { return x - std::nearbyint(x); }

inline R gm0(int m, R sigma, R mu) { return continuous_moment_Gm<R>(R(0), m, sigma, mu).real(); }

/// 4 e^{2 pi d |mu|} e^{2 pi^2 (d^2 + 2d) sigma^2} e^{-2 pi^2 sigma^2} m! / (pi^m d^m)
inline R disc_bound(int m, R sigma, R mu, R d) {
  const R pi = std::numbers::pi_v<R>;
  const R s2 = sigma * sigma;
  return 4 * std::exp(2 * pi * d * std::abs(mu) + 2 * pi * pi * (d * d + 2 * d) * s2 - 2 * pi * pi * s2) *
         R(factorial(m)) / std::pow(pi * d, m);
}

inline R disc_intermediate(int m, R sigma, R mu, R d) {
  const R pi = std::numbers::pi_v<R>;
  const R s2 = sigma * sigma;
  R geometric = 0;
  for (int j = 1; j < 100000; ++j) {
    const R t = std::exp(4 * pi * pi * j * d * s2 - 2 * pi * pi * R(j) * j * s2);
    geometric += t;
    if (t < series_floor<R>() && j > 2 * d) break;
  }
  return 2 * std::exp(2 * pi * d * std::abs(mu) + 2 * pi * pi * d * d * s2) * R(factorial(m)) * geometric /
         std::pow(pi * d, m);
}

/// (128/45) e^{2 pi d |mu|} e^{2 pi^2 d^2 sigma^2} m! / (pi^m d^m)
inline R norm_prefactor(int m, R sigma, R mu, R d) {
  const R pi = std::numbers::pi_v<R>;
  return R(128) / 45 * std::exp(2 * pi * d * std::abs(mu) + 2 * pi * pi * d * d * sigma * sigma) *
         R(factorial(m)) / std::pow(pi * d, m);
}

/// m! (2K+1)^m e^{2 pi d} / (pi^m d^m)
inline R window_prefactor(int m, std::int64_t K, R d) {
  const R pi = std::numbers::pi_v<R>;
  return R(factorial(m)) * std::pow(R(2 * K + 1), m) * std::exp(2 * pi * d) / std::pow(pi * d, m);
}

/// Direct lattice moment minus G_m(0) at 250 significant digits. Independent
/// of the Poisson route; resolves differences down to ~1e-240 of the moment,
/// which covers exp(-2 pi^2 sigma^2) for sigma up to about 5 bins.
inline constexpr double kDirectAliasingFloor = 1e-240;

inline R aliasing_direct(int m, double sigma, double mu) {
  using mp = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<250>>;
  const mp s(sigma);
  const mp c(mu);
  const mp norm = mp(1) / (s * sqrt(2 * boost::math::constants::pi<mp>()));
  const double reach = (std::sqrt(2.0 * 260.0 * std::log(10.0)) + 4.0) * sigma + 2.0;
  const auto lo = static_cast<std::int64_t>(std::floor(mu - reach));
  const auto hi = static_cast<std::int64_t>(std::ceil(mu + reach));
  mp total = 0;
  for (std::int64_t n = lo; n <= hi; ++n) {
    const mp x(n);
    const mp z = (x - c) / s;
    total += pow(x, m) * norm * exp(-z * z / 2);
  }
  const mp ss = s * s;
  mp g;
  switch (m) {
    case 0: g = 1; break;
    case 1: g = c; break;
    case 2: g = c * c + ss; break;
    case 3: g = c * c * c + 3 * c * ss; break;
    default: g = c * c * c * c + 6 * c * c * ss + 3 * ss * ss; break;
  }
  return static_cast<R>(total - g);
}

/// Quantities shared by every case at one point.
struct Context {
  const BoundPoint& p;
  R sigma;
  R D;
  std::int64_t N;
  R A0;
  R T_star;
  double T_arg = 0.0;
  R R2_star;
  double R_arg = 0.0;
  R L2_star;
  double L_arg = 0.0;

  explicit Context(const BoundPoint& pt) : p(pt), sigma(pt.sigma), D(R(pt.Delta) * R(pt.N())), N(pt.N()) {
    A0 = alias(0, sigma, 0).abs_series;
    T_star = maximize_over_offset([&](double mu) { return outside_sum(p.K, sigma, mu); }, &T_arg);
    R2_star = maximize_over_offset([&](double mu) { return window_sum(-p.K, p.K, sigma, mu + D); }, &R_arg);
    L2_star = maximize_over_offset([&](double mu) { return window_sum(-p.K, p.K, sigma, mu - D); }, &L_arg);
  }

  R R_norm() const { return std::sqrt(R2_star); }
  bool alias_ok() const { return A0 <= R(0.125); }
  bool tail_ok() const { return T_star <= R(0.125); }
  bool contamination_ok() const { return R_norm() / std::sqrt(R(p.eta)) <= R(0.125); }
  bool three_predicates() const { return alias_ok() && tail_ok() && contamination_ok(); }
  /// sqrt|G~0 - F~0| + sqrt(5/3) sqrt(1/eta) ||eps^(R)||
  R pollution_factor() const { return std::sqrt(T_star) + std::sqrt(R(5) / 3) * std::sqrt(1 / R(p.eta)) * R_norm(); }
  /// 3|G0(0) - G~0| + 3|G~0 - F~0| + (9/4) sqrt(1/eta) ||eps^(R)||
  R norm_factor() const { return 3 * A0 + 3 * T_star + R(9) / 4 * std::sqrt(1 / R(p.eta)) * R_norm(); }
  /// Weight of the contaminant relative to the ground state in the window
  /// statistics: ((1 - eta)/eta) 𝒩(mu) / 𝒩(mu + D).
  R contaminant_weight(R mu) const {
    if (p.eta >= 1.0) return 0;
    const R n0 = 1 + normalization_excess(sigma, mu, N);
    const R n1 = 1 + normalization_excess(sigma, wrapped(mu + D), N);
    return (1 - R(p.eta)) / R(p.eta) * n0 / n1;
  }

  BoundCase make(const std::string& name, const std::string& variant, double mu) const {
    BoundCase c;
    c.name = name;
    c.variant = variant;
    c.point = p.label;
    c.sigma = p.sigma;
    c.q = p.q;
    c.Delta = p.Delta;
    c.K = p.K;
    c.eta = p.eta;
    c.m = p.m;
    c.mu_tilde = mu;
    return c;
  }
};

/// Working-precision slack for comparisons of values computed along
/// different summation orders.
inline R rounding_slack(R a, R b) { return 64 * std::numeric_limits<R>::epsilon() * (std::abs(a) + std::abs(b)); }

}  // namespace lab

/// 𝒩_up, 𝒩_low and |1 - 1/𝒩| against the offset-independent bounds built
/// from |G0(0) - G~0| and the worst |G~0 - F~0|. Values are reported as
/// 𝒩 - 1 so that excesses far below double epsilon stay visible.
inline std::vector<BoundCase> check_normalization_bounds(const BoundPoint& p) {
  using lab::R;
  p.validate();
  const lab::Context ctx(p);
  const R slack = ctx.A0 + ctx.T_star;
  const bool pre = 1 - slack > 0;
  auto excess = [&](double mu) { return lab::normalization_excess(ctx.sigma, mu, ctx.N); };

  std::vector<BoundCase> out;
  double arg = 0.0;
  const R hi = maximize_over_offset(excess, &arg);
  BoundCase up = ctx.make("norm_up", "N-1", arg);
  up.exact = hi;
  up.bound = slack;
  up.constant = "N_up = 1 + |G~0-F~0| + |G0(0)-G~0|";
  up.resolution = lab::rounding_slack(hi, slack);
  up.preconditions_met = pre;
  out.push_back(up);

  const R lo = minimize_over_offset(excess, &arg);
  BoundCase low = ctx.make("norm_low", "N-1", arg);
  low.direction = BoundDirection::lower;
  low.exact = lo;
  low.bound = -slack;
  low.constant = "N_low = 1 - |G~0-F~0| - |G0(0)-G~0|";
  low.resolution = lab::rounding_slack(lo, slack);
  low.preconditions_met = pre;
  out.push_back(low);

  const R inv = maximize_over_offset(
      [&](double mu) {
        const R e = excess(mu);
        return std::abs(e) / (1 + e);
      },
      &arg);
  BoundCase ic = ctx.make("inv_norm", "|1-1/N|", arg);
  ic.exact = inv;
  ic.bound = pre ? slack / (1 - slack) : std::numeric_limits<R>::infinity();
  ic.constant = "(|G~0-F~0| + |G0(0)-G~0|) / N_low";
  ic.resolution = lab::rounding_slack(inv, ic.bound);
  ic.preconditions_met = pre;
  out.push_back(ic);
  for (auto& c : out) c.note = pre ? "" : "N_low <= 0";
  return out;
}

inline BoundCase check_tail(const BoundPoint& p) {
  using lab::R;
  p.validate();
  const lab::Context ctx(p);
  const R kh = R(p.K) - R(0.5);
  BoundCase c = ctx.make("tail_G0F0", "worst offset", ctx.T_arg);
  c.exact = ctx.T_star;
  c.bound = std::exp(-kh * kh / (2 * ctx.sigma * ctx.sigma));
  c.constant = "exp(-(K-1/2)^2/(2 sigma^2))";
  c.resolution = lab::rounding_slack(c.exact, c.bound);
  c.preconditions_met = ctx.sigma <= kh;
  if (!c.preconditions_met) c.note = "sigma > K - 1/2";
  return c;
}

/// Right and left contamination sums maximized over the offset, against
/// exp(-(2^q Delta - K - 1/2)^2 / (2 sigma^2)).
inline std::vector<BoundCase> check_contamination(const BoundPoint& p) {
  using lab::R;
  p.validate();
  const lab::Context ctx(p);
  const R gap = ctx.D - R(p.K) - R(0.5);
  const R bound = std::exp(-gap * gap / (2 * ctx.sigma * ctx.sigma));
  const bool pre = gap > 0;
  std::vector<BoundCase> out;
  for (const bool right : {true, false}) {
    BoundCase c = ctx.make(right ? "contamination_R" : "contamination_L", "worst offset", right ? ctx.R_arg : ctx.L_arg);
    c.exact = right ? ctx.R2_star : ctx.L2_star;
    c.bound = bound;
    c.constant = "exp(-(2^q Delta - K - 1/2)^2/(2 sigma^2))";
    c.resolution = lab::rounding_slack(c.exact, c.bound);
    c.preconditions_met = pre;
    std::ostringstream note;
    note << std::setprecision(6) << "max R - max L = " << static_cast<double>(ctx.R2_star - ctx.L2_star);
    if (!pre) note << "; 2^q Delta <= K + 1/2";
    if (c.exact == 0 && c.bound == 0) note << "; both sides below the long double range";
    c.note = note.str();
    out.push_back(c);
  }
  return out;
}

/// Window statistics of a two-state spectrum (ground overlap eta at offset mu
/// from bin g, contaminant at +shift bins) from the simulator.
struct SimulatedWindow {
  double hit_rate = 0.0;
  /// |E_window(x^m) - G_m(0)|, with x measured from the ground bin.
  double moment_error = 0.0;
  double window_mass_resolution = 0.0;
  double moment_resolution = 0.0;
};

inline SimulatedWindow simulate_window(const BoundPoint& p, double mu, double contaminant_shift_bins,
                                       const std::vector<double>& amplitudes) {
  const std::int64_t N = p.N();
  const double Nd = static_cast<double>(N);
  const double g = -std::nearbyint(Nd / 5.0);
  const double theta0 = (g + mu) / Nd;
  const double theta1 = theta0 + contaminant_shift_bins / Nd;
  if (std::abs(theta1) > 0.5) throw DomainError("simulate_window: contaminant phase outside [-1/2, 1/2]");
  const auto P0 = distribution_from_amplitudes(amplitudes, theta0);
  const auto P1 = distribution_from_amplitudes(amplitudes, theta1);
  const double tv = p.eta * total_variation(P0, ideal_distribution(theta0, p.sigma, p.q)) +
                    (1.0 - p.eta) * total_variation(P1, ideal_distribution(theta1, p.sigma, p.q));
  double mass = 0.0;
  double moment = 0.0;
  const auto gi = static_cast<std::int64_t>(g);
  for (std::int64_t x = -p.K; x <= p.K; ++x) {
    const auto z = static_cast<std::size_t>(((gi + x) % N + N) % N);
    const double w = p.eta * P0[z] + (1.0 - p.eta) * P1[z];
    mass += w;
    moment += std::pow(static_cast<double>(x), p.m) * w;
  }
  SimulatedWindow s;
  s.hit_rate = mass;
  const double mean = moment / mass;
  s.moment_error = std::abs(mean - continuous_moment_Gm(0.0, p.m, p.sigma, mu).real());
  s.window_mass_resolution = 2.0 * tv + 1e-13;
  s.moment_resolution =
      (std::pow(static_cast<double>(p.K), p.m) + std::abs(mean)) * 2.0 * (2.0 * tv + 1e-13) / mass + 1e-13;
  return s;
}

/// Exact window mass on the worst-case two-state spectrum against the lemma's
/// lower bound and against (3/8) eta.
inline std::vector<BoundCase> check_hit_rate(const BoundPoint& p, const std::vector<double>& offsets = default_offsets(),
                                             std::optional<double> contaminant_shift_bins = std::nullopt) {
  using lab::R;
  p.validate();
  const lab::Context ctx(p);
  const auto amps = gaussian_ancilla_amplitudes(p.sigma, p.q);
  const double shift = contaminant_shift_bins.value_or(p.shift_bins());
  const R lemma = R(p.eta) / (1 + ctx.A0 + ctx.T_star) *
                  (1 - ctx.A0 - ctx.T_star - R(9) / 4 * std::sqrt(1 / R(p.eta)) * ctx.R_norm());
  std::vector<BoundCase> out;
  for (const double mu : offsets) {
    const auto sim = simulate_window(p, mu, shift, amps);
    BoundCase c = ctx.make("hit_rate", "lemma", mu);
    c.direction = BoundDirection::lower;
    c.exact = sim.hit_rate;
    c.bound = lemma;
    c.resolution = sim.window_mass_resolution;
    c.constant = "eta/(1+A+T) (1 - A - T - 9/4 sqrt(1/eta) ||eps_R||)";
    c.preconditions_met = ctx.three_predicates();
    out.push_back(c);
    BoundCase k = ctx.make("hit_rate_corollary", "3/8", mu);
    k.direction = BoundDirection::lower;
    k.exact = sim.hit_rate;
    k.bound = R(3) / 8 * R(p.eta);
    k.resolution = sim.window_mass_resolution;
    k.constant = "(3/8) eta";
    k.preconditions_met = ctx.three_predicates();
    out.push_back(k);
  }
  return out;
}

/// Component bounds of the moment-error chain at one offset.
struct MomentChainBounds {
  lab_real eps_norm = 0;
  lab_real disc = 0;
  lab_real disc_intermediate = 0;
  lab_real trunc_11_4 = 0;
  lab_real trunc_25_8 = 0;
  /// eps_norm + (5/2) disc + (5/2) trunc_11_4
  lab_real total = 0;
};

inline MomentChainBounds moment_chain_bounds(const lab::Context& ctx, double mu) {
  using lab::R;
  const BoundPoint& p = ctx.p;
  MomentChainBounds b;
  b.eps_norm = lab::norm_prefactor(p.m, ctx.sigma, mu, p.radius3()) * ctx.norm_factor();
  b.disc = lab::disc_bound(p.m, ctx.sigma, mu, p.radius1());
  b.disc_intermediate = lab::disc_intermediate(p.m, ctx.sigma, mu, p.radius1());
  const R window = lab::window_prefactor(p.m, p.K, p.radius2()) * ctx.pollution_factor();
  b.trunc_11_4 = R(11) / 4 * window;
  b.trunc_25_8 = R(25) / 8 * window;
  b.total = b.eps_norm + R(5) / 2 * b.disc + R(55) / 8 * window;
  return b;
}

inline MomentChainBounds moment_chain_bounds(const BoundPoint& p, double mu) {
  p.validate();
  return moment_chain_bounds(lab::Context(p), mu);
}

/// Exact pieces of the window moment statistic in the ideal model, each
/// computed without cancellation.
struct MomentChainExact {
  lab_real signed_alias_0 = 0;
  lab_real signed_alias_m = 0;
  lab_real tail_0 = 0;
  lab_real tail_m = 0;
  lab_real contaminant_0 = 0;
  lab_real contaminant_m = 0;
  lab_real weight = 0;
  lab_real gm0 = 0;
  /// F~0 + w C0, the window mass relative to |gamma0|^2 / 𝒩.
  lab_real window_mass = 0;
  /// |G_m(0) - F~m^polut / (F~0 + w C0)|
  lab_real total_error = 0;
  /// |1 - 1/(F~0 + w C0)| |G_m(0)|
  lab_real norm_error = 0;
  /// |G~m - F~m^polut|
  lab_real trunc_polut = 0;
};

inline MomentChainExact moment_chain_exact(const lab::Context& ctx, double mu) {
  using lab::R;
  const BoundPoint& p = ctx.p;
  MomentChainExact e;
  const R s = ctx.sigma;
  e.signed_alias_0 = lab::alias(0, s, mu).signed_series.real();
  e.signed_alias_m = lab::alias(p.m, s, mu).signed_series.real();
  e.tail_0 = lab::outside_sum(p.K, s, mu);
  e.tail_m = lab::outside_sum(p.K, s, mu, p.m);
  e.contaminant_0 = lab::window_sum(-p.K, p.K, s, mu + ctx.D);
  e.contaminant_m = lab::window_sum(-p.K, p.K, s, mu + ctx.D, p.m);
  e.weight = ctx.contaminant_weight(mu);
  e.gm0 = lab::gm0(p.m, s, mu);
  const R excess = e.signed_alias_0 - e.tail_0 + e.weight * e.contaminant_0;
  e.window_mass = 1 + excess;
  const R numerator = e.gm0 * excess - e.signed_alias_m + e.tail_m - e.weight * e.contaminant_m;
  e.total_error = std::abs(numerator) / e.window_mass;
  e.norm_error = std::abs(excess) / e.window_mass * std::abs(e.gm0);
  e.trunc_polut = std::abs(e.tail_m - e.weight * e.contaminant_m);
  return e;
}

inline MomentChainExact moment_chain_exact(const BoundPoint& p, double mu) {
  p.validate();
  return moment_chain_exact(lab::Context(p), mu);
}

/// aliasing, discretization, truncation+pollution, normalization and total
/// moment-error cases at each offset; 2^q requirement cases at plan points.
inline std::vector<BoundCase> check_moment_error_chain(const BoundPoint& p,
                                                       const std::vector<double>& offsets = default_offsets()) {
  using lab::R;
  p.validate();
  const lab::Context ctx(p);
  const int m = p.m;
  const auto alias_pre =
      aliasing_error(m, GaussianParams(p.sigma, 0.0, p.q), 0, p.radius1()).preconditions_met && p.radius1() < 0.5;
  std::vector<BoundCase> out;
  R worst_relative = 0;
  double worst_mu = 0.0;

  for (const double mu : offsets) {
    const auto series = lab::alias(m, ctx.sigma, mu);
    const auto bounds = moment_chain_bounds(ctx, mu);
    const auto exact = moment_chain_exact(ctx, mu);

    BoundCase a = ctx.make("aliasing_m", "direct lattice vs abs Poisson series", mu);
    a.exact = std::abs(lab::aliasing_direct(m, p.sigma, mu));
    a.bound = series.abs_series;
    // exp(-2 pi^2 sigma^2 k^2) carries relative error ~ eps * 2 pi^2 sigma^2
    // in the extended-precision Poisson terms.
    a.resolution = R(lab::kDirectAliasingFloor) * (1 + std::pow(R(std::abs(mu) + 10 * p.sigma), m)) +
                   8 * std::numeric_limits<R>::epsilon() * (1 + 2 * kPi * kPi * p.sigma * p.sigma) *
                       (a.exact + a.bound);
    a.constant = "sum_{k!=0} |G_m(-k)|";
    a.preconditions_met = true;
    out.push_back(a);

    for (const bool intermediate : {false, true}) {
      BoundCase d = ctx.make("disc_error_m", intermediate ? "intermediate" : "final", mu);
      d.exact = std::abs(series.signed_series.real());
      d.bound = intermediate ? bounds.disc_intermediate : bounds.disc;
      d.resolution = lab::rounding_slack(d.exact, d.bound);
      d.constant = intermediate ? "2 e^{2pi d1|mu|} e^{2pi^2 d1^2 s^2} m! 2^m/((2pi)^m d1^m) sum_k e^{..}"
                                : "4 e^{2pi d1|mu|} e^{2pi^2(d1^2+2d1)s^2} e^{-2pi^2 s^2} m!/(pi^m d1^m)";
      d.preconditions_met = alias_pre;
      out.push_back(d);
    }

    for (const bool wide : {false, true}) {
      BoundCase t = ctx.make("trunc_polut_m", wide ? "25/8" : "11/4", mu);
      t.exact = exact.trunc_polut;
      t.bound = wide ? bounds.trunc_25_8 : bounds.trunc_11_4;
      t.resolution = lab::rounding_slack(exact.tail_m, exact.weight * exact.contaminant_m);
      t.constant = wide ? "25/8 m!(2K+1)^m e^2 (sqrt T + sqrt(5/3) sqrt(1/eta) ||eps_R||)"
                        : "11/4 m!(2K+1)^m e^2 (sqrt T + sqrt(5/3) sqrt(1/eta) ||eps_R||)";
      t.preconditions_met = ctx.three_predicates();
      t.note = "contaminant added incoherently (orthogonal system register)";
      out.push_back(t);
    }

    BoundCase n = ctx.make("eps_norm_m", "lemma", mu);
    n.exact = exact.norm_error;
    n.bound = bounds.eps_norm;
    n.resolution = lab::rounding_slack(n.exact, 0) + 4 * std::numeric_limits<R>::epsilon() * std::abs(exact.gm0) *
                                                         (std::abs(exact.signed_alias_0) + exact.tail_0);
    n.constant = "128/45 e^{2pi d3|mu|} e^{2pi^2 d3^2 s^2} m!/(pi^m d3^m) (3A + 3T + 9/4 sqrt(1/eta)||eps_R||)";
    n.preconditions_met = ctx.three_predicates() && std::abs(mu) <= static_cast<double>(p.K);
    out.push_back(n);

    BoundCase tot = ctx.make("total_eps_m", "chain", mu);
    tot.exact = exact.total_error;
    tot.bound = bounds.total;
    tot.resolution = lab::rounding_slack(tot.exact, 0) + n.resolution;
    tot.constant = "eps_norm + 5/2 disc + 55/8 m!(2K+1)^m e^2 (sqrt T + sqrt(5/3) sqrt(1/eta) ||eps_R||)";
    tot.preconditions_met = n.preconditions_met && alias_pre;
    out.push_back(tot);

    const R relative = exact.total_error / std::pow(R(ctx.N), m);
    if (relative >= worst_relative) {
      worst_relative = relative;
      worst_mu = mu;
    }
  }

  if (!p.from_plan) return out;

  const double md = m;
  const double Nd = static_cast<double>(ctx.N);
  const bool theorem_pre = ctx.three_predicates() && 1.0 / Nd <= p.Delta / 3.0 &&
                           p.sigma_tilde <= std::pow(2.0, -0.25) * std::sqrt(1.0 / Nd) * std::sqrt(p.Delta / (12.0 * kPi));
  const double mf = factorial(m);
  const double u_pred = std::log(md / (2.0 * kE * kPi * kPi * p.sigma_tilde * p.sigma_tilde)) +
                        (2.0 / md) * std::log(mf * mf * p.C_eta / p.eps_tilde);
  const bool pre = theorem_pre && u_pred > 1.0 && p.u > 0.0;

  BoundCase planned = ctx.make("q_requirement", "planned 2^q", 0.0);
  planned.direction = BoundDirection::lower;
  planned.exact = ctx.N;
  planned.bound = std::sqrt(md) / (2.0 * kPi * p.sigma_tilde) * std::sqrt(1.0 + 3.0 * p.u);
  planned.constant = "sqrt(m)/(2 pi sigma~) sqrt(1 + 3u)";
  planned.preconditions_met = pre;
  out.push_back(planned);

  const double w = -lambert_Wm1(-std::exp(-p.u - 1.0));
  BoundCase lu = ctx.make("q_requirement", "Lambert vs sandwich upper", 0.0);
  lu.exact = w;
  lu.bound = 1.0 + std::sqrt(2.0 * p.u) + p.u;
  lu.resolution = 1e-12 * w;
  lu.constant = "-W_{-1}(-e^{-u-1}) <= 1 + sqrt(2u) + u";
  lu.preconditions_met = p.u > 0.0;
  out.push_back(lu);
  BoundCase ll = ctx.make("q_requirement", "Lambert vs sandwich lower", 0.0);
  ll.direction = BoundDirection::lower;
  ll.exact = w;
  ll.bound = 1.0 + std::sqrt(2.0 * p.u) + 2.0 * p.u / 3.0;
  ll.resolution = 1e-12 * w;
  ll.constant = "-W_{-1}(-e^{-u-1}) >= 1 + sqrt(2u) + 2u/3";
  ll.preconditions_met = p.u > 0.0;
  out.push_back(ll);

  const R s = ctx.sigma;
  const R pi = std::numbers::pi_v<R>;
  const R grouped = std::pow(R(ctx.N), m) * R(mf * mf) * std::exp(-2 * pi * pi * s * s) * R(p.C_eta);
  BoundCase g = ctx.make("q_requirement", "grouped bound vs target", 0.0);
  g.exact = grouped;
  g.bound = p.eps_tilde;
  g.resolution = lab::rounding_slack(g.exact, g.bound);
  g.constant = "(2^q)^m (m!)^2 exp(-2 pi^2 sigma^2) C(eta)";
  g.preconditions_met = pre;
  out.push_back(g);

  BoundCase me = ctx.make("q_requirement", "exact relative error vs grouped", worst_mu);
  me.exact = worst_relative;
  me.bound = grouped;
  me.resolution = lab::rounding_slack(me.exact, me.bound);
  me.constant = "(2^q)^m (m!)^2 exp(-2 pi^2 sigma^2) C(eta)";
  me.preconditions_met = pre;
  out.push_back(me);

  const auto amps = gaussian_ancilla_amplitudes(p.sigma, p.q);
  double sim_worst = 0.0;
  double sim_res = 0.0;
  double sim_mu = 0.0;
  for (const double mu : offsets) {
    const auto sim = simulate_window(p, mu, p.shift_bins(), amps);
    const double scale = std::pow(Nd, m);
    if (sim.moment_error / scale >= sim_worst) {
      sim_worst = sim.moment_error / scale;
      sim_res = sim.moment_resolution / scale;
      sim_mu = mu;
    }
  }
  BoundCase sv = ctx.make("q_requirement", "simulated relative error vs target", sim_mu);
  sv.exact = sim_worst;
  sv.bound = p.eps_tilde;
  sv.resolution = sim_res;
  sv.constant = "eps~_m";
  sv.preconditions_met = pre;
  out.push_back(sv);
  return out;
}

/// Pieces of the per-round failure union bound in the ideal model at one offset.
struct FailRateExact {
  lab_real p_left_half = 0;
  lab_real hit_rate = 0;
  lab_real p_left = 0;
  lab_real p_gap = 0;
  lab_real log_p_zero = 0;
  lab_real assembled = 0;
};

inline FailRateExact fail_rate_exact(const BoundPoint& p, double mu) {
  using lab::R;
  const R sigma = p.sigma;
  const R D = R(p.Delta) * R(p.N());
  const std::int64_t N = p.N();
  const R s = sigma;
  const R eta = p.eta;
  const R n0 = 1 + lab::normalization_excess(s, mu, N);
  const R n1 = 1 + lab::normalization_excess(s, lab::wrapped(mu + D), N);
  auto mass = [&](std::int64_t lo, std::int64_t hi) {
    return eta / n0 * lab::window_sum(lo, hi, s, mu) + (1 - eta) / n1 * lab::window_sum(lo, hi, s, mu + D);
  };
  FailRateExact e;
  e.p_left_half = mass(-p.K, 0);
  e.hit_rate = mass(-p.K, p.K);
  e.p_left = mass(kMinusInfinity, -p.K - 1);
  e.p_gap = mass(p.K + 1, 2 * p.K);
  const R M0 = R(p.samples());
  e.log_p_zero = M0 * std::log1p(-e.p_left_half);
  e.assembled = std::exp(e.log_p_zero) + M0 * (e.p_left + e.p_gap);
  return e;
}

/// Failure-union pieces against the printed bounds. p_zero cases are compared
/// on the natural-log scale.
inline std::vector<BoundCase> check_fail_rate(const BoundPoint& p, const std::vector<double>& offsets = default_offsets()) {
  using lab::R;
  p.validate();
  const lab::Context ctx(p);
  const R eta = p.eta;
  const std::int64_t M0 = p.samples();
  const double Nd = static_cast<double>(ctx.N);
  const double amp = detail::contamination_amplification(p.eta);
  const double ceiling =
      (p.Delta / 6.0) / std::sqrt(2.0 * (std::log(4.0 * static_cast<double>(M0)) + p.log_inv_delta + std::log(amp)));
  const double sigma_tilde = p.sigma / Nd;
  const bool pre = ctx.alias_ok() && ctx.tail_ok() && 1.0 / Nd <= p.Delta / 6.0 && sigma_tilde <= ceiling;
  std::string pre_note;
  if (!pre) {
    pre_note = sigma_tilde > ceiling ? "sigma~ above the printed ceiling" : "1/2^q > Delta/6 or a 1/8 predicate fails";
  }
  const R third = ctx.D / 3 - R(1.5);
  const R gap_exp = std::exp(-third * third / (2 * ctx.sigma * ctx.sigma));
  const R log_delta = -R(p.log_inv_delta);

  std::vector<BoundCase> out;
  BoundCase inv = ctx.make("fail_rate_components", "exp(-3 eta M0/16) <= delta/3 (log)", 0.0);
  inv.exact = -3 * eta * R(M0) / 16;
  inv.bound = log_delta - std::log(R(3));
  inv.resolution = lab::rounding_slack(inv.exact, inv.bound);
  inv.constant = "M0 = ceil(16/(3 eta) ln(3/delta))";
  inv.preconditions_met = true;
  out.push_back(inv);

  for (const double mu : offsets) {
    const auto e = fail_rate_exact(p, mu);
    auto add = [&](const std::string& variant, R exact, R bound, BoundDirection dir, const std::string& constant,
                   bool extra_pre = true) {
      BoundCase c = ctx.make("fail_rate_components", variant, mu);
      c.direction = dir;
      c.exact = exact;
      c.bound = bound;
      c.resolution = lab::rounding_slack(exact, bound);
      c.constant = constant;
      c.preconditions_met = pre && extra_pre;
      c.note = pre_note;
      out.push_back(c);
    };
    add("p_zero (log)", e.log_p_zero, -3 * eta * R(M0) / 16, BoundDirection::upper, "exp(-3 eta M0/16)");
    add("p_left_half >= hit/2", e.p_left_half, e.hit_rate / 2, BoundDirection::lower, "p~0/2");
    add("p_gap", e.p_gap, R(4) / 3 * gap_exp * R(amp), BoundDirection::upper,
        "4/3 exp(-(2^q Delta/3 - 3/2)^2/(2 sigma^2)) (1 + sqrt(5/3) sqrt((1-eta)/eta))^2", third > 0);
    add("p_left", e.p_left, R(4) / 3 * gap_exp, BoundDirection::upper, "4/3 exp(-(2^q Delta/3 - 3/2)^2/(2 sigma^2))",
        third > 0);
    add("union", e.assembled, std::exp(log_delta), BoundDirection::upper, "p_zero + M0 p_left + M0 p_gap <= delta",
        third > 0);
  }
  return out;
}

/// Monte-Carlo round failures (no left-half sample, or any sample left of the
/// window or inside the gap segment) on the simulated two-state spectrum,
/// against the exact assembled union plus a 3-sigma binomial band.
inline BoundCase check_fail_rate_monte_carlo(const BoundPoint& p, double mu, std::size_t rounds, std::uint64_t seed) {
  using lab::R;
  p.validate();
  const lab::Context ctx(p);
  const std::int64_t N = p.N();
  const double Nd = static_cast<double>(N);
  const double g = -std::nearbyint(Nd / 5.0);
  const double theta0 = (g + mu) / Nd;
  SpectrumSpec spec;
  spec.eigenphases = {theta0, theta0 + p.Delta};
  spec.overlaps_sq = {p.eta, 1.0 - p.eta};
  if (p.eta >= 1.0) {
    spec.eigenphases.pop_back();
    spec.overlaps_sq.pop_back();
  }
  const auto dist = mixed_distribution_from_amplitudes(spec, gaussian_ancilla_amplitudes(p.sigma, p.q), 1);
  const OutcomeSampler sampler(dist.mixed);
  const std::int64_t M0 = p.samples();
  const auto gi = static_cast<std::int64_t>(g);
  std::size_t failures = 0;
  for (std::size_t r = 0; r < rounds; ++r) {
    CounterRng rng(derive_seed(seed, r));
    bool left_half = false;
    bool bad = false;
    for (std::int64_t i = 0; i < M0 && !bad; ++i) {
      const std::int64_t z = sampler.draw(rng);
      const auto d = static_cast<std::int64_t>(wrap_mod(z, static_cast<double>(gi), p.q));
      if (d < -p.K || (d > p.K && d <= 2 * p.K)) bad = true;
      if (d >= -p.K && d <= 0) left_half = true;
    }
    if (bad || !left_half) ++failures;
  }
  const auto exact = fail_rate_exact(p, mu);
  const R pa = std::min<R>(exact.assembled, 1);
  const R n = R(rounds);
  BoundCase c = ctx.make("fail_rate_components", "Monte-Carlo frequency", mu);
  c.exact = R(failures) / n;
  c.bound = pa + 3 * std::sqrt(pa * (1 - pa) / n) + 3 / n;
  c.constant = "assembled union + 3 sqrt(p(1-p)/n) + 3/n";
  c.preconditions_met = true;
  std::ostringstream note;
  note << failures << " failures in " << rounds << " rounds of " << M0 << " samples";
  c.note = note.str();
  return c;
}

/// Seeded perturbations f = h - e of the window vector h = sqrt(g0) on
/// x in [x0 - K, x0 + K], x0 = floor(K/2), against both printed forms.
inline std::vector<BoundCase> check_window_moment_bound(const BoundPoint& p, std::uint64_t seed, std::size_t draws = 2,
                                                        double scale = 0.1) {
  using lab::R;
  p.validate();
  const lab::Context ctx(p);
  const std::int64_t x0 = p.K / 2;
  const R pref = p.m == 0 ? R(1) : lab::window_prefactor(p.m, p.K, p.radius2());
  std::vector<BoundCase> out;
  for (std::size_t d = 0; d < draws; ++d) {
    CounterRng rng(derive_seed(seed, d));
    R diff = 0, l1 = 0, h2 = 0, e2 = 0;
    for (std::int64_t x = x0 - p.K; x <= x0 + p.K; ++x) {
      const R h = std::sqrt(g0<R>(R(x), ctx.sigma, R(0)));
      const R e = R(scale) * R(2.0 * rng.uniform() - 1.0) * h;
      const R f = h - e;
      const R dd = h * h - f * f;
      diff += std::pow(R(x), p.m) * dd;
      l1 += std::abs(dd);
      h2 += h * h;
      e2 += e * e;
    }
    for (const bool second : {false, true}) {
      BoundCase c = ctx.make("HmFm_window", second ? "||e||^2 + 2||h|| ||e||" : "|| |h|^2 - |f|^2 ||_1", 0.0);
      c.exact = std::abs(diff);
      c.bound = pref * (second ? e2 + 2 * std::sqrt(h2) * std::sqrt(e2) : l1);
      c.resolution = lab::rounding_slack(c.exact, c.bound);
      c.constant = p.m == 0 ? "1" : "m!(2K+1)^m e^{2 pi d2}/(pi^m d2^m)";
      c.preconditions_met = std::max(std::abs(x0 - p.K), std::abs(x0 + p.K)) <= 2 * p.K;
      std::ostringstream note;
      note << "draw " << d << ", x0=" << x0;
      c.note = note.str();
      out.push_back(c);
    }
  }
  return out;
}

/// Every case kind at one point.
inline std::vector<BoundCase> evaluate_point(const BoundPoint& p, std::uint64_t seed) {
  std::vector<BoundCase> out;
  auto append = [&](std::vector<BoundCase> v) { out.insert(out.end(), v.begin(), v.end()); };
  append(check_normalization_bounds(p));
  out.push_back(check_tail(p));
  append(check_contamination(p));
  append(check_hit_rate(p));
  append(check_moment_error_chain(p));
  append(check_window_moment_bound(p, seed));
  append(check_fail_rate(p));
  return out;
}

struct GridOptions {
  unsigned threads = 1;
  std::uint64_t seed = 0x5eed;
  /// Rounds per Monte-Carlo failure check; 0 disables those cases.
  std::size_t monte_carlo_rounds = 10000;
};

inline BoundReport evaluate_grid(const std::vector<BoundPoint>& points, const std::string& description,
                                 const GridOptions& opt = {}, const std::vector<std::size_t>& monte_carlo_points = {}) {
  std::vector<std::vector<BoundCase>> per(points.size());
  parallel_for(points.size(), opt.threads,
               [&](std::size_t i) { per[i] = evaluate_point(points[i], derive_seed(opt.seed, i)); });
  std::vector<BoundCase> mc(monte_carlo_points.size());
  if (opt.monte_carlo_rounds > 0) {
    parallel_for(monte_carlo_points.size(), opt.threads, [&](std::size_t j) {
      const std::size_t i = monte_carlo_points[j];
      mc[j] = check_fail_rate_monte_carlo(points.at(i), -0.5, opt.monte_carlo_rounds,
                                          derive_seed(opt.seed ^ 0x4d43ULL, i));
    });
  } else {
    mc.clear();
  }
  BoundReport r;
  r.grid = description;
  for (auto& v : per) r.cases.insert(r.cases.end(), v.begin(), v.end());
  r.cases.insert(r.cases.end(), mc.begin(), mc.end());
  return r;
}

/// Plan points at eta x delta x Delta x m plus fixed-grid points where every
/// exact quantity is well inside double range.
inline std::vector<BoundPoint> default_grid_points() {
  std::vector<BoundPoint> pts;
  for (const double eta : {0.25, 0.5, 1.0}) {
    for (const double delta : {0.01, 0.001}) {
      for (const double Delta : {0.05, 0.1, 0.2}) {
        for (const int m : {1, 2}) {
          pts.push_back(plan_point(eta, delta, Delta, m, kDefaultBiasSplit * 0.01));
        }
      }
    }
  }
  for (const double sigma : {2.0, 3.0, 4.0}) {
    for (const double gap : {36.0, 60.0}) {
      for (const double eta : {0.25, 0.5, 1.0}) {
        for (const int m : {1, 2}) pts.push_back(grid_point(sigma, 10, gap, eta, m));
      }
    }
  }
  return pts;
}

inline const char* default_grid_description() {
  return "plan points: eta {0.25,0.5,1} x delta {0.01,0.001} x Delta {0.05,0.1,0.2} x m {1,2}, eps~ = c*0.01; "
         "fixed points: q=10, sigma {2,3,4} x gap {36,60} bins x eta {0.25,0.5,1} x m {1,2}; "
         "offsets {-1/2,-1/4,0,1/4}; Monte-Carlo failure checks at Delta=0.2, delta=0.01, m=1";
}

inline BoundReport run_default_grid(const GridOptions& opt = {}) {
  const auto pts = default_grid_points();
  // Monte-Carlo failure checks at the Delta=0.2, delta=0.01, m=1 plan points.
  std::vector<std::size_t> mc;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& l = pts[i].label;
    if (pts[i].from_plan && l.find("delta=0.01 ") != std::string::npos && l.find("Delta=0.2 ") != std::string::npos &&
        pts[i].m == 1) {
      mc.push_back(i);
    }
  }
  return evaluate_grid(pts, default_grid_description(), opt, mc);
}

/// Small-width points where the printed contamination and tail bounds are
/// probed outside the regime reached by planned rounds.
inline std::vector<BoundPoint> probe_grid_points() {
  std::vector<BoundPoint> pts;
  for (const double sigma : {0.3, 0.35, 0.5, 1.0}) {
    for (const double gap : {6.0, 9.0, 12.0}) pts.push_back(grid_point(sigma, 8, gap, 1.0, 1));
  }
  return pts;
}

inline BoundReport run_probe_grid(const GridOptions& opt = {}) {
  GridOptions o = opt;
  o.monte_carlo_rounds = 0;
  return evaluate_grid(probe_grid_points(), "probe: q=8, sigma {0.3,0.35,0.5,1} x gap {6,9,12} bins, eta=1, m=1", o);
}

inline void write_bounds_csv(std::ostream& os, const BoundReport& r) {
  os << "case,variant,point,sigma,q,Delta,K,eta,m,mu_tilde,direction,exact,bound,margin,resolution,preconditions_met,"
        "status,constant,note\n";
  auto quoted = [](const std::string& s) {
    std::string out = "\"";
    for (const char ch : s) {
      if (ch == '"') out += '"';
      out += ch;
    }
    return out + "\"";
  };
  const auto old = os.precision();
  os << std::setprecision(17);
  for (const auto& c : r.cases) {
    os << c.name << ',' << quoted(c.variant) << ',' << quoted(c.point) << ',' << c.sigma << ',' << c.q << ','
       << c.Delta << ',' << c.K << ',' << c.eta << ',' << c.m << ',' << c.mu_tilde << ','
       << (c.direction == BoundDirection::upper ? "upper" : "lower") << ',' << c.exact << ',' << c.bound << ','
       << c.margin() << ',' << c.resolution << ',' << (c.preconditions_met ? 1 : 0) << ',' << to_string(c.status())
       << ',' << quoted(c.constant) << ',' << quoted(c.note) << '\n';
  }
  os.precision(old);
}

inline void write_bounds_summary(std::ostream& os, const BoundReport& r) {
  std::map<std::string, std::array<std::size_t, 3>> tally;
  for (const auto& c : r.cases) ++tally[c.name][static_cast<int>(c.status())];
  os << "grid: " << r.grid << '\n';
  os << "cases: " << r.cases.size() << ", applicable: " << r.applicable() << ", failures: " << r.failures().size()
     << '\n';
  for (const auto& [name, t] : tally) {
    os << "  " << std::left << std::setw(22) << name << " pass " << t[0] << "  fail " << t[1] << "  n/a " << t[2]
       << '\n';
  }
  os << std::right;
}

}  // namespace gsee
