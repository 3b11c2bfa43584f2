#pragma once

// Closed-form parameter planning for the Gaussian sampling round and the
// outer energy-estimation loop. All logarithms are natural.

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gsee/error.hpp"
#include "gsee/gaussian_core.hpp"
#include "gsee/numeric.hpp"

namespace gsee {

/// c = 1 - 2 sqrt(2) / 3, the bias split that makes the outer repetition
/// count collapse to ceil((Delta/eps)^2 ln(4/delta)).
inline const double kDefaultBiasSplit = 1.0 - 2.0 * std::sqrt(2.0) / 3.0;

struct PlanInputs {
  double delta_fail = 0.01;
  double eta = 1.0;
  double Delta_true = 0.1;
  double epsilon = 0.01;
  double alpha = 0.0;
  int m = 1;
  double c = kDefaultBiasSplit;

  void validate() const {
    if (!(delta_fail > 0.0 && delta_fail < 1.0)) throw DomainError("PlanInputs: delta_fail must lie in (0, 1)");
    if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("PlanInputs: eta must lie in (0, 1]");
    if (!(Delta_true > 0.0 && Delta_true < 1.0)) throw DomainError("PlanInputs: Delta_true must lie in (0, 1)");
    if (!(epsilon > 0.0)) throw DomainError("PlanInputs: epsilon must be positive");
    if (!(epsilon < Delta_true)) throw DomainError("PlanInputs: epsilon must be smaller than Delta_true");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("PlanInputs: alpha must lie in [0, 1]");
    if (m < 1 || m > 4) throw DomainError("PlanInputs: m must lie in [1, 4]");
    if (!(c > 0.0 && c < 1.0)) throw DomainError("PlanInputs: c must lie in (0, 1)");
  }

  /// Delta_true^(1 - alpha) * epsilon^alpha
  double interpolated_gap() const { return std::pow(Delta_true, 1.0 - alpha) * std::pow(epsilon, alpha); }
};

/// Quantities that follow from (eta, m, eps_tilde, Delta, ln(1/delta)) in one
/// step of the sampling-round preamble.
struct RoundState {
  double Delta = 0.0;
  double log_inv_delta = 0.0;
  std::int64_t M0 = 0;
  /// ln((4 M0 / delta) (1 + sqrt(5/3) sqrt((1 - eta)/eta))^2)
  double L = 0.0;
  double sigma_tilde = 0.0;
  /// ln((m / (4 e pi^2 sigma~^2)) ((m!)^2 C / eps~)^(2/m))
  double u = 0.0;
  int q = 0;
  std::int64_t N = 0;
  double sigma_bins = 0.0;
  std::int64_t floor_two_thirds = 0;
  std::int64_t K = 0;
  double ratio = 0.0;
};

struct PlanIteration {
  std::string stage;
  RoundState state;
  std::map<std::string, double> predicate_values;
};

struct PlanParams {
  // inputs echoed
  double Delta_true = 0.0;
  double epsilon = 0.0;
  double alpha = 0.0;
  double eta = 1.0;
  int m = 1;
  double c = kDefaultBiasSplit;

  double Delta_initial = 0.0;
  double Delta_work = 0.0;
  /// exp(-log_inv_delta); underflows to 0 once ln(1/delta) exceeds ~745.
  double delta_work = 0.0;
  double log_inv_delta = 0.0;
  std::int64_t M0_initial = 0;
  std::int64_t M0 = 0;
  double sigma_tilde = 0.0;
  double sigma_bins = 0.0;
  int q = 0;
  std::int64_t N = 0;
  std::int64_t K = 0;
  std::int64_t two_K_plus_1 = 0;
  std::int64_t M = 1;
  double delta1_tilde = 0.0;
  double eps_tilde = 0.0;
  double C_eta = 0.0;
  double L = 0.0;
  double u = 0.0;

  std::map<std::string, bool> constraint_flags;
  std::map<std::string, double> predicate_values;
  std::vector<PlanIteration> trail;
  std::vector<std::string> warnings;

  bool feasible() const {
    for (const auto& [name, ok] : constraint_flags) {
      if (!ok) return false;
    }
    return !constraint_flags.empty();
  }

  /// Width of the post-selection window, 2K bins.
  std::int64_t basket_width() const { return 2 * K; }
  /// Bins above the window that should stay empty, floor(Delta 2^q / 3).
  std::int64_t dark_width() const {
    return static_cast<std::int64_t>(std::floor(Delta_work * static_cast<double>(N) / 3.0));
  }
  GaussianParams gaussian(double mu_bins = 0.0) const { return GaussianParams(sigma_bins, mu_bins, q); }
};

struct QpeBaseline {
  int q_qpe = 0;
  std::int64_t n_samples = 0;
};

/// C(eta) = (128/45) e^12 (12 + 3 + (9/4) sqrt(1/eta)) + 10 e^12 + (55/8) e^2 (1 + sqrt(5/3) sqrt(1/eta))
inline double compute_C_eta(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("compute_C_eta: eta must lie in (0, 1]");
  const double e12 = std::exp(12.0);
  const double r = std::sqrt(1.0 / eta);
  return (128.0 / 45.0) * e12 * (12.0 + 3.0 + 2.25 * r) + 10.0 * e12 +
         (55.0 / 8.0) * std::exp(2.0) * (1.0 + std::sqrt(5.0 / 3.0) * r);
}

inline std::int64_t ceil_to_int(double x) {
  if (!std::isfinite(x) || x > 9.0e18) throw DomainError("ceil_to_int: value out of range");
  return static_cast<std::int64_t>(std::ceil(x));
}

namespace detail {

inline double contamination_amplification(double eta) {
  const double a = 1.0 + std::sqrt(5.0 / 3.0) * std::sqrt((1.0 - eta) / eta);
  return a * a;
}

struct RoundConstants {
  double eta;
  int m;
  double eps_tilde;
  double C;
};

inline RoundState evaluate_round(const RoundConstants& k, double Delta, double log_inv_delta) {
  RoundState s;
  s.Delta = Delta;
  s.log_inv_delta = log_inv_delta;
  s.M0 = ceil_to_int(16.0 / (3.0 * k.eta) * (std::log(3.0) + log_inv_delta));
  s.L = std::log(4.0 * static_cast<double>(s.M0)) + log_inv_delta + std::log(contamination_amplification(k.eta));
  const double md = static_cast<double>(k.m);
  s.sigma_tilde = (1.0 / std::sqrt(md)) * (Delta / 6.0) / std::sqrt(2.0 * s.L);
  const double mf = factorial(k.m);
  s.u = std::log(md / (4.0 * kE * kPi * kPi * s.sigma_tilde * s.sigma_tilde)) +
        (2.0 / md) * std::log(mf * mf * k.C / k.eps_tilde);
  const double one_plus_3u = std::max(1.0 + 3.0 * s.u, 0.0);
  const double X = 3.0 * md / (kPi * Delta) * std::sqrt(one_plus_3u) * std::sqrt(2.0 * s.L);
  s.q = static_cast<int>(std::max(1.0, std::ceil(std::log2(X))));
  if (s.q > 40) throw PlanInfeasible("q_cap", "plan requires more than 40 ancilla qubits");
  s.N = std::int64_t{1} << s.q;
  s.sigma_bins = s.sigma_tilde * static_cast<double>(s.N);
  s.floor_two_thirds = static_cast<std::int64_t>(std::floor(2.0 / 3.0 * static_cast<double>(s.N) * Delta));
  s.K = (s.floor_two_thirds) / 2;  // ceil((F - 1) / 2)
  s.ratio = one_plus_3u > 0.0 ? std::sqrt(s.L) / std::sqrt(one_plus_3u) : 0.0;
  return s;
}

/// Smallest ln(1/delta) >= start for which the ratio predicate holds.
/// Geometric halving brackets the root; bisection then pins it so that the
/// result depends monotonically on the starting budget.
inline double solve_log_inv_delta(const RoundConstants& k, double Delta, double start, int cap,
                                  std::vector<PlanIteration>& trail) {
  auto ok = [&](double lam) { return evaluate_round(k, Delta, lam).ratio >= 2.0; };
  if (ok(start)) return start;
  double lo = start;
  double hi = start;
  int halvings = 0;
  while (!ok(hi)) {
    if (++halvings > cap) {
      throw PlanInfeasible("delta_ratio", "delta shrink cap exhausted before sqrt(L)/sqrt(1+3u) >= 2");
    }
    lo = hi;
    hi += std::log(2.0);
    PlanIteration it;
    it.stage = "delta_halving";
    it.state = evaluate_round(k, Delta, hi);
    it.predicate_values["ratio"] = it.state.ratio;
    trail.push_back(std::move(it));
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace detail

/// Worst case over mu~ of the lattice mass outside [-K, K].
inline double worst_tail_mass(std::int64_t K, double sigma_bins, int q) {
  return maximize_over_offset([&](double mu) { return tail_mass(K, GaussianParams(sigma_bins, mu, q)).exact_sum; });
}

/// Worst case over mu~ of ||eps^(R)||^2 = sum_{n=-K}^{K} g0(n, mu~ + shift_bins).
inline double worst_contamination_sq(std::int64_t K, double sigma_bins, double shift_bins) {
  return maximize_over_offset([&](double mu) { return lattice_sum(-K, K, sigma_bins, mu + shift_bins); });
}

inline std::map<std::string, double> evaluate_round_predicates(const RoundState& s, double eta, int m,
                                                               double eps_tilde, double C) {
  std::map<std::string, double> v;
  const double delta1 = 1.0 / (kPi * static_cast<double>(s.N));
  v["alias_G0"] = aliasing_error(0, GaussianParams(s.sigma_bins, 0.0, s.q), 0, delta1).exact_abs_series;
  v["tail_G0F0"] = s.K >= 1 ? worst_tail_mass(s.K, s.sigma_bins, s.q) : 1.0;
  v["contamination_R"] =
      std::sqrt(worst_contamination_sq(s.K, s.sigma_bins, s.Delta * static_cast<double>(s.N))) / std::sqrt(eta);
  const double md = static_cast<double>(m);
  const double mf = factorial(m);
  v["u_predicate"] = std::log(md / (2.0 * kE * kPi * kPi * s.sigma_tilde * s.sigma_tilde)) +
                     (2.0 / md) * std::log(mf * mf * C / eps_tilde);
  v["ratio"] = s.ratio;
  return v;
}

inline std::map<std::string, bool> round_predicate_flags(const std::map<std::string, double>& v) {
  return {
      {"alias_G0", v.at("alias_G0") <= 0.125},
      {"tail_G0F0", v.at("tail_G0F0") <= 0.125},
      {"contamination_R", v.at("contamination_R") <= 0.125},
      {"u_predicate", v.at("u_predicate") > 1.0},
      {"ratio", v.at("ratio") >= 2.0},
  };
}

struct ShrinkCaps {
  int Delta_iterations = 200;
  int delta_halvings = 4000;
};

namespace detail {

inline PlanParams plan_round(double delta_max, double eta, double Delta_max, int m, double eps_tilde,
                             const ShrinkCaps& caps) {
  if (!(delta_max > 0.0 && delta_max <= 0.01)) throw DomainError("sampling round: delta must lie in (0, 0.01]");
  if (!(eps_tilde > 0.0)) throw DomainError("sampling round: eps_tilde must be positive");
  if (!(Delta_max > 0.0 && Delta_max < 1.0)) throw DomainError("sampling round: Delta must lie in (0, 1)");
  const RoundConstants k{eta, m, eps_tilde, compute_C_eta(eta)};

  PlanParams p;
  p.eta = eta;
  p.m = m;
  p.eps_tilde = eps_tilde;
  p.C_eta = k.C;
  p.Delta_initial = Delta_max;
  const double start = std::log(1.0 / delta_max);
  p.M0_initial = evaluate_round(k, Delta_max, start).M0;

  double Delta = Delta_max;
  std::string last_failure;
  for (int iter = 0; iter <= caps.Delta_iterations; ++iter) {
    const double lam = solve_log_inv_delta(k, Delta, start, caps.delta_halvings, p.trail);
    const RoundState s = evaluate_round(k, Delta, lam);
    PlanIteration it;
    it.stage = "Delta_step";
    it.state = s;
    it.predicate_values = evaluate_round_predicates(s, eta, m, eps_tilde, k.C);
    auto flags = round_predicate_flags(it.predicate_values);
    if (s.K < 1) flags["K_positive"] = false;
    p.trail.push_back(it);

    last_failure.clear();
    for (const auto& [name, ok] : flags) {
      if (!ok) {
        last_failure = name;
        break;
      }
    }
    if (last_failure.empty()) {
      p.Delta_work = Delta;
      p.log_inv_delta = lam;
      p.delta_work = std::exp(-lam);
      p.M0 = s.M0;
      p.L = s.L;
      p.u = s.u;
      p.sigma_tilde = s.sigma_tilde;
      p.q = s.q;
      p.N = s.N;
      p.sigma_bins = s.sigma_bins;
      p.K = s.K;
      p.two_K_plus_1 = 2 * s.K + 1;
      p.predicate_values = it.predicate_values;
      p.constraint_flags = flags;

      const double Nd = static_cast<double>(s.N);
      const double md = static_cast<double>(m);
      p.constraint_flags["bin_resolution"] = 1.0 / Nd <= Delta / 6.0;
      p.constraint_flags["sigma_upper"] =
          s.sigma_tilde <= std::pow(2.0, -0.25) * std::sqrt(1.0 / Nd) * std::sqrt(Delta / (12.0 * kPi));
      p.constraint_flags["q_lower"] = Nd >= std::sqrt(md) / (2.0 * kPi * s.sigma_tilde) * std::sqrt(1.0 + 3.0 * s.u);
      p.constraint_flags["window_fits"] =
          static_cast<double>(p.two_K_plus_1) <= Delta * Nd && p.two_K_plus_1 < s.N;
      return p;
    }
    Delta *= 0.9;
  }
  throw PlanInfeasible(last_failure, "Delta shrink cap exhausted; predicate '" + last_failure + "' still fails");
}

}  // namespace detail

/// Sampling-round preamble run directly at failure budget inputs.delta_fail,
/// gap inputs.interpolated_gap() and relative moment target eps_target.
inline PlanParams plan_sampling_round(const PlanInputs& in, double eps_target, const ShrinkCaps& caps = {}) {
  in.validate();
  PlanParams p = detail::plan_round(in.delta_fail, in.eta, in.interpolated_gap(), in.m, eps_target, caps);
  p.Delta_true = in.Delta_true;
  p.epsilon = in.epsilon;
  p.alpha = in.alpha;
  p.c = in.c;
  p.M = 1;
  p.delta1_tilde = in.delta_fail;
  return p;
}

/// M = ceil(8 Delta^2 / (9 eps^2 (1 - c)^2) ln(4 / delta)).
inline std::int64_t outer_repetitions(double Delta, double epsilon, double c, double delta) {
  return ceil_to_int(8.0 * Delta * Delta / (9.0 * epsilon * epsilon * (1.0 - c) * (1.0 - c)) * std::log(4.0 / delta));
}

/// Outer loop plan: M repetitions of the sampling round, each at failure
/// budget delta/(4M) (capped at the round's 0.01 requirement) and target c*eps.
inline PlanParams plan_gsee(const PlanInputs& in, const ShrinkCaps& caps = {}) {
  in.validate();
  const double Delta = in.interpolated_gap();
  const std::int64_t M = outer_repetitions(Delta, in.epsilon, in.c, in.delta_fail);
  const double d1 = in.delta_fail / (4.0 * static_cast<double>(M));
  PlanParams p = detail::plan_round(std::min(d1, 0.01), in.eta, Delta, in.m, in.c * in.epsilon, caps);
  p.Delta_true = in.Delta_true;
  p.epsilon = in.epsilon;
  p.alpha = in.alpha;
  p.c = in.c;
  p.M = M;
  p.delta1_tilde = std::min(d1, 0.01);
  if (d1 > 0.01) p.warnings.push_back("delta/(4M) exceeds 0.01; per-round budget capped at 0.01");
  return p;
}

/// Printed query bound on 2^q for the interpolated algorithm, evaluated at a
/// given per-round sample count M0 and failure budget exp(-log_inv_delta).
inline double corollary_query_bound(const PlanInputs& in, std::int64_t M0, double log_inv_delta) {
  in.validate();
  const double Delta = in.interpolated_gap();
  const double C = compute_C_eta(in.eta);
  const double L = std::log(4.0 * static_cast<double>(M0)) + log_inv_delta +
                   std::log(detail::contamination_amplification(in.eta));
  const double inner = 3.0 * C / ((3.0 - 2.0 * std::sqrt(2.0)) * in.epsilon);
  const double arg_log = std::log(18.0 / (kE * kPi * kPi * Delta * Delta)) + 2.0 * std::log(inner) + std::log(L);
  return (1.0 / Delta) * 6.0 * std::sqrt(2.0) / kPi * std::sqrt(1.0 + 3.0 * arg_log) * std::sqrt(L);
}

/// Printed interpolated counts: M = ceil(eps^(-2+2a) Delta_true^(2-2a) ln(4/delta)),
/// M0 = ceil(16/(3 eta) ln(12 M / delta)).
inline std::int64_t corollary_M(const PlanInputs& in) {
  in.validate();
  const double a = in.alpha;
  return ceil_to_int(std::pow(in.epsilon, -2.0 + 2.0 * a) * std::pow(in.Delta_true, 2.0 - 2.0 * a) *
                     std::log(4.0 / in.delta_fail));
}

inline std::int64_t corollary_M0(const PlanInputs& in) {
  const double M = static_cast<double>(corollary_M(in));
  return ceil_to_int(16.0 / (3.0 * in.eta) * std::log(12.0 * M / in.delta_fail));
}

/// Textbook phase estimation with majority vote: q = ceil(log2(1/eps)),
/// n = ceil(2/(sqrt2 - 1)^2 ln(1/delta)).
inline QpeBaseline plan_qpe_baseline(double epsilon, double delta_fail) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw DomainError("plan_qpe_baseline: epsilon must lie in (0, 1/2)");
  if (!(delta_fail > 0.0 && delta_fail < 1.0)) throw DomainError("plan_qpe_baseline: delta must lie in (0, 1)");
  const double s = std::sqrt(2.0) - 1.0;
  QpeBaseline b;
  b.q_qpe = static_cast<int>(std::ceil(std::log2(1.0 / epsilon)));
  b.n_samples = ceil_to_int(2.0 / (s * s) * std::log(1.0 / delta_fail));
  return b;
}

}  // namespace gsee
