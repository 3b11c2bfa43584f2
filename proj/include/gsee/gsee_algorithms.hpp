#pragma once

// Sampling rounds with post-selection (basket), the outer averaging loop,
// and the textbook phase-estimation baseline with majority vote.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "gsee/error.hpp"
#include "gsee/gaussian_core.hpp"
#include "gsee/parallel.hpp"
#include "gsee/planner.hpp"
#include "gsee/rng.hpp"
#include "gsee/spectrum_sim.hpp"

namespace gsee {

struct Basket {
  /// Lowest signed outcome of the round.
  std::int64_t anchor = 0;
  /// Signed outcomes s with 0 <= s - anchor <= 2K.
  std::vector<std::int64_t> members;
  /// Raw register values z in draw order.
  std::vector<std::int64_t> round_samples;
  /// Samples in (anchor + 2K, anchor + 2K + floor(Delta 2^q / 3)].
  std::int64_t n_dark = 0;
  /// Samples strictly below round(2^q theta_0) - K.
  std::int64_t n_left = 0;
  /// |anchor - 2^q theta_0| <= K.
  bool anchor_in_ground_window = false;
};

struct MomentSample {
  int m = 1;
  double value = 0.0;
  double relative = 0.0;
};

struct RoundDiagnostics {
  std::int64_t rounds_with_dark = 0;
  std::int64_t n_dark = 0;
  std::int64_t rounds_with_left = 0;
  std::int64_t n_left = 0;
  std::int64_t anchor_misses = 0;
  std::int64_t empty_baskets = 0;
};

struct EnergyEstimate {
  /// Energy in turns.
  double mu_hat = 0.0;
  /// Mean over rounds of the lowest outcome alone, in turns.
  double mu_hat_lowest = 0.0;
  /// Per-round basket means in turns.
  std::vector<double> per_round_means;
  std::int64_t M_used = 0;
  int q = 0;
  std::int64_t M0 = 0;
  RoundDiagnostics failure_diagnostics;
};

/// Plan, cached outcome distribution and its sampler, shared read-only
/// across rounds and runs.
class GseeContext {
 public:
  GseeContext(SpectrumSpec spec, PlanParams plan, bool enforce_promises = true, unsigned threads = 1)
      : spec_(std::move(spec)),
        plan_(std::move(plan)),
        dist_(mixed_distribution(spec_, plan_, enforce_promises, threads)),
        sampler_(dist_.mixed) {
    const double mu0 = std::ldexp(spec_.ground_phase(), plan_.q);
    ground_bin_ = static_cast<std::int64_t>(round_half_even(mu0));
  }

  const SpectrumSpec& spec() const { return spec_; }
  const PlanParams& plan() const { return plan_; }
  const OutcomeDistribution& distribution() const { return dist_; }
  const OutcomeSampler& sampler() const { return sampler_; }
  std::int64_t ground_bin() const { return ground_bin_; }

 private:
  SpectrumSpec spec_;
  PlanParams plan_;
  OutcomeDistribution dist_;
  OutcomeSampler sampler_;
  std::int64_t ground_bin_ = 0;
};

namespace detail {

struct RoundSummary {
  std::int64_t anchor = 0;
  std::int64_t member_count = 0;
  double member_sum = 0.0;
  std::int64_t n_dark = 0;
  std::int64_t n_left = 0;
  bool anchor_in_ground_window = false;
};

/// Signed outcomes of one round, written into `buf`.
inline void draw_round(const GseeContext& ctx, std::uint64_t seed, std::vector<std::int64_t>& buf) {
  const auto M0 = static_cast<std::size_t>(ctx.plan().M0);
  if (M0 == 0) throw DomainError("sampling round: M0 is zero");
  buf.resize(M0);
  CounterRng rng(seed);
  const int q = ctx.plan().q;
  for (auto& s : buf) s = static_cast<std::int64_t>(wrap_mod(ctx.sampler().draw(rng), 0.0, q));
}

inline RoundSummary summarize_round(const GseeContext& ctx, const std::vector<std::int64_t>& signed_samples) {
  const PlanParams& plan = ctx.plan();
  const std::int64_t width = plan.basket_width();
  const std::int64_t dark = plan.dark_width();
  const std::int64_t left_edge = ctx.ground_bin() - plan.K;
  RoundSummary r;
  r.anchor = *std::min_element(signed_samples.begin(), signed_samples.end());
  for (std::int64_t s : signed_samples) {
    const std::int64_t d = s - r.anchor;
    if (d <= width) {
      ++r.member_count;
      r.member_sum += static_cast<double>(s);
    } else if (d <= width + dark) {
      ++r.n_dark;
    }
    if (s < left_edge) ++r.n_left;
  }
  r.anchor_in_ground_window = std::abs(r.anchor - ctx.ground_bin()) <= plan.K;
  return r;
}

}  // namespace detail

/// One round: M0 draws, signed residues, lowest outcome as anchor and every
/// outcome within 2K above it as basket member.
inline Basket run_sampling_round(const GseeContext& ctx, std::uint64_t seed) {
  std::vector<std::int64_t> signed_samples;
  detail::draw_round(ctx, seed, signed_samples);
  const auto summary = detail::summarize_round(ctx, signed_samples);
  Basket b;
  b.anchor = summary.anchor;
  b.n_dark = summary.n_dark;
  b.n_left = summary.n_left;
  b.anchor_in_ground_window = summary.anchor_in_ground_window;
  const std::int64_t N = ctx.plan().N;
  b.round_samples.reserve(signed_samples.size());
  for (std::int64_t s : signed_samples) {
    b.round_samples.push_back(s < 0 ? s + N : s);
    if (s - b.anchor <= ctx.plan().basket_width()) b.members.push_back(s);
  }
  return b;
}

/// Mean of member^m in bins^m, together with its value relative to (2^q)^m.
inline MomentSample moment_from_basket(const Basket& basket, const PlanParams& plan, int m) {
  if (m < 0) throw DomainError("moment_from_basket: m must be non-negative");
  if (basket.members.empty()) throw EmptyBasket("moment_from_basket: basket has no members");
  double acc = 0.0;
  for (std::int64_t s : basket.members) acc += std::pow(static_cast<double>(s), m);
  MomentSample out;
  out.m = m;
  out.value = acc / static_cast<double>(basket.members.size());
  out.relative = out.value / std::pow(static_cast<double>(plan.N), m);
  return out;
}

/// Per-round seeds are derive_seed(seed, round). Rounds may run in parallel;
/// the aggregate is formed in round order so the result does not depend on
/// the thread count.
inline EnergyEstimate run_gsee(const GseeContext& ctx, std::uint64_t seed, unsigned threads = 1) {
  const PlanParams& plan = ctx.plan();
  const auto M = static_cast<std::size_t>(plan.M);
  std::vector<detail::RoundSummary> rounds(M);
  const unsigned t = std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(std::max<std::size_t>(M, 1)));
  const std::size_t chunk = (M + t - 1) / t;
  parallel_for(t, t, [&](std::size_t w) {
    std::vector<std::int64_t> buf;
    for (std::size_t r = w * chunk; r < std::min(M, (w + 1) * chunk); ++r) {
      detail::draw_round(ctx, derive_seed(seed, r), buf);
      rounds[r] = detail::summarize_round(ctx, buf);
    }
  });

  EnergyEstimate e;
  e.q = plan.q;
  e.M0 = plan.M0;
  e.M_used = static_cast<std::int64_t>(M);
  const double N = static_cast<double>(plan.N);
  double sum = 0.0;
  double sum_lowest = 0.0;
  for (const auto& r : rounds) {
    const double mean = r.member_sum / static_cast<double>(r.member_count) / N;
    e.per_round_means.push_back(mean);
    sum += mean;
    sum_lowest += static_cast<double>(r.anchor) / N;
    auto& d = e.failure_diagnostics;
    d.n_dark += r.n_dark;
    d.rounds_with_dark += r.n_dark > 0;
    d.n_left += r.n_left;
    d.rounds_with_left += r.n_left > 0;
    d.anchor_misses += !r.anchor_in_ground_window;
  }
  e.mu_hat = sum / static_cast<double>(M);
  e.mu_hat_lowest = sum_lowest / static_cast<double>(M);
  return e;
}

inline EnergyEstimate run_gsee(const SpectrumSpec& spec, const PlanInputs& inputs, std::uint64_t seed,
                               unsigned threads = 1) {
  const GseeContext ctx(spec, plan_gsee(inputs), true, threads);
  return run_gsee(ctx, seed, threads);
}

/// Circular distance between two phases in turns.
inline double phase_distance(double a, double b) {
  const double d = a - b;
  return std::abs(d - std::round(d));
}

/// Textbook phase estimation: uniform register of q = ceil(log2(1/eps))
/// qubits and the outcome law of one eigenphase.
struct QpeSetup {
  QpeBaseline plan;
  std::vector<double> distribution;
  OutcomeSampler sampler;
  double theta0 = 0.0;
};

inline QpeSetup make_qpe_setup(const SpectrumSpec& spec, double epsilon, double delta) {
  spec.validate();
  const std::size_t g = spec.ground_index();
  if (std::abs(spec.overlaps_sq[g] - 1.0) > 1e-12) {
    throw DomainError("run_qpe_baseline: input must be an eigenstate (ground overlap 1)");
  }
  QpeBaseline plan = plan_qpe_baseline(epsilon, delta);
  auto dist = distribution_from_amplitudes(rectangular_ancilla_amplitudes(plan.q_qpe), spec.eigenphases[g]);
  OutcomeSampler sampler(dist);
  return QpeSetup{plan, std::move(dist), std::move(sampler), spec.eigenphases[g]};
}

/// Mass of outcomes z with circular |z/2^q - theta| <= eps.
inline double qpe_single_success(const std::vector<double>& distribution, double theta, double epsilon) {
  const double N = static_cast<double>(distribution.size());
  double mass = 0.0;
  for (std::size_t z = 0; z < distribution.size(); ++z) {
    if (phase_distance(static_cast<double>(z) / N, theta) <= epsilon) mass += distribution[z];
  }
  return mass;
}

/// Most frequent outcome; ties go to the lowest signed value.
inline std::int64_t majority_vote(const std::vector<std::int64_t>& outcomes, int q) {
  if (outcomes.empty()) throw DomainError("majority_vote: no outcomes");
  std::map<std::int64_t, std::int64_t> counts;
  for (std::int64_t z : outcomes) ++counts[signed_index(z, q)];
  std::int64_t best = counts.begin()->first;
  std::int64_t best_count = 0;
  for (const auto& [s, c] : counts) {
    if (c > best_count) {
      best = s;
      best_count = c;
    }
  }
  return best;
}

inline EnergyEstimate run_qpe_baseline(const QpeSetup& setup, std::uint64_t seed) {
  const auto outcomes = draw_samples(setup.sampler, static_cast<std::size_t>(setup.plan.n_samples), seed);
  EnergyEstimate e;
  e.q = setup.plan.q_qpe;
  e.M0 = setup.plan.n_samples;
  e.M_used = 1;
  e.mu_hat = std::ldexp(static_cast<double>(majority_vote(outcomes, setup.plan.q_qpe)), -setup.plan.q_qpe);
  e.mu_hat_lowest = e.mu_hat;
  e.per_round_means.push_back(e.mu_hat);
  return e;
}

inline EnergyEstimate run_qpe_baseline(const SpectrumSpec& spec, double epsilon, double delta, std::uint64_t seed) {
  return run_qpe_baseline(make_qpe_setup(spec, epsilon, delta), seed);
}

/// ceil(b^2 / (2 (eps - c eps)^2) ln(2 / delta))
inline std::int64_t hoeffding_sample_count(double b, double epsilon, double c, double delta) {
  if (!(c >= 0.0 && c < 1.0)) throw DomainError("hoeffding_sample_count: c must lie in [0, 1)");
  if (!(epsilon > 0.0) || !(b > 0.0)) throw DomainError("hoeffding_sample_count: b and epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("hoeffding_sample_count: delta must lie in (0, 1)");
  const double gap = epsilon - c * epsilon;
  return ceil_to_int(b * b / (2.0 * gap * gap) * std::log(2.0 / delta));
}

}  // namespace gsee
