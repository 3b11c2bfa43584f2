#include <gtest/gtest.h>

#include <cmath>

#include "gsee/gsee_algorithms.hpp"

using namespace gsee;

namespace {

PlanInputs acceptance_inputs(double eta = 0.5) {
  PlanInputs in;
  in.delta_fail = 0.1;
  in.eta = eta;
  in.Delta_true = 0.15;
  in.epsilon = 0.01;
  return in;
}

SpectrumSpec acceptance_spectrum() { return SpectrumSpec{{-0.2, -0.05, 0.15}, {0.5, 0.3, 0.2}}; }

double binomial_band(double p, double n) { return 1.96 * std::sqrt(p * (1 - p) / n); }

}  // namespace

TEST(MomentFromBasket, PrintedExamples) {
  PlanParams plan;
  plan.N = 64;
  Basket single;
  single.members = {-7};
  EXPECT_EQ(moment_from_basket(single, plan, 1).value, -7.0);
  EXPECT_EQ(moment_from_basket(single, plan, 2).value, 49.0);
  EXPECT_EQ(moment_from_basket(single, plan, 3).value, -343.0);
  EXPECT_DOUBLE_EQ(moment_from_basket(single, plan, 2).relative, 49.0 / 4096.0);

  Basket sym;
  sym.members = {-2, 0, 2};
  EXPECT_EQ(moment_from_basket(sym, plan, 1).value, 0.0);
  EXPECT_DOUBLE_EQ(moment_from_basket(sym, plan, 2).value, 8.0 / 3.0);

  EXPECT_THROW(moment_from_basket(Basket{}, plan, 1), EmptyBasket);
}

TEST(SamplingRound, BasketWidthInvariant) {
  const GseeContext ctx(acceptance_spectrum(), plan_gsee(acceptance_inputs()));
  const auto& plan = ctx.plan();
  const auto F = static_cast<std::int64_t>(std::floor(2.0 / 3.0 * static_cast<double>(plan.N) * plan.Delta_work));
  ASSERT_LE(2 * plan.K, F);
  for (std::uint64_t r = 0; r < 200; ++r) {
    const Basket b = run_sampling_round(ctx, derive_seed(11, r));
    ASSERT_FALSE(b.members.empty());
    const auto hi = *std::max_element(b.members.begin(), b.members.end());
    const auto lo = *std::min_element(b.members.begin(), b.members.end());
    EXPECT_EQ(lo, b.anchor);
    EXPECT_LE(hi - b.anchor, 2 * plan.K);
    EXPECT_EQ(b.round_samples.size(), static_cast<std::size_t>(plan.M0));
  }
}

TEST(SamplingRound, SingleEigenstateAnchorsInGroundWindow) {
  const SpectrumSpec single{{0.1234}, {1.0}};
  auto in = acceptance_inputs(1.0);
  in.delta_fail = 0.01;
  const GseeContext ctx(single, plan_gsee(in));
  const double target = std::ldexp(0.1234, ctx.plan().q);
  int misses = 0;
  const int rounds = 1000;
  for (int r = 0; r < rounds; ++r) {
    const Basket b = run_sampling_round(ctx, derive_seed(5, static_cast<std::uint64_t>(r)));
    if (b.members.empty() || std::abs(static_cast<double>(b.anchor) - target) > static_cast<double>(ctx.plan().K)) {
      ++misses;
    }
  }
  EXPECT_LE(misses / static_cast<double>(rounds), in.delta_fail + binomial_band(in.delta_fail, rounds));
}

TEST(SamplingRound, AtGapSpectrumRarelyLeavesTheWindow) {
  // Any sample left of the ground window, or in the K bins just above it,
  // is a round failure in the union bound.
  const GseeContext ctx(acceptance_spectrum(), plan_gsee(acceptance_inputs()));
  const auto& plan = ctx.plan();
  const int rounds = 1000;
  int bad = 0;
  for (int r = 0; r < rounds; ++r) {
    const Basket b = run_sampling_round(ctx, derive_seed(21, static_cast<std::uint64_t>(r)));
    bool failed = false;
    for (const auto z : b.round_samples) {
      const auto d = static_cast<std::int64_t>(wrap_mod(z, static_cast<double>(ctx.ground_bin()), plan.q));
      if (d < -plan.K || (d > plan.K && d <= 2 * plan.K)) failed = true;
    }
    bad += failed;
  }
  EXPECT_LE(bad / static_cast<double>(rounds), 0.1);
}

TEST(SamplingRound, GapViolationShowsDarkCounts) {
  // Excited level 0.12 above ground is ~491 bins up, past the 2K = 408 basket
  // and inside the dark segment that follows it.
  const SpectrumSpec close{{-0.2, -0.08}, {0.5, 0.5}};
  const GseeContext ctx(close, plan_gsee(acceptance_inputs()), false);
  const auto e = run_gsee(ctx, 3);
  EXPECT_GT(e.failure_diagnostics.n_dark, 0);
  EXPECT_GT(e.failure_diagnostics.rounds_with_dark, 0);
  EXPECT_THROW(GseeContext(close, plan_gsee(acceptance_inputs()), true), SpectrumMismatch);
}

TEST(RunGsee, DeterministicAndThreadInvariant) {
  const GseeContext ctx(acceptance_spectrum(), plan_gsee(acceptance_inputs()));
  const auto a = run_gsee(ctx, 77, 1);
  const auto b = run_gsee(ctx, 77, 1);
  const auto c = run_gsee(ctx, 77, 3);
  EXPECT_EQ(a.mu_hat, b.mu_hat);
  EXPECT_EQ(a.per_round_means, b.per_round_means);
  EXPECT_EQ(a.mu_hat, c.mu_hat);
  EXPECT_EQ(a.per_round_means, c.per_round_means);
  EXPECT_EQ(a.failure_diagnostics.n_dark, c.failure_diagnostics.n_dark);
  EXPECT_NE(run_gsee(ctx, 78).mu_hat, a.mu_hat);
  EXPECT_EQ(a.M_used, ctx.plan().M);
  EXPECT_EQ(a.per_round_means.size(), static_cast<std::size_t>(ctx.plan().M));
}

TEST(RunGsee, FailureRateOnAcceptanceSpectrum) {
  const auto in = acceptance_inputs();
  const GseeContext ctx(acceptance_spectrum(), plan_gsee(in));
  const int runs = 40;
  int failures = 0;
  for (int r = 0; r < runs; ++r) {
    const auto e = run_gsee(ctx, derive_seed(2024, static_cast<std::uint64_t>(r)));
    failures += std::abs(e.mu_hat + 0.2) > in.epsilon;
  }
  EXPECT_LE(failures / static_cast<double>(runs), in.delta_fail + binomial_band(in.delta_fail, runs));
}

TEST(RunGsee, PureGroundStateNeedsFewerSamples) {
  const SpectrumSpec single{{-0.2}, {1.0}};
  auto in = acceptance_inputs(1.0);
  const auto pure = plan_gsee(in);
  EXPECT_LT(pure.M0, plan_gsee(acceptance_inputs(0.5)).M0);
  const GseeContext ctx(single, pure);
  int failures = 0;
  const int runs = 20;
  for (int r = 0; r < runs; ++r) failures += std::abs(run_gsee(ctx, derive_seed(8, r)).mu_hat + 0.2) > in.epsilon;
  EXPECT_LE(failures / static_cast<double>(runs), in.delta_fail + binomial_band(in.delta_fail, runs));
}

TEST(RunGsee, PerRoundMeanBias) {
  // Single eigenstate off the bin grid: the mean of 10^5 per-round means sits
  // within c eps 2^q + 4 standard errors of 2^q theta0.
  const double theta = -0.2 + 0.37 / 4096.0;
  const SpectrumSpec single{{theta}, {1.0}};
  const auto in = acceptance_inputs(1.0);
  const GseeContext ctx(single, plan_gsee(in));
  const auto& plan = ctx.plan();
  const std::size_t rounds = 100000;
  long double s = 0;
  long double s2 = 0;
  for (std::size_t r = 0; r < rounds; ++r) {
    const Basket b = run_sampling_round(ctx, derive_seed(31, r));
    const double m = moment_from_basket(b, plan, 1).value;
    s += m;
    s2 += static_cast<long double>(m) * m;
  }
  const double mean = static_cast<double>(s / rounds);
  const double var = static_cast<double>(s2 / rounds) - mean * mean;
  const double se = std::sqrt(std::max(var, 0.0) / static_cast<double>(rounds));
  const double target = std::ldexp(theta, plan.q);
  EXPECT_LE(std::abs(mean - target), in.c * in.epsilon * static_cast<double>(plan.N) + 4 * se);
  // The basket mean is far more accurate than the bias budget.
  EXPECT_LT(std::abs(mean - target), 0.01);
}

TEST(RunGsee, SecondMomentOverThousandRounds) {
  const double theta = 0.05 + 0.21 / 4096.0;
  const SpectrumSpec single{{theta}, {1.0}};
  auto in = acceptance_inputs(1.0);
  in.m = 2;
  const GseeContext ctx(single, plan_gsee(in));
  const auto& plan = ctx.plan();
  const std::size_t rounds = 1000;
  long double s = 0;
  long double s2 = 0;
  for (std::size_t r = 0; r < rounds; ++r) {
    const double m = moment_from_basket(run_sampling_round(ctx, derive_seed(41, r)), plan, 2).value;
    s += m;
    s2 += static_cast<long double>(m) * m;
  }
  const double mean = static_cast<double>(s / rounds);
  const double se = std::sqrt(std::max(0.0, static_cast<double>(s2 / rounds) - mean * mean) / rounds);
  const double mu = std::ldexp(theta, plan.q);
  const double target = continuous_moment_Gm(0.0, 2, plan.sigma_bins, mu).real();
  const double N = static_cast<double>(plan.N);
  EXPECT_LE(std::abs(mean - target), plan.eps_tilde * N * N + 3 * se);
}

TEST(PhaseDistance, Circular) {
  EXPECT_NEAR(phase_distance(0.49, -0.49), 0.02, 1e-15);
  EXPECT_NEAR(phase_distance(0.1, 0.3), 0.2, 1e-15);
  EXPECT_EQ(phase_distance(0.25, 0.25), 0.0);
}

TEST(Qpe, OnGridPhaseIsExact) {
  const auto setup = make_qpe_setup(SpectrumSpec{{5.0 / 128.0}, {1.0}}, 0.01, 0.01);
  EXPECT_EQ(setup.plan.q_qpe, 7);
  EXPECT_NEAR(qpe_single_success(setup.distribution, setup.theta0, 0.01), 1.0, 1e-12);
  EXPECT_NEAR(setup.distribution[5], 1.0, 1e-12);
}

TEST(Qpe, HalfBinWorstCase) {
  for (const int q : {4, 7, 10}) {
    const double eps = std::ldexp(1.0, -q);
    const double theta = (3.5) * eps;
    const auto setup = make_qpe_setup(SpectrumSpec{{theta}, {1.0}}, eps, 0.01);
    ASSERT_EQ(setup.plan.q_qpe, q);
    EXPECT_GE(qpe_single_success(setup.distribution, theta, eps), 1.0 - 1.0 / (2.0 * std::sqrt(2.0)));
  }
}

TEST(Qpe, MajorityVoteFailureRate) {
  const double eps = 0.01;
  const double theta = (37.5) / 128.0;
  const auto setup = make_qpe_setup(SpectrumSpec{{theta}, {1.0}}, eps, 0.01);
  EXPECT_EQ(setup.plan.n_samples, 54);
  const int trials = 500;
  int failures = 0;
  for (int t = 0; t < trials; ++t) {
    failures += phase_distance(run_qpe_baseline(setup, derive_seed(9, t)).mu_hat, theta) > eps;
  }
  EXPECT_LE(failures / static_cast<double>(trials), 0.01 + binomial_band(0.01, trials));
}

TEST(Qpe, RequiresEigenstate) {
  EXPECT_THROW(make_qpe_setup(acceptance_spectrum(), 0.01, 0.01), DomainError);
}

TEST(Qpe, MajorityVoteTieGoesLow) {
  EXPECT_EQ(majority_vote({2, 2, 1, 1, 3}, 3), 1);
  EXPECT_EQ(majority_vote({7, 7, 1, 1}, 3), -1);  // 7 reads as -1 on three qubits
  EXPECT_THROW(majority_vote({}, 3), DomainError);
}

TEST(Hoeffding, PrintedCountAndConsistency) {
  EXPECT_EQ(hoeffding_sample_count(1.0, 0.1, 0.0, 0.05), 185);
  EXPECT_EQ(hoeffding_sample_count(1.0, 0.1, 0.0, 0.05), static_cast<std::int64_t>(std::ceil(50.0 * std::log(40.0))));
  for (const double Delta : {0.05, 0.1, 0.15}) {
    auto in = acceptance_inputs();
    in.Delta_true = Delta;
    EXPECT_EQ(hoeffding_sample_count(4.0 * Delta / 3.0, in.epsilon, in.c, in.delta_fail / 2.0),
              outer_repetitions(Delta, in.epsilon, in.c, in.delta_fail));
  }
}

TEST(Hoeffding, QuadraticInAccuracy) {
  for (const double eps : {0.001, 0.01, 0.03}) {
    const auto a = hoeffding_sample_count(1.0, eps, 0.0, 0.05);
    const auto b = hoeffding_sample_count(1.0, 2 * eps, 0.0, 0.05);
    EXPECT_GE(a, 4 * b - 4);
    EXPECT_GE(a, 3 * b);
  }
}
