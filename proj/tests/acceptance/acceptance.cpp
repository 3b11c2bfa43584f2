// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gsee/gsee.hpp"

namespace fs = std::filesystem;
using namespace gsee;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

int g_failures = 0;

template <class F>
void criterion(int id, const char* title, F&& body) {
  Outcome o;
  o.detail << std::setprecision(6);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++g_failures;
  std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << title << " |" << o.detail.str() << " ("
            << std::fixed << std::setprecision(1) << secs << " s)" << std::defaultfloat << std::endl;
}

PlanInputs acceptance_inputs() {
  PlanInputs in;
  in.delta_fail = 0.1;
  in.eta = 0.5;
  in.Delta_true = 0.15;
  in.epsilon = 0.01;
  return in;
}

const SpectrumSpec kAcceptanceSpectrum{{-0.2, -0.05, 0.15}, {0.5, 0.3, 0.2}};

double binomial_band(double p, std::size_t n) { return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

// 1. Printed constants against values derived here from the closed forms.
void constants(Outcome& o) {
  const long double s = std::sqrt(2.0L) - 1.0L;
  const long double qpe_coeff = 2.0L / (s * s);
  o.require(std::abs(qpe_coeff - (6.0L + 4.0L * std::sqrt(2.0L))) <= 1e-12L, "2/(sqrt2-1)^2 = 6+4sqrt2");
  o.require(std::abs(static_cast<double>(qpe_coeff) - 11.657) < 5e-4, "QPE coefficient ~ 11.66");
  for (const double delta : {0.1, 0.01, 1e-3, 1e-6, 1e-12}) {
    const auto n = static_cast<std::int64_t>(std::ceil(qpe_coeff * std::log(1.0L / delta)));
    o.require(plan_qpe_baseline(0.01, delta).n_samples == n, "QPE n at delta");
  }
  o.require(plan_qpe_baseline(0.01, 0.01).n_samples == 54, "QPE n = 54 at delta 0.01");
  o.detail << " qpe_coeff=" << static_cast<double>(qpe_coeff);

  // Full-depth eta = 1 round: M0 = ceil((16/3) ln(3/delta)).
  o.require(std::abs(16.0 / 3.0 - 5.333333333333333) < 1e-12, "16/3");
  PlanInputs full = acceptance_inputs();
  full.eta = 1.0;
  const auto p1 = plan_gsee(full);
  const auto m0 = static_cast<std::int64_t>(std::ceil(16.0L / 3.0L * (std::log(3.0L) + p1.log_inv_delta)));
  o.require(p1.M0 == m0, "M0 = ceil(16/3 ln(3/delta)) at eta 1");
  o.detail << " gaussian_coeff=" << 16.0 / 3.0 << " M0(eta=1)=" << p1.M0;

  // Outer repetitions: ceil(8 Delta^2 / (9 eps^2 (1-c)^2) ln(4/delta)) with (1-c)^2 = 8/9.
  const PlanInputs in = acceptance_inputs();
  const long double c = 1.0L - 2.0L * std::sqrt(2.0L) / 3.0L;
  o.require(std::abs((1 - c) * (1 - c) - 8.0L / 9.0L) < 1e-15L, "(1-c)^2 = 8/9");
  const auto M = static_cast<std::int64_t>(std::ceil(225.0L * std::log(40.0L)));
  o.require(M == 830, "hand-derived M = 830");
  o.require(plan_gsee(in).M == M, "outer M");
  o.require(outer_repetitions(0.15, 0.01, kDefaultBiasSplit, 0.1) == M, "outer_repetitions");

  // Interpolated counts at the endpoints.
  PlanInputs a0 = in, a1 = in;
  a1.alpha = 1.0;
  const auto m0_a0 = static_cast<std::int64_t>(std::ceil(16.0L / 1.5L * std::log(12.0L * 830 / 0.1L)));
  const auto m_a1 = static_cast<std::int64_t>(std::ceil(std::log(40.0L)));
  const auto m0_a1 = static_cast<std::int64_t>(std::ceil(16.0L / 1.5L * std::log(12.0L * m_a1 / 0.1L)));
  o.require(corollary_M(a0) == 830 && corollary_M0(a0) == m0_a0, "corollary alpha 0");
  o.require(corollary_M(a1) == m_a1 && corollary_M0(a1) == m0_a1, "corollary alpha 1");
  o.detail << " M=" << M << " corollary(alpha=0)=(" << corollary_M(a0) << "," << corollary_M0(a0)
           << ") corollary(alpha=1)=(" << corollary_M(a1) << "," << corollary_M0(a1) << ")";
}

// 2. Normalization, shift covariance and reflection of the outcome law.
void distributions(Outcome& o) {
  double worst_norm = 0.0, worst_shift = 0.0, worst_reflect = 0.0;
  for (const int q : {8, 12, 16}) {
    const std::int64_t N = std::int64_t{1} << q;
    const double Nd = static_cast<double>(N);
    for (const double sigma : {1.0, 2.7578969851229136, 0.02 * Nd / 6.0}) {
      for (const double theta : {0.25, 0.1234567, -0.3 + 0.5 / Nd, 17.0 / Nd}) {
        const auto p = eigenstate_distribution(theta, sigma, q);
        double total = 0.0;
        for (double v : p) total += v;
        worst_norm = std::max(worst_norm, std::abs(total - 1.0));
        for (const std::int64_t k : {1, 5, -11}) {
          const auto shifted = eigenstate_distribution(theta + static_cast<double>(k) / Nd, sigma, q);
          for (std::int64_t z = 0; z < N; ++z) {
            const std::int64_t src = ((z - k) % N + N) % N;
            worst_shift = std::max(worst_shift, std::abs(shifted[static_cast<std::size_t>(z)] - p[static_cast<std::size_t>(src)]));
          }
        }
        const auto mirrored = eigenstate_distribution(-theta, sigma, q);
        for (std::int64_t z = 0; z < N; ++z) {
          const std::int64_t src = (N - z) % N;
          worst_reflect =
              std::max(worst_reflect, std::abs(mirrored[static_cast<std::size_t>(z)] - p[static_cast<std::size_t>(src)]));
        }
      }
    }
  }
  o.require(worst_norm <= 1e-10, "normalization 1e-10");
  o.require(worst_shift <= 1e-12, "shift covariance 1e-12");
  o.require(worst_reflect <= 1e-12, "reflection 1e-12");
  o.detail << " max|sum-1|=" << worst_norm << " max shift dev=" << worst_shift << " max reflection dev=" << worst_reflect;
}

// 3. Default bound grid.
void bound_suite(Outcome& o) {
  GridOptions opt;
  opt.threads = 0;
  opt.seed = 24301;
  const auto report = run_default_grid(opt);
  const auto kinds = report.count_by_name();
  const std::set<std::string> expected{"norm_up",        "norm_low",           "inv_norm",    "tail_G0F0",
                                       "contamination_R", "contamination_L",   "hit_rate",    "hit_rate_corollary",
                                       "aliasing_m",     "disc_error_m",       "HmFm_window", "trunc_polut_m",
                                       "eps_norm_m",     "total_eps_m",        "q_requirement", "fail_rate_components"};
  for (const auto& k : expected) o.require(kinds.count(k) == 1, "kind " + k);
  o.require(kinds.size() == 16, "exactly 16 kinds");
  o.require(report.cases.size() >= 300, ">= 300 cases");
  o.require(report.failures().empty(), "zero violations");
  std::size_t applicable_kinds = 0;
  for (const auto& k : expected) {
    applicable_kinds += std::any_of(report.cases.begin(), report.cases.end(),
                                    [&](const BoundCase& c) { return c.name == k && c.preconditions_met; });
  }
  o.require(applicable_kinds == 16, "every kind has applicable cases");
  o.detail << " cases=" << report.cases.size() << " applicable=" << report.applicable() << " kinds=" << kinds.size()
           << " failures=" << report.failures().size();
}

// 4. Exact window mass against (3/8) eta.
void hit_rate(Outcome& o) {
  for (const double eta : {0.25, 0.5, 1.0}) {
    std::vector<BoundPoint> points;
    for (const double Delta : {0.05, 0.1, 0.2}) points.push_back(plan_point(eta, 0.01, Delta, 1, kDefaultBiasSplit * 0.01));
    for (const double sigma : {2.0, 3.0}) points.push_back(grid_point(sigma, 10, 60.0, eta, 1));
    double min_margin = 1e300;
    double min_mass = 1e300;
    std::size_t applicable = 0;
    for (const auto& p : points) {
      for (const auto& c : check_hit_rate(p)) {
        if (c.name != "hit_rate_corollary" || !c.preconditions_met) continue;
        ++applicable;
        o.require(c.status() == BoundStatus::pass, "window mass >= 3/8 eta");
        min_margin = std::min(min_margin, static_cast<double>(c.margin()));
        min_mass = std::min(min_mass, static_cast<double>(c.exact));
      }
    }
    o.require(applicable > 0, "applicable hit-rate cases");
    o.detail << " eta=" << eta << ": min mass " << min_mass << " vs " << 0.375 * eta << " (margin " << min_margin << ");";
  }
}

// 5. End-to-end GSEE on the three-state spectrum.
void end_to_end(Outcome& o) {
  const PlanInputs in = acceptance_inputs();
  const PlanParams plan = plan_gsee(in);
  const GseeContext ctx(kAcceptanceSpectrum, plan, true, 0);
  const std::size_t runs = 200;
  const std::uint64_t master = 20240611;
  std::size_t failures = 0;
  double max_err = 0.0;
  for (std::size_t r = 0; r < runs; ++r) {
    const auto e = run_gsee(ctx, derive_seed(master, r), 0);
    const double err = phase_distance(e.mu_hat, -0.2);
    max_err = std::max(max_err, err);
    failures += err > in.epsilon;
  }
  const double rate = static_cast<double>(failures) / static_cast<double>(runs);
  const double band = binomial_band(in.delta_fail, runs);
  o.require(rate <= in.delta_fail + band, "failure rate <= delta + band");
  o.detail << " failures=" << failures << "/" << runs << " rate=" << rate << " threshold=" << in.delta_fail + band
           << " max|err|=" << max_err << " q=" << plan.q << " M=" << plan.M << " M0=" << plan.M0
           << " draws/run=" << plan.M * plan.M0;
}

// 6. Depth interpolation.
void depth_interpolation(Outcome& o) {
  const std::vector<double> alphas{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<PlanParams> plans;
  for (const double a : alphas) {
    PlanInputs in = acceptance_inputs();
    in.alpha = a;
    plans.push_back(plan_gsee(in));
    const double bound = corollary_query_bound(in, plans.back().M0, plans.back().log_inv_delta);
    o.require(static_cast<double>(plans.back().N) <= bound, "2^q within query bound");
    o.detail << " a=" << a << ":2^q=" << plans.back().N << ",MM0=" << plans.back().M * plans.back().M0
             << ",bound=" << bound << ";";
  }
  // Walking alpha down toward 0: depth never rises, work never falls.
  for (std::size_t i = 1; i < plans.size(); ++i) {
    o.require(plans[i - 1].N <= plans[i].N, "2^q nonincreasing toward alpha 0");
    o.require(plans[i - 1].M * plans[i - 1].M0 >= plans[i].M * plans[i].M0, "M M0 nondecreasing toward alpha 0");
  }
}

// 7. QPE baseline.
void qpe(Outcome& o) {
  const double floor_value = 1.0 - 1.0 / (2.0 * std::sqrt(2.0));
  double worst = 1.0;
  for (const int q : {4, 7, 10}) {
    const double eps = std::ldexp(1.0, -q);
    const auto setup = make_qpe_setup(SpectrumSpec{{3.5 * eps}, {1.0}}, eps, 0.01);
    worst = std::min(worst, qpe_single_success(setup.distribution, setup.theta0, eps));
  }
  o.require(worst >= floor_value, "half-bin single-sample success");
  const double theta = 12.5 / 128.0;
  const auto setup = make_qpe_setup(SpectrumSpec{{theta}, {1.0}}, 0.01, 0.01);
  o.require(setup.plan.n_samples == 54 && setup.plan.q_qpe == 7, "n = 54, q = 7");
  const std::size_t trials = 2000;
  std::size_t failures = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    failures += phase_distance(run_qpe_baseline(setup, derive_seed(3, t)).mu_hat, theta) > 0.01;
  }
  const double rate = static_cast<double>(failures) / static_cast<double>(trials);
  const double threshold = 0.01 + binomial_band(0.01, trials);
  o.require(rate <= threshold, "majority-vote failure rate");
  o.detail << " worst single-sample success=" << worst << " floor=" << floor_value << " failures=" << failures << "/"
           << trials << " threshold=" << threshold;
}

// 8. Second moment per round.
void second_moment(Outcome& o) {
  const double theta = 0.05 + 0.21 / 4096.0;
  PlanInputs in = acceptance_inputs();
  in.eta = 1.0;
  in.m = 2;
  const GseeContext ctx(SpectrumSpec{{theta}, {1.0}}, plan_gsee(in));
  const auto& plan = ctx.plan();
  const std::size_t rounds = 100000;
  long double s = 0, s2 = 0;
  for (std::size_t r = 0; r < rounds; ++r) {
    const double m = moment_from_basket(run_sampling_round(ctx, derive_seed(8, r)), plan, 2).value;
    s += m;
    s2 += static_cast<long double>(m) * m;
  }
  const double mean = static_cast<double>(s / rounds);
  const double se = std::sqrt(std::max(0.0, static_cast<double>(s2 / rounds) - mean * mean) / static_cast<double>(rounds));
  const double mu = std::ldexp(theta, plan.q);
  const double target = continuous_moment_Gm(0.0, 2, plan.sigma_bins, mu).real();
  o.require(std::abs(target - (mu * mu + plan.sigma_bins * plan.sigma_bins)) <= 1e-9 * target, "G_2(0) = mu^2 + sigma^2");
  const double N = static_cast<double>(plan.N);
  const double tol = plan.eps_tilde * N * N + 3.0 * se;
  o.require(std::abs(mean - target) <= tol, "|mean - target| within eps~ N^2 + 3 SE");
  o.detail << " q=" << plan.q << " M0=" << plan.M0 << " mean=" << std::setprecision(12) << mean << " target=" << target
           << std::setprecision(6) << " |diff|=" << std::abs(mean - target) << " tol=" << tol << " SE=" << se;
}

// 9. Every CLI mode twice with the same config and seed.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[fs::relative(entry.path(), dir).string()] = ss.str();
  }
  return out;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(GSEE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void determinism(Outcome& o) {
  const fs::path configs = GSEE_CONFIG_DIR;
  const fs::path root = fs::temp_directory_path() / "gsee_acceptance_determinism";
  fs::remove_all(root);
  struct Job {
    std::string name, args;
    int expected_exit;
  };
  const std::vector<Job> jobs{
      {"plan", "--config " + (configs / "plan.json").string(), 0},
      {"spectrum", "--config " + (configs / "spectrum.json").string(), 0},
      {"gsee", "--config " + (configs / "gsee.json").string() + " --runs 10", 0},
      {"hamiltonian", "--config " + (configs / "hamiltonian_gsee.json").string() + " --runs 5", 0},
      {"sweep", "--config " + (configs / "sweep.json").string() + " --runs 3", 0},
      {"qpe", "--config " + (configs / "qpe.json").string(), 0},
      {"bounds", "--config " + (configs / "bounds.json").string(), 0},
      {"bounds_probe", "--config " + (configs / "bounds_probe.json").string(), 3},
  };
  std::size_t files = 0;
  for (const auto& job : jobs) {
    std::map<std::string, std::string> first;
    // Same output path both times: the config echo records it.
    const fs::path out = root / job.name;
    for (int rep = 0; rep < 2; ++rep) {
      fs::remove_all(out);
      const int code = run_cli(job.args + " --out " + out.string());
      o.require(code == job.expected_exit, job.name + " exit code " + std::to_string(code));
      auto snap = snapshot(out);
      if (rep == 0) {
        first = std::move(snap);
        o.require(!first.empty(), job.name + " wrote outputs");
      } else {
        o.require(snap == first, job.name + " byte-identical");
        files += snap.size();
      }
    }
  }
  o.detail << " modes=" << jobs.size() << " files compared=" << files;
}

}  // namespace

int main() {
  criterion(1, "printed constants", constants);
  criterion(2, "distribution suites at q in {8, 12, 16}", distributions);
  criterion(3, "default bound grid", bound_suite);
  criterion(4, "hit rate >= (3/8) eta", hit_rate);
  criterion(5, "end-to-end GSEE, 200 runs", end_to_end);
  criterion(6, "depth interpolation sweep", depth_interpolation);
  criterion(7, "QPE baseline", qpe);
  criterion(8, "second-moment rounds", second_moment);
  criterion(9, "determinism of every CLI mode", determinism);
  std::cout << (g_failures == 0 ? "ALL PASS" : "FAILURES: " + std::to_string(g_failures)) << std::endl;
  return g_failures == 0 ? 0 : 1;
}
