// Command-line front end: plan, spectrum, gsee, qpe, bounds and sweep modes.
//
// Exit codes: 0 success, 1 I/O or schema error, 2 infeasible plan or inputs,
// 3 bound violation (bounds mode).

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gsee/gsee.hpp"

namespace fs = std::filesystem;
using namespace gsee;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitViolation = 3;

struct InfeasibleInputs : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_alpha_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("--alpha-list: cannot parse '" + item + "'");
    }
    if (used != item.size()) throw ConfigError("--alpha-list: cannot parse '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("--alpha-list: empty list");
  return out;
}

PlanInputs inputs_at(const ExperimentConfig& cfg, double alpha) {
  PlanInputs in = cfg.inputs;
  in.alpha = alpha;
  try {
    in.validate();
  } catch (const DomainError& e) {
    throw InfeasibleInputs(e.what());
  }
  return in;
}

/// Half-width of the normal-approximation 95% band for a binomial rate p over n trials.
double band95(double p, std::size_t n) { return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

void write_config_echo(const ExperimentConfig& cfg, const fs::path& out) {
  write_text_file(out / "config-echo.json", dump_json(config_to_json(cfg)));
}

const char* estimates_header() {
  return "run_id,alpha,q,M,M0,mu_hat,err,n_dark,n_left,mu_hat_lowest,err_lowest,anchor_misses\n";
}

std::string estimate_row(std::size_t run, double alpha, const EnergyEstimate& e, double theta0) {
  std::ostringstream os;
  const auto& d = e.failure_diagnostics;
  os << run << ',' << fmt(alpha) << ',' << e.q << ',' << e.M_used << ',' << e.M0 << ',' << fmt(e.mu_hat) << ','
     << fmt(e.mu_hat - theta0) << ',' << d.n_dark << ',' << d.n_left << ',' << fmt(e.mu_hat_lowest) << ','
     << fmt(e.mu_hat_lowest - theta0) << ',' << d.anchor_misses << '\n';
  return os.str();
}

struct RunTally {
  std::size_t runs = 0;
  std::size_t failures = 0;
  std::size_t failures_lowest = 0;
  double sum_abs_err = 0.0;
  double max_abs_err = 0.0;
  std::int64_t rounds_with_dark = 0;
  std::int64_t anchor_misses = 0;

  void add(const EnergyEstimate& e, double theta0, double epsilon) {
    const double err = std::abs(e.mu_hat - theta0);
    ++runs;
    failures += err > epsilon;
    failures_lowest += std::abs(e.mu_hat_lowest - theta0) > epsilon;
    sum_abs_err += err;
    max_abs_err = std::max(max_abs_err, err);
    rounds_with_dark += e.failure_diagnostics.rounds_with_dark;
    anchor_misses += e.failure_diagnostics.anchor_misses;
  }

  json to_json(double delta) const {
    const double rate = static_cast<double>(failures) / static_cast<double>(runs);
    const double band = band95(delta, runs);
    json j;
    j["runs"] = runs;
    j["failures"] = failures;
    j["failure_rate"] = rate;
    j["delta"] = delta;
    j["band95"] = band;
    j["threshold"] = delta + band;
    j["within_band"] = rate <= delta + band;
    j["failures_lowest_member"] = failures_lowest;
    j["mean_abs_err"] = sum_abs_err / static_cast<double>(runs);
    j["max_abs_err"] = max_abs_err;
    j["rounds_with_dark_counts"] = rounds_with_dark;
    j["anchor_misses"] = anchor_misses;
    return j;
  }
};

int cmd_plan(const ExperimentConfig& cfg, const fs::path& out) {
  std::string csv = plans_csv_header();
  std::string text;
  json plans = json::array();
  for (const double alpha : cfg.alphas()) {
    const PlanInputs in = inputs_at(cfg, alpha);
    const PlanParams p = plan_gsee(in);
    csv += plans_csv_row(p, in);
    if (!text.empty()) text += '\n';
    text += plan_to_text(p);
    plans.push_back(plan_to_json(p));
  }
  write_text_file(out / "plans.csv", csv);
  write_text_file(out / "plan.txt", text);
  write_text_file(out / "plan.json", dump_json(json{{"plans", plans}}));
  write_text_file(out / "summary.json", dump_json(json{{"mode", "plan"}, {"plans", plans.size()}}));
  return kExitOk;
}

int cmd_spectrum(const ExperimentConfig& cfg, const fs::path& out) {
  const SpectrumSpec& spec = *cfg.spectrum;
  const PlanInputs in = inputs_at(cfg, cfg.inputs.alpha);
  const PlanParams plan = plan_gsee(in);
  const OutcomeDistribution dist = mixed_distribution(spec, plan, true, cfg.threads);
  const std::int64_t N = plan.N;

  std::ostringstream csv;
  csv << "z,signed_z,phase,mixed";
  for (std::size_t j = 0; j < spec.size(); ++j) csv << ",p" << j;
  csv << '\n';
  for (std::int64_t z = 0; z < N; ++z) {
    const auto i = static_cast<std::size_t>(z);
    csv << z << ',' << signed_index(z, plan.q) << ',' << fmt(std::ldexp(static_cast<double>(z), -plan.q)) << ','
        << fmt(dist.mixed[i]);
    for (const auto& pj : dist.per_eigenstate) csv << ',' << fmt(pj[i]);
    csv << '\n';
  }

  const auto g = static_cast<std::int64_t>(round_half_even(std::ldexp(spec.ground_phase(), plan.q)));
  auto mass = [&](std::int64_t lo, std::int64_t hi) {
    double s = 0.0;
    for (std::int64_t x = lo; x <= hi; ++x) s += dist.mixed[static_cast<std::size_t>(((g + x) % N + N) % N)];
    return s;
  };
  json tv = json::array();
  for (std::size_t j = 0; j < spec.size(); ++j) {
    tv.push_back(total_variation(dist.per_eigenstate[j], ideal_distribution(spec.eigenphases[j], plan.sigma_bins, plan.q)));
  }
  json summary;
  summary["mode"] = "spectrum";
  summary["q"] = plan.q;
  summary["N"] = N;
  summary["sigma_bins"] = plan.sigma_bins;
  summary["K"] = plan.K;
  summary["ground_bin"] = g;
  summary["ground_window_mass"] = mass(-plan.K, plan.K);
  summary["three_eighths_eta"] = 0.375 * plan.eta;
  summary["dark_segment_mass"] = mass(plan.K + 1, plan.K + plan.dark_width());
  summary["tv_to_ideal"] = tv;
  write_text_file(out / "distribution.csv", csv.str());
  write_text_file(out / "plans.csv", std::string(plans_csv_header()) + plans_csv_row(plan, in));
  write_text_file(out / "summary.json", dump_json(summary));
  return kExitOk;
}

/// Runs `cfg.runs` independent estimates at one alpha, appending rows to `csv`.
json run_gsee_batch(const ExperimentConfig& cfg, double alpha, std::string& csv, std::string& plans_csv) {
  const SpectrumSpec& spec = *cfg.spectrum;
  const PlanInputs in = inputs_at(cfg, alpha);
  PlanParams plan = plan_gsee(in);
  plans_csv += plans_csv_row(plan, in);
  const GseeContext ctx(spec, plan, true, cfg.threads);
  const double theta0 = spec.ground_phase();
  RunTally tally;
  for (std::size_t r = 0; r < cfg.runs; ++r) {
    const auto e = run_gsee(ctx, derive_seed(cfg.master_seed, r), cfg.threads);
    csv += estimate_row(r, alpha, e, theta0);
    tally.add(e, theta0, in.epsilon);
  }
  json j = tally.to_json(in.delta_fail);
  j["alpha"] = alpha;
  j["q"] = plan.q;
  j["N"] = plan.N;
  j["M"] = plan.M;
  j["M0"] = plan.M0;
  j["M_times_M0"] = plan.M * plan.M0;
  const double bound = corollary_query_bound(in, plan.M0, plan.log_inv_delta);
  j["corollary_query_bound"] = bound;
  j["N_within_corollary_bound"] = static_cast<double>(plan.N) <= bound;
  return j;
}

int cmd_gsee(const ExperimentConfig& cfg, const fs::path& out) {
  std::string csv = estimates_header();
  std::string plans = plans_csv_header();
  json summary = run_gsee_batch(cfg, cfg.inputs.alpha, csv, plans);
  summary["mode"] = "gsee";
  write_text_file(out / "estimates.csv", csv);
  write_text_file(out / "plans.csv", plans);
  write_text_file(out / "summary.json", dump_json(summary));
  return kExitOk;
}

int cmd_sweep(const ExperimentConfig& cfg, const fs::path& out) {
  std::string csv = estimates_header();
  std::string plans = plans_csv_header();
  json per_alpha = json::array();
  for (const double alpha : cfg.alpha_list) per_alpha.push_back(run_gsee_batch(cfg, alpha, csv, plans));

  // Depth falls as alpha decreases while the sample count grows.
  bool depth_monotone = true;
  bool work_monotone = true;
  bool within_bound = true;
  for (std::size_t i = 0; i < per_alpha.size(); ++i) {
    within_bound = within_bound && per_alpha[i]["N_within_corollary_bound"].get<bool>();
    for (std::size_t k = 0; k < per_alpha.size(); ++k) {
      if (cfg.alpha_list[i] < cfg.alpha_list[k]) {
        depth_monotone = depth_monotone && per_alpha[i]["N"].get<std::int64_t>() <= per_alpha[k]["N"].get<std::int64_t>();
        work_monotone = work_monotone &&
                        per_alpha[i]["M_times_M0"].get<std::int64_t>() >= per_alpha[k]["M_times_M0"].get<std::int64_t>();
      }
    }
  }
  json summary;
  summary["mode"] = "sweep";
  summary["per_alpha"] = per_alpha;
  summary["depth_nonincreasing_toward_alpha0"] = depth_monotone;
  summary["work_nondecreasing_toward_alpha0"] = work_monotone;
  summary["all_within_corollary_bound"] = within_bound;
  write_text_file(out / "estimates.csv", csv);
  write_text_file(out / "plans.csv", plans);
  write_text_file(out / "summary.json", dump_json(summary));
  return kExitOk;
}

int cmd_qpe(const ExperimentConfig& cfg, const fs::path& out) {
  const SpectrumSpec& spec = *cfg.spectrum;
  const double eps = cfg.inputs.epsilon;
  const double delta = cfg.inputs.delta_fail;
  QpeSetup setup = [&] {
    try {
      return make_qpe_setup(spec, eps, delta);
    } catch (const DomainError& e) {
      throw InfeasibleInputs(e.what());
    }
  }();
  std::string csv = estimates_header();
  RunTally tally;
  for (std::size_t r = 0; r < cfg.runs; ++r) {
    const auto e = run_qpe_baseline(setup, derive_seed(cfg.master_seed, r));
    csv += estimate_row(r, 0.0, e, setup.theta0);
    tally.add(e, setup.theta0, eps);
  }
  json summary = tally.to_json(delta);
  summary["mode"] = "qpe";
  summary["q"] = setup.plan.q_qpe;
  summary["n_samples"] = setup.plan.n_samples;
  summary["single_sample_success"] = qpe_single_success(setup.distribution, setup.theta0, eps);
  summary["single_sample_floor"] = 1.0 - 1.0 / (2.0 * std::sqrt(2.0));
  write_text_file(out / "estimates.csv", csv);
  write_text_file(out / "summary.json", dump_json(summary));
  return kExitOk;
}

int cmd_bounds(const ExperimentConfig& cfg, const fs::path& out) {
  GridOptions opt;
  opt.threads = cfg.threads;
  opt.seed = cfg.master_seed;
  opt.monte_carlo_rounds = cfg.monte_carlo_rounds;
  const BoundReport report = cfg.bounds_grid == "probe" ? run_probe_grid(opt) : run_default_grid(opt);
  std::ostringstream csv;
  write_bounds_csv(csv, report);
  std::ostringstream text;
  write_bounds_summary(text, report);
  json summary;
  summary["mode"] = "bounds";
  summary["grid"] = report.grid;
  summary["cases"] = report.cases.size();
  summary["applicable"] = report.applicable();
  summary["failures"] = report.failures().size();
  summary["cases_by_kind"] = report.count_by_name();
  write_text_file(out / "bounds.csv", csv.str());
  write_text_file(out / "bounds_summary.txt", text.str());
  write_text_file(out / "summary.json", dump_json(summary));
  std::cout << text.str();
  return report.failures().empty() ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-window ground-state energy estimation"};
  std::string config_path;
  std::string mode;
  std::uint64_t seed = 0;
  std::size_t runs = 0;
  std::string out_dir;
  std::string alpha_text;
  unsigned threads = 1;
  app.add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
  auto* mode_opt = app.add_option("--mode", mode, "plan | spectrum | gsee | qpe | bounds | sweep");
  auto* seed_opt = app.add_option("--seed", seed, "master seed");
  auto* runs_opt = app.add_option("--runs", runs, "independent runs");
  auto* out_opt = app.add_option("--out", out_dir, "output directory");
  auto* alpha_opt = app.add_option("--alpha-list", alpha_text, "comma-separated alpha values");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads (0 = hardware concurrency)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitIo;
  }

  try {
    ExperimentConfig cfg;
    if (!config_path.empty()) {
      cfg = load_config(config_path);
    } else if (mode_opt->count() == 0 || mode != "bounds") {
      throw ConfigError("--config is required except for --mode bounds");
    }
    if (mode_opt->count()) cfg.mode = mode;
    if (seed_opt->count()) cfg.master_seed = seed;
    if (runs_opt->count()) cfg.runs = runs;
    if (out_opt->count()) cfg.output_dir = out_dir;
    if (alpha_opt->count()) cfg.alpha_list = parse_alpha_list(alpha_text);
    if (threads_opt->count()) cfg.threads = threads;
    cfg.validate();

    const fs::path out = cfg.output_dir;
    fs::create_directories(out);
    write_config_echo(cfg, out);
    if (cfg.mode == "plan") return cmd_plan(cfg, out);
    if (cfg.mode == "spectrum") return cmd_spectrum(cfg, out);
    if (cfg.mode == "gsee") return cmd_gsee(cfg, out);
    if (cfg.mode == "sweep") return cmd_sweep(cfg, out);
    if (cfg.mode == "qpe") return cmd_qpe(cfg, out);
    return cmd_bounds(cfg, out);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const InfeasibleInputs& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const PlanInfeasible& e) {
    std::cerr << "infeasible: predicate " << e.predicate() << ": " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const SpectrumMismatch& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
}
