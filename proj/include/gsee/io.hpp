#pragma once

// Configuration documents, spectrum sources and fixed-format output helpers.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gsee/error.hpp"
#include "gsee/planner.hpp"
#include "gsee/spectrum_sim.hpp"

namespace gsee {

using json = nlohmann::ordered_json;

inline const std::vector<std::string>& known_modes() {
  static const std::vector<std::string> m{"plan", "spectrum", "gsee", "qpe", "bounds", "sweep"};
  return m;
}

struct ExperimentConfig {
  std::string mode = "plan";
  /// Resolved spectrum; absent only in plan and bounds modes.
  std::optional<SpectrumSpec> spectrum;
  /// "inline", or the path the spectrum or Hamiltonian was read from.
  std::string spectrum_source = "inline";
  PlanInputs inputs;
  std::uint64_t master_seed = 1;
  std::size_t runs = 1;
  std::vector<double> alpha_list;
  std::string output_dir = "out";
  unsigned threads = 1;
  /// bounds mode: "default" or "probe".
  std::string bounds_grid = "default";
  std::size_t monte_carlo_rounds = 10000;

  /// alpha_list, or {inputs.alpha} when the list is empty.
  std::vector<double> alphas() const {
    return alpha_list.empty() ? std::vector<double>{inputs.alpha} : alpha_list;
  }

  void validate() const {
    if (std::find(known_modes().begin(), known_modes().end(), mode) == known_modes().end()) {
      throw ConfigError("config: unknown mode '" + mode + "'");
    }
    if (runs < 1) throw ConfigError("config: runs must be at least 1");
    if (mode == "sweep" && alpha_list.empty()) throw ConfigError("config: sweep mode needs a non-empty alpha_list");
    if ((mode == "spectrum" || mode == "gsee" || mode == "qpe" || mode == "sweep") && !spectrum) {
      throw ConfigError("config: mode '" + mode + "' needs a spectrum");
    }
    if (bounds_grid != "default" && bounds_grid != "probe") throw ConfigError("config: bounds.grid must be default or probe");
    if (spectrum) {
      try {
        spectrum->validate();
      } catch (const DomainError& e) {
        throw ConfigError(std::string("config: ") + e.what());
      }
    }
  }
};

namespace io_detail {

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": key '" + key + "' has the wrong type");
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  return j.contains(key) ? get<T>(j, key, where) : fallback;
}

inline std::vector<double> real_vector(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
  std::vector<double> v;
  for (const auto& x : j) {
    if (!x.is_number()) throw ConfigError(where + ": expected an array of numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

}  // namespace io_detail

/// {"eigenphases": [...], "overlaps_sq": [...]}
inline SpectrumSpec spectrum_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("spectrum: expected an object");
  SpectrumSpec s;
  if (!j.contains("eigenphases") || !j.contains("overlaps_sq")) {
    throw ConfigError("spectrum: needs eigenphases and overlaps_sq");
  }
  s.eigenphases = io_detail::real_vector(j.at("eigenphases"), "spectrum.eigenphases");
  s.overlaps_sq = io_detail::real_vector(j.at("overlaps_sq"), "spectrum.overlaps_sq");
  return s;
}

inline json spectrum_to_json(const SpectrumSpec& s) {
  return json{{"eigenphases", s.eigenphases}, {"overlaps_sq", s.overlaps_sq}};
}

/// {"real": [[...]], "imag": [[...]], "initial_state": {"real": [...], "imag": [...]}};
/// "imag" parts may be omitted.
inline DenseHamiltonian hamiltonian_from_json(const json& j) {
  if (!j.is_object() || !j.contains("real") || !j.contains("initial_state")) {
    throw ConfigError("hamiltonian: needs real and initial_state");
  }
  const auto& re = j.at("real");
  if (!re.is_array() || re.empty()) throw ConfigError("hamiltonian: real must be a non-empty matrix");
  const auto n = static_cast<Eigen::Index>(re.size());
  DenseHamiltonian h;
  h.entries = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto row = io_detail::real_vector(re.at(static_cast<std::size_t>(r)), "hamiltonian.real");
    if (static_cast<Eigen::Index>(row.size()) != n) throw ConfigError("hamiltonian: matrix must be square");
    for (Eigen::Index c = 0; c < n; ++c) h.entries(r, c).real(row[static_cast<std::size_t>(c)]);
  }
  if (j.contains("imag")) {
    const auto& im = j.at("imag");
    if (!im.is_array() || static_cast<Eigen::Index>(im.size()) != n) throw ConfigError("hamiltonian: imag shape");
    for (Eigen::Index r = 0; r < n; ++r) {
      const auto row = io_detail::real_vector(im.at(static_cast<std::size_t>(r)), "hamiltonian.imag");
      if (static_cast<Eigen::Index>(row.size()) != n) throw ConfigError("hamiltonian: imag shape");
      for (Eigen::Index c = 0; c < n; ++c) h.entries(r, c).imag(row[static_cast<std::size_t>(c)]);
    }
  }
  const auto& st = j.at("initial_state");
  const auto sr = io_detail::real_vector(io_detail::get<json>(st, "real", "hamiltonian.initial_state"),
                                         "hamiltonian.initial_state.real");
  if (static_cast<Eigen::Index>(sr.size()) != n) throw ConfigError("hamiltonian: state dimension mismatch");
  h.initial_state = Eigen::VectorXcd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) h.initial_state[i].real(sr[static_cast<std::size_t>(i)]);
  if (st.contains("imag")) {
    const auto si = io_detail::real_vector(st.at("imag"), "hamiltonian.initial_state.imag");
    if (static_cast<Eigen::Index>(si.size()) != n) throw ConfigError("hamiltonian: state dimension mismatch");
    for (Eigen::Index i = 0; i < n; ++i) h.initial_state[i].imag(si[static_cast<std::size_t>(i)]);
  }
  try {
    h.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("hamiltonian: ") + e.what());
  }
  return h;
}

inline SpectrumSpec load_spectrum_file(const std::filesystem::path& path) {
  return spectrum_from_json(io_detail::read_json_file(path));
}

inline SpectrumSpec load_hamiltonian_file(const std::filesystem::path& path) {
  return eigendecompose(hamiltonian_from_json(io_detail::read_json_file(path)));
}

/// Relative paths inside the document resolve against `base_dir`.
///
/// Schema:
///   mode: string
///   spectrum: {eigenphases, overlaps_sq} | spectrum_path: string | hamiltonian_path: string
///   inputs: {delta, eta, Delta_true, epsilon, alpha?, m?, c?}
///   seeds: {master, runs?}
///   alpha_list?: [numbers]
///   output_dir?: string, threads?: integer
///   bounds?: {grid?: "default" | "probe", monte_carlo_rounds?: integer}
inline ExperimentConfig config_from_json(const json& j, const std::filesystem::path& base_dir = ".") {
  if (!j.is_object()) throw ConfigError("config: expected an object");
  ExperimentConfig c;
  c.mode = io_detail::get_or<std::string>(j, "mode", c.mode, "config");

  const int sources = static_cast<int>(j.contains("spectrum")) + static_cast<int>(j.contains("spectrum_path")) +
                      static_cast<int>(j.contains("hamiltonian_path"));
  if (sources > 1) throw ConfigError("config: give at most one of spectrum, spectrum_path, hamiltonian_path");
  if (j.contains("spectrum")) {
    c.spectrum = spectrum_from_json(j.at("spectrum"));
  } else if (j.contains("spectrum_path")) {
    const auto p = base_dir / io_detail::get<std::string>(j, "spectrum_path", "config");
    c.spectrum = load_spectrum_file(p);
    c.spectrum_source = p.lexically_normal().string();
  } else if (j.contains("hamiltonian_path")) {
    const auto p = base_dir / io_detail::get<std::string>(j, "hamiltonian_path", "config");
    c.spectrum = load_hamiltonian_file(p);
    c.spectrum_source = p.lexically_normal().string();
  }

  if (j.contains("inputs")) {
    const auto& in = j.at("inputs");
    const std::string w = "config.inputs";
    c.inputs.delta_fail = io_detail::get<double>(in, "delta", w);
    c.inputs.eta = io_detail::get<double>(in, "eta", w);
    c.inputs.Delta_true = io_detail::get<double>(in, "Delta_true", w);
    c.inputs.epsilon = io_detail::get<double>(in, "epsilon", w);
    c.inputs.alpha = io_detail::get_or<double>(in, "alpha", 0.0, w);
    c.inputs.m = io_detail::get_or<int>(in, "m", 1, w);
    c.inputs.c = io_detail::get_or<double>(in, "c", kDefaultBiasSplit, w);
  } else if (c.mode != "bounds") {
    throw ConfigError("config: missing key 'inputs'");
  }

  if (j.contains("seeds")) {
    const auto& s = j.at("seeds");
    c.master_seed = io_detail::get<std::uint64_t>(s, "master", "config.seeds");
    const auto runs = io_detail::get_or<std::int64_t>(s, "runs", 1, "config.seeds");
    if (runs < 1) throw ConfigError("config: runs must be at least 1");
    c.runs = static_cast<std::size_t>(runs);
  }
  if (j.contains("alpha_list")) c.alpha_list = io_detail::real_vector(j.at("alpha_list"), "config.alpha_list");
  c.output_dir = io_detail::get_or<std::string>(j, "output_dir", c.output_dir, "config");
  const auto threads = io_detail::get_or<std::int64_t>(j, "threads", 1, "config");
  if (threads < 0) throw ConfigError("config: threads must be non-negative");
  c.threads = static_cast<unsigned>(threads);
  if (j.contains("bounds")) {
    const auto& b = j.at("bounds");
    c.bounds_grid = io_detail::get_or<std::string>(b, "grid", c.bounds_grid, "config.bounds");
    const auto rounds = io_detail::get_or<std::int64_t>(b, "monte_carlo_rounds", 10000, "config.bounds");
    if (rounds < 0) throw ConfigError("config: monte_carlo_rounds must be non-negative");
    c.monte_carlo_rounds = static_cast<std::size_t>(rounds);
  }
  c.validate();
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  return config_from_json(io_detail::read_json_file(path), path.parent_path().empty() ? "." : path.parent_path());
}

/// Fully resolved configuration: the spectrum is inlined so the echo can be
/// fed back as a config without the original source files.
inline json config_to_json(const ExperimentConfig& c) {
  json j;
  j["mode"] = c.mode;
  if (c.spectrum) j["spectrum"] = spectrum_to_json(*c.spectrum);
  j["spectrum_source"] = c.spectrum_source;
  j["inputs"] = json{{"delta", c.inputs.delta_fail}, {"eta", c.inputs.eta},   {"Delta_true", c.inputs.Delta_true},
                     {"epsilon", c.inputs.epsilon},  {"alpha", c.inputs.alpha}, {"m", c.inputs.m},
                     {"c", c.inputs.c}};
  j["seeds"] = json{{"master", c.master_seed}, {"runs", c.runs}};
  j["alpha_list"] = c.alpha_list;
  j["output_dir"] = c.output_dir;
  j["threads"] = c.threads;
  j["bounds"] = json{{"grid", c.bounds_grid}, {"monte_carlo_rounds", c.monte_carlo_rounds}};
  return j;
}

/// Shortest decimal form is not used: every real is written with 17
/// significant digits so that it round-trips exactly.
template <class Real>
std::string fmt(Real x) {
  if (std::isnan(static_cast<long double>(x))) return "nan";
  if (std::isinf(static_cast<long double>(x))) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

/// Writes `text` to `path`, creating parent directories.
inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("write failed for " + path.string());
}

inline std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

inline json plan_to_json(const PlanParams& p) {
  json j;
  j["alpha"] = p.alpha;
  j["Delta_true"] = p.Delta_true;
  j["epsilon"] = p.epsilon;
  j["eta"] = p.eta;
  j["m"] = p.m;
  j["c"] = p.c;
  j["feasible"] = p.feasible();
  j["Delta_initial"] = p.Delta_initial;
  j["Delta_work"] = p.Delta_work;
  j["log_inv_delta"] = p.log_inv_delta;
  j["delta_work"] = p.delta_work;
  j["delta1_tilde"] = p.delta1_tilde;
  j["eps_tilde"] = p.eps_tilde;
  j["M"] = p.M;
  j["M0_initial"] = p.M0_initial;
  j["M0"] = p.M0;
  j["q"] = p.q;
  j["N"] = p.N;
  j["sigma_tilde"] = p.sigma_tilde;
  j["sigma_bins"] = p.sigma_bins;
  j["K"] = p.K;
  j["two_K_plus_1"] = p.two_K_plus_1;
  j["basket_width"] = p.basket_width();
  j["dark_width"] = p.dark_width();
  j["C_eta"] = p.C_eta;
  j["L"] = p.L;
  j["u"] = p.u;
  j["constraint_flags"] = p.constraint_flags;
  j["predicate_values"] = p.predicate_values;
  j["shrink_iterations"] = p.trail.size();
  j["warnings"] = p.warnings;
  return j;
}

/// key=value lines in a fixed order.
inline std::string plan_to_text(const PlanParams& p) {
  std::ostringstream os;
  auto kv = [&](const char* k, const std::string& v) { os << k << '=' << v << '\n'; };
  kv("alpha", fmt(p.alpha));
  kv("Delta_true", fmt(p.Delta_true));
  kv("epsilon", fmt(p.epsilon));
  kv("eta", fmt(p.eta));
  kv("m", std::to_string(p.m));
  kv("feasible", p.feasible() ? "true" : "false");
  kv("Delta_work", fmt(p.Delta_work));
  kv("log_inv_delta", fmt(p.log_inv_delta));
  kv("delta1_tilde", fmt(p.delta1_tilde));
  kv("eps_tilde", fmt(p.eps_tilde));
  kv("M", std::to_string(p.M));
  kv("M0", std::to_string(p.M0));
  kv("q", std::to_string(p.q));
  kv("N", std::to_string(p.N));
  kv("sigma_tilde", fmt(p.sigma_tilde));
  kv("sigma_bins", fmt(p.sigma_bins));
  kv("K", std::to_string(p.K));
  kv("basket_width", std::to_string(p.basket_width()));
  kv("dark_width", std::to_string(p.dark_width()));
  for (const auto& [name, value] : p.predicate_values) os << "predicate." << name << '=' << fmt(value) << '\n';
  for (const auto& w : p.warnings) os << "warning=" << w << '\n';
  return os.str();
}

inline const char* plans_csv_header() {
  return "alpha,feasible,Delta_work,log_inv_delta,delta1_tilde,eps_tilde,q,N,sigma_tilde,sigma_bins,K,M,M0,M_times_M0,"
         "corollary_query_bound,corollary_M,corollary_M0\n";
}

inline std::string plans_csv_row(const PlanParams& p, const PlanInputs& in) {
  PlanInputs a = in;
  a.alpha = p.alpha;
  std::ostringstream os;
  os << fmt(p.alpha) << ',' << (p.feasible() ? 1 : 0) << ',' << fmt(p.Delta_work) << ',' << fmt(p.log_inv_delta) << ','
     << fmt(p.delta1_tilde) << ',' << fmt(p.eps_tilde) << ',' << p.q << ',' << p.N << ',' << fmt(p.sigma_tilde) << ','
     << fmt(p.sigma_bins) << ',' << p.K << ',' << p.M << ',' << p.M0 << ',' << p.M * p.M0 << ','
     << fmt(corollary_query_bound(a, p.M0, p.log_inv_delta)) << ',' << corollary_M(a) << ',' << corollary_M0(a)
     << '\n';
  return os.str();
}

}  // namespace gsee
