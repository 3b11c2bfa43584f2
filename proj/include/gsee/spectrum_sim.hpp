#pragma once

// Exact outcome distribution of the Gaussian phase-estimation circuit,
// simulated in the Hamiltonian eigenbasis: each eigenphase contributes one
// length-2^q transform and the ancilla marginal is the |gamma_j|^2 mixture.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "gsee/error.hpp"
#include "gsee/gaussian_core.hpp"
#include "gsee/parallel.hpp"
#include "gsee/planner.hpp"
#include "gsee/rng.hpp"

namespace gsee {

inline constexpr std::size_t kMaxEigenstates = 64;

struct SpectrumSpec {
  std::vector<double> eigenphases;
  std::vector<double> overlaps_sq;

  std::size_t size() const { return eigenphases.size(); }

  std::size_t ground_index() const {
    return static_cast<std::size_t>(std::min_element(eigenphases.begin(), eigenphases.end()) - eigenphases.begin());
  }
  double ground_phase() const { return eigenphases.at(ground_index()); }

  /// Smallest eigenphase strictly above the ground phase minus the ground phase;
  /// +inf for a single level.
  double gap() const {
    const double g = ground_phase();
    double next = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < size(); ++j) {
      if (j != ground_index()) next = std::min(next, eigenphases[j]);
    }
    return next - g;
  }

  double max_abs_phase() const {
    double r = 0.0;
    for (double t : eigenphases) r = std::max(r, std::abs(t));
    return r;
  }

  void validate() const {
    if (eigenphases.empty()) throw DomainError("SpectrumSpec: no eigenphases");
    if (eigenphases.size() != overlaps_sq.size()) throw DomainError("SpectrumSpec: eigenphases/overlaps size mismatch");
    if (eigenphases.size() > kMaxEigenstates) throw DomainError("SpectrumSpec: more than 64 eigenstates");
    double total = 0.0;
    for (std::size_t j = 0; j < size(); ++j) {
      if (!(eigenphases[j] > -0.5 && eigenphases[j] < 0.5)) {
        throw DomainError("SpectrumSpec: eigenphase outside (-1/2, 1/2)");
      }
      if (!(overlaps_sq[j] >= 0.0)) throw DomainError("SpectrumSpec: negative overlap");
      total += overlaps_sq[j];
    }
    if (std::abs(total - 1.0) > 1e-12) throw DomainError("SpectrumSpec: overlaps must sum to 1");
  }

  /// Problems with respect to a plan: gap below Delta_work, norm above
  /// 1/2 - Delta_work/2, ground overlap below eta. Empty when compatible.
  std::vector<std::string> mismatches(const PlanParams& plan) const {
    std::vector<std::string> out;
    constexpr double tol = 1e-12;
    if (gap() < plan.Delta_work - tol) out.push_back("gap below Delta_work");
    if (max_abs_phase() > 0.5 - plan.Delta_work / 2.0 + tol) out.push_back("norm above 1/2 - Delta_work/2");
    if (overlaps_sq[ground_index()] < plan.eta - tol) out.push_back("ground overlap below eta");
    return out;
  }
};

struct DenseHamiltonian {
  Eigen::MatrixXcd entries;
  Eigen::VectorXcd initial_state;

  void validate() const {
    const auto n = entries.rows();
    if (n == 0 || entries.cols() != n) throw DomainError("DenseHamiltonian: matrix must be square and non-empty");
    if (static_cast<std::size_t>(n) > kMaxEigenstates) throw DomainError("DenseHamiltonian: dimension above 64");
    if (initial_state.size() != n) throw DomainError("DenseHamiltonian: state dimension mismatch");
    if ((entries - entries.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
      throw DomainError("DenseHamiltonian: matrix is not Hermitian");
    }
    if (std::abs(initial_state.norm() - 1.0) > 1e-12) throw DomainError("DenseHamiltonian: state is not normalized");
  }
};

struct Eigendecomposition {
  SpectrumSpec spectrum;
  Eigen::MatrixXcd eigenvectors;
  double reconstruction_residual = 0.0;
};

/// Eigenphases in ascending order and |<v_j|psi>|^2 in the same order.
inline Eigendecomposition eigendecompose_full(const DenseHamiltonian& h) {
  h.validate();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.entries);
  if (solver.info() != Eigen::Success) throw DomainError("eigendecompose: solver did not converge");
  Eigendecomposition d;
  d.eigenvectors = solver.eigenvectors();
  const Eigen::VectorXd& lambda = solver.eigenvalues();
  const Eigen::VectorXcd overlaps = d.eigenvectors.adjoint() * h.initial_state;
  for (Eigen::Index j = 0; j < lambda.size(); ++j) {
    d.spectrum.eigenphases.push_back(lambda[j]);
    d.spectrum.overlaps_sq.push_back(std::norm(overlaps[j]));
  }
  const Eigen::MatrixXcd rebuilt = d.eigenvectors * lambda.cast<std::complex<double>>().asDiagonal() * d.eigenvectors.adjoint();
  d.reconstruction_residual = (h.entries - rebuilt).cwiseAbs().maxCoeff();
  return d;
}

inline SpectrumSpec eigendecompose(const DenseHamiltonian& h) { return eigendecompose_full(h).spectrum; }

/// Two's-complement reading of a q-bit register value.
inline std::int64_t signed_index(std::int64_t t, int q) {
  const std::int64_t N = std::int64_t{1} << q;
  return t >= N / 2 ? t - N : t;
}

/// Time-domain width paired with a frequency-domain width sigma_bins for
/// Gaussian probability densities: sigma_time * sigma_freq = 2^q / (4 pi).
inline double time_domain_sigma(double sigma_bins, int q) { return std::ldexp(1.0, q) / (4.0 * kPi * sigma_bins); }

/// a_t proportional to sqrt(g0(wrap_mod(t, 0, q); sigma_time)), unit L2 norm.
inline std::vector<double> gaussian_ancilla_amplitudes(double sigma_bins, int q) {
  const std::int64_t N = std::int64_t{1} << q;
  const double st = time_domain_sigma(sigma_bins, q);
  std::vector<double> a(static_cast<std::size_t>(N));
  for (std::int64_t t = 0; t < N; ++t) {
    const double r = wrap_mod(t, 0.0, q);
    a[static_cast<std::size_t>(t)] = std::exp(-r * r / (4.0 * st * st));
  }
  long double ss = 0.0L;
  for (double v : a) ss += static_cast<long double>(v) * v;
  const double inv = 1.0 / std::sqrt(static_cast<double>(ss));
  for (double& v : a) v *= inv;
  return a;
}

inline std::vector<double> gaussian_ancilla_amplitudes(const PlanParams& plan) {
  return gaussian_ancilla_amplitudes(plan.sigma_bins, plan.q);
}

/// Uniform register, the textbook phase-estimation input.
inline std::vector<double> rectangular_ancilla_amplitudes(int q) {
  const std::int64_t N = std::int64_t{1} << q;
  return std::vector<double>(static_cast<std::size_t>(N), 1.0 / std::sqrt(static_cast<double>(N)));
}

/// P(z) = |2^{-q/2} sum_t a_t exp(2 pi i t (theta - z / 2^q))|^2, with t read
/// as a signed register value, via one forward transform of length 2^q.
inline std::vector<double> distribution_from_amplitudes(const std::vector<double>& amplitudes, double theta) {
  const std::size_t N = amplitudes.size();
  if (N < 2 || (N & (N - 1)) != 0) throw DomainError("distribution_from_amplitudes: length must be a power of two");
  if (!(std::abs(theta) <= 0.5)) throw DomainError("distribution_from_amplitudes: |theta| must be at most 1/2");
  const int q = std::countr_zero(N);
  std::vector<std::complex<double>> b(N);
  for (std::size_t t = 0; t < N; ++t) {
    const double ts = static_cast<double>(signed_index(static_cast<std::int64_t>(t), q));
    // reduce the phase to (-1/2, 1/2] turns before scaling by 2 pi
    double turns = ts * theta;
    turns -= std::round(turns);
    b[t] = amplitudes[t] * std::polar(1.0, 2.0 * kPi * turns);
  }
  std::vector<std::complex<double>> f;
  Eigen::FFT<double> fft;
  fft.fwd(f, b);
  std::vector<double> p(N);
  const double scale = 1.0 / static_cast<double>(N);
  for (std::size_t z = 0; z < N; ++z) p[z] = std::norm(f[z]) * scale;
  return p;
}

inline std::vector<double> eigenstate_distribution(double theta, double sigma_bins, int q) {
  return distribution_from_amplitudes(gaussian_ancilla_amplitudes(sigma_bins, q), theta);
}

inline std::vector<double> eigenstate_distribution(double theta, const PlanParams& plan) {
  return eigenstate_distribution(theta, plan.sigma_bins, plan.q);
}

/// Idealized outcome law g0(wrap_mod(z, 2^q theta, q); sigma) normalized over the grid.
inline std::vector<double> ideal_distribution(double theta, double sigma_bins, int q) {
  const std::int64_t N = std::int64_t{1} << q;
  const double mu = std::ldexp(theta, q);
  std::vector<double> p(static_cast<std::size_t>(N));
  double total = 0.0;
  for (std::int64_t z = 0; z < N; ++z) {
    p[static_cast<std::size_t>(z)] = g0(wrap_mod(z, mu, q), sigma_bins, 0.0);
    total += p[static_cast<std::size_t>(z)];
  }
  for (double& v : p) v /= total;
  return p;
}

inline double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw DomainError("total_variation: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

struct OutcomeDistribution {
  int q = 0;
  std::vector<std::vector<double>> per_eigenstate;
  std::vector<double> mixed;
  std::vector<double> weights;

  std::int64_t size() const { return std::int64_t{1} << q; }
};

/// Per-eigenstate distributions from a shared amplitude vector and their
/// overlap-weighted mixture. Transforms run in parallel over eigenstates.
inline OutcomeDistribution mixed_distribution_from_amplitudes(const SpectrumSpec& spec,
                                                              const std::vector<double>& amplitudes,
                                                              unsigned threads = 1) {
  spec.validate();
  OutcomeDistribution d;
  d.q = std::countr_zero(amplitudes.size());
  d.weights = spec.overlaps_sq;
  d.per_eigenstate.resize(spec.size());
  parallel_for(spec.size(), threads,
               [&](std::size_t j) { d.per_eigenstate[j] = distribution_from_amplitudes(amplitudes, spec.eigenphases[j]); });
  d.mixed.assign(amplitudes.size(), 0.0);
  for (std::size_t j = 0; j < spec.size(); ++j) {
    const double w = spec.overlaps_sq[j];
    for (std::size_t z = 0; z < d.mixed.size(); ++z) d.mixed[z] += w * d.per_eigenstate[j][z];
  }
  return d;
}

/// Throws SpectrumMismatch if `enforce_promises` and the spectrum breaks the
/// plan's gap, norm or overlap promise.
inline OutcomeDistribution mixed_distribution(const SpectrumSpec& spec, const PlanParams& plan,
                                              bool enforce_promises = true, unsigned threads = 1) {
  spec.validate();
  if (enforce_promises) {
    const auto bad = spec.mismatches(plan);
    if (!bad.empty()) throw SpectrumMismatch("spectrum does not satisfy plan: " + bad.front());
  }
  return mixed_distribution_from_amplitudes(spec, gaussian_ancilla_amplitudes(plan), threads);
}

/// Inverse-CDF sampler over a fixed probability vector. A guide table of
/// 2^k buckets gives the starting index of the search; the returned index is
/// always the first i with cdf[i] > u * total, exactly as a binary search.
class OutcomeSampler {
 public:
  explicit OutcomeSampler(const std::vector<double>& p) : cdf_(p.size()) {
    if (p.empty()) throw DomainError("OutcomeSampler: empty distribution");
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!(p[i] >= 0.0)) throw DomainError("OutcomeSampler: negative probability");
      acc += p[i];
      cdf_[i] = acc;
    }
    if (!(acc > 0.0)) throw DomainError("OutcomeSampler: zero total mass");
    total_ = acc;
    buckets_ = std::bit_ceil(p.size());
    guide_.resize(buckets_);
    for (std::size_t b = 0; b < buckets_; ++b) {
      const double threshold = (static_cast<double>(b) / static_cast<double>(buckets_)) * total_;
      const auto idx = static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), threshold) - cdf_.begin());
      guide_[b] = std::min(idx, cdf_.size() - 1);
    }
  }

  std::int64_t operator()(double u) const {
    const double x = u * total_;
    const auto b = std::min(buckets_ - 1, static_cast<std::size_t>(u * static_cast<double>(buckets_)));
    std::size_t i = guide_[b];
    const std::size_t last = cdf_.size() - 1;
    while (i < last && cdf_[i] <= x) ++i;
    return static_cast<std::int64_t>(i);
  }

  std::int64_t draw(CounterRng& rng) const { return (*this)(rng.uniform()); }

  std::size_t size() const { return cdf_.size(); }

 private:
  std::vector<double> cdf_;
  std::vector<std::size_t> guide_;
  std::size_t buckets_ = 1;
  double total_ = 0.0;
};

inline std::vector<std::int64_t> draw_samples(const OutcomeSampler& sampler, std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<std::int64_t> out(n);
  for (auto& z : out) z = sampler.draw(rng);
  return out;
}

inline std::vector<std::int64_t> draw_samples(const OutcomeDistribution& dist, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw DomainError("draw_samples: n must be positive");
  return draw_samples(OutcomeSampler(dist.mixed), n, seed);
}

}  // namespace gsee
