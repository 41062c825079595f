#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vbsbl/doa.hpp"
#include "vbsbl/hyperprior.hpp"
#include "vbsbl/inference.hpp"
#include "vbsbl/model.hpp"

namespace vbsbl {

/// Generator for one Monte Carlo trial. Depends only on (seed, trial,
/// stream), so serial and parallel runs draw identical numbers.
std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream = 0);

/// Runs body(k) for k in [0, count) on up to `threads` workers (0 = hardware
/// concurrency). The first exception thrown by any body is rethrown.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

// ---------------------------------------------------------------- synthetic

struct SynthBenchConfig {
  Index rows = 200;        // N
  Index cols = 400;        // M
  Index block_size = 10;   // d_i
  double sparsity = 0.2;   // fraction of nonzero blocks
  double snr_db = 15.0;
  int trials = 100;
  std::uint64_t seed = 1;
  Hyperprior prior = ScaledJeffreys{1.0};
  SolverConfig solver{};
  bool run_slow = false;
  int threads = 0;
};

void validate_synth_config(const SynthBenchConfig& config);

struct SynthProblem {
  ProblemInstance<Real> inst;
  Vec<Real> x_true;
  std::vector<Index> support;
  double lambda = 1.0;
};

/// Unit-norm Gaussian dictionary, round(sparsity K) random nonzero blocks with
/// standard normal entries, white noise at the requested SNR.
SynthProblem generate_synth_problem(const SynthBenchConfig& config, std::mt19937_64& rng);

struct SynthTrial {
  int trial = 0;
  double snr_db = 0.0;
  double nmse = 0.0;
  double support_accuracy = 0.0;
  int iterations = 0;
  bool converged = false;
  Index active_count = 0;
  double oracle_nmse = 0.0;
  std::optional<double> slow_nmse;
  std::optional<double> slow_support_accuracy;
  std::optional<int> slow_iterations;
  double runtime_seconds = 0.0;
  std::optional<double> slow_runtime_seconds;
};

struct SynthSummary {
  double mean_nmse = 0.0;
  double mean_oracle_nmse = 0.0;
  double mean_support_accuracy = 0.0;
  double median_iterations = 0.0;
  double mean_iterations = 0.0;
  double converged_fraction = 0.0;
  std::optional<double> mean_slow_nmse;
  std::optional<double> mean_slow_support_accuracy;
  double total_runtime_seconds = 0.0;
};

struct SynthBenchResult {
  std::vector<SynthTrial> trials;
  SynthSummary summary;
};

SynthBenchResult run_synth_bench(const SynthBenchConfig& config);

// ---------------------------------------------------------- threshold sweep

struct ThresholdSweepConfig {
  std::vector<Index> block_sizes{2, 10};
  std::vector<Hyperprior> priors{Jeffreys{}, ScaledJeffreys{1.0}, GammaPrior{1.0, 1.0}, InverseGamma{1.0}};
  std::vector<double> alphas;  // empty: 0, 0.01, ..., 3
  double chi = 1.0;
};

void validate_sweep_config(const ThresholdSweepConfig& config);

/// Single block, Phi = I_d, lambda = 1, y = alpha 1_d: one fast update from
/// gamma0 = 0, returns ||x_hat|| / sqrt(d).
double single_update_rms(const Hyperprior& prior, Index d, double alpha, double chi = 1.0);

/// Smallest alpha with a nonzero single-update estimate, found by bisection.
/// Returns 0 if the estimate is nonzero for every alpha > 0.
double sweep_cutoff(const Hyperprior& prior, Index d, double chi = 1.0);

struct SweepCurve {
  Index block_size = 0;
  std::string label;  // prior name, or "hard-threshold"
  std::vector<double> alphas;
  std::vector<double> rms;
  double cutoff = 0.0;
};

std::vector<SweepCurve> run_threshold_sweep(const ThresholdSweepConfig& config);

// ---------------------------------------------------------------------- DOA

struct DoaCase {
  double beta = 0.0;
  double c = 2.0;
  /// B_i = Sigma_s^{-1} when true, B_i = I otherwise.
  bool use_correlation = true;
};

enum class DoaSweep { Snr, ArraySize };

struct DoaBenchConfig {
  DoaSweep sweep = DoaSweep::Snr;
  Index sensors = 100;
  double spacing = 0.5;
  double wavelength = 1.0;
  Index grid_factor = 2;  // grid points per sensor
  std::vector<double> doas{-2.0, 3.0, 50.0};
  Index snapshots = 10;
  std::vector<double> snr_db{-5.0, 0.0, 2.5, 5.0, 7.5, 10.0, 15.0, 20.0};
  std::vector<DoaCase> cases{{0.0, 2.0, true}, {0.5, 2.0, true}, {0.95, 1.5, true}};
  std::vector<Index> array_sizes{25, 50, 100, 150, 200};
  double array_snr_db = 20.0;  // used by the array-size sweep
  int trials = 50;
  std::uint64_t seed = 1;
  SolverConfig solver{};
  double ospa_cutoff = 5.0;
  int threads = 0;
};

/// Array-size sweep defaults: one snapshot, beta = 0, c in {1, 2}.
DoaBenchConfig default_array_sweep();
void validate_doa_config(const DoaBenchConfig& config);

struct DoaTrial {
  int case_index = 0;
  double beta = 0.0;
  double c = 0.0;
  bool use_correlation = true;
  Index sensors = 0;
  double snr_db = 0.0;
  int trial = 0;
  double ospa = 0.0;
  Index estimated_sources = 0;
  int iterations = 0;
  bool converged = false;
  double runtime_seconds = 0.0;
};

struct DoaPoint {
  int case_index = 0;
  double beta = 0.0;
  double c = 0.0;
  Index sensors = 0;
  double snr_db = 0.0;
  double mean_ospa = 0.0;
  double mean_estimated_sources = 0.0;
  double mean_iterations = 0.0;
  double mean_runtime_seconds = 0.0;
};

struct DoaBenchResult {
  std::vector<DoaTrial> trials;
  std::vector<DoaPoint> points;
};

/// One Monte Carlo trial of the multi-snapshot DOA scenario.
DoaTrial run_doa_trial(const DoaBenchConfig& config, const DoaCase& scenario, Index sensors, double snr_db,
                       int trial);

DoaBenchResult run_doa_bench(const DoaBenchConfig& config);

}  // namespace vbsbl
