#include "vbsbl/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "vbsbl/baselines.hpp"
#include "vbsbl/metrics.hpp"

namespace vbsbl {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  if (count <= 0) return;
  int workers = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, count);
  if (workers == 1) {
    for (int k = 0; k < count; ++k) body(k);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (int k = next++; k < count; k = next++) {
      try {
        body(k);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------- synthetic

void validate_synth_config(const SynthBenchConfig& config) {
  if (config.rows < 1 || config.cols < 1 || config.block_size < 1) {
    throw Error(ErrorCode::ConfigError, "N, M and the block size must be positive");
  }
  if (config.cols % config.block_size != 0) {
    throw Error(ErrorCode::ConfigError, "M must be a multiple of the block size");
  }
  if (!(config.sparsity > 0.0 && config.sparsity <= 1.0)) {
    throw Error(ErrorCode::ConfigError, "sparsity ratio must lie in (0, 1]");
  }
  if (config.trials < 1) throw Error(ErrorCode::ConfigError, "trials must be at least 1");
  if (!std::isfinite(config.snr_db)) throw Error(ErrorCode::ConfigError, "SNR must be finite");
  validate_config(config.solver);
  validate_prior(config.prior, config.block_size, 0.5);
  if (!has_fast_update(config.prior)) throw Error(ErrorCode::ConfigError, "the benchmark needs a polynomial prior");
}

SynthProblem generate_synth_problem(const SynthBenchConfig& config, std::mt19937_64& rng) {
  const Index N = config.rows;
  const Index M = config.cols;
  const Index d = config.block_size;
  const Index K = M / d;
  std::normal_distribution<double> normal(0.0, 1.0);

  Mat<Real> phi(N, M);
  for (Index c = 0; c < M; ++c) {
    for (Index r = 0; r < N; ++r) phi(r, c) = normal(rng);
    phi.col(c).normalize();
  }

  const auto nonzero = std::max<Index>(1, static_cast<Index>(std::llround(config.sparsity * static_cast<double>(K))));
  std::vector<Index> blocks(static_cast<std::size_t>(K));
  std::iota(blocks.begin(), blocks.end(), Index{0});
  std::shuffle(blocks.begin(), blocks.end(), rng);
  std::vector<Index> support(blocks.begin(), blocks.begin() + nonzero);
  std::sort(support.begin(), support.end());

  Vec<Real> x = Vec<Real>::Zero(M);
  for (Index k : support) {
    for (Index l = 0; l < d; ++l) x[k * d + l] = normal(rng);
  }
  const Vec<Real> clean = phi * x;
  const double lambda = std::pow(10.0, config.snr_db / 10.0) * static_cast<double>(N) / clean.squaredNorm();
  const double sd = 1.0 / std::sqrt(lambda);
  Vec<Real> y = clean;
  for (Index r = 0; r < N; ++r) y[r] += sd * normal(rng);

  InstanceData<Real> data;
  data.y = std::move(y);
  data.dictionary = std::move(phi);
  data.block_sizes.assign(static_cast<std::size_t>(K), d);
  return SynthProblem{validate_instance(std::move(data)), std::move(x), std::move(support), lambda};
}

SynthBenchResult run_synth_bench(const SynthBenchConfig& config) {
  validate_synth_config(config);
  SynthBenchResult result;
  result.trials.resize(static_cast<std::size_t>(config.trials));

  parallel_for(config.trials, config.threads, [&](int t) {
    auto rng = trial_rng(config.seed, static_cast<std::uint64_t>(t));
    const SynthProblem problem = generate_synth_problem(config, rng);
    const Index K = problem.inst.block_count();
    SynthTrial row;
    row.trial = t;
    row.snr_db = config.snr_db;

    const auto start = Clock::now();
    const auto state = fast_solve(problem.inst, config.prior, config.solver);
    row.runtime_seconds = seconds_since(start);
    row.nmse = nmse(problem.x_true, state.x_hat);
    row.support_accuracy = support_accuracy(problem.support, active_set(state.gamma), K);
    row.iterations = state.iterations;
    row.converged = state.converged;
    row.active_count = static_cast<Index>(active_set(state.gamma).size());
    row.oracle_nmse = nmse(problem.x_true, oracle_mmse(problem.inst, problem.support));

    if (config.run_slow) {
      const auto slow_start = Clock::now();
      const auto slow = slow_solve(problem.inst, config.prior, config.solver);
      row.slow_runtime_seconds = seconds_since(slow_start);
      row.slow_nmse = nmse(problem.x_true, slow.x_hat);
      row.slow_support_accuracy = support_accuracy(problem.support, active_set(slow.gamma), K);
      row.slow_iterations = slow.iterations;
    }
    result.trials[static_cast<std::size_t>(t)] = row;
  });

  std::vector<double> nm, onm, acc, it, conv, snm, sacc;
  for (const auto& r : result.trials) {
    nm.push_back(r.nmse);
    onm.push_back(r.oracle_nmse);
    acc.push_back(r.support_accuracy);
    it.push_back(r.iterations);
    conv.push_back(r.converged ? 1.0 : 0.0);
    result.summary.total_runtime_seconds += r.runtime_seconds;
    if (r.slow_nmse) snm.push_back(*r.slow_nmse);
    if (r.slow_support_accuracy) sacc.push_back(*r.slow_support_accuracy);
  }
  result.summary.mean_nmse = mean_of(nm);
  result.summary.mean_oracle_nmse = mean_of(onm);
  result.summary.mean_support_accuracy = mean_of(acc);
  result.summary.median_iterations = median_of(it);
  result.summary.mean_iterations = mean_of(it);
  result.summary.converged_fraction = mean_of(conv);
  if (!snm.empty()) result.summary.mean_slow_nmse = mean_of(snm);
  if (!sacc.empty()) result.summary.mean_slow_support_accuracy = mean_of(sacc);
  return result;
}

// ---------------------------------------------------------- threshold sweep

void validate_sweep_config(const ThresholdSweepConfig& config) {
  if (config.block_sizes.empty()) throw Error(ErrorCode::ConfigError, "need at least one block size");
  for (Index d : config.block_sizes) {
    if (d < 1) throw Error(ErrorCode::ConfigError, "block sizes must be positive");
    for (const auto& p : config.priors) {
      if (!has_fast_update(p)) throw Error(ErrorCode::ConfigError, "the sweep needs polynomial priors");
      validate_prior(p, d, 0.5);
    }
  }
  for (double a : config.alphas) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw Error(ErrorCode::ConfigError, "alphas must be finite and >= 0");
  }
  if (!(config.chi > 0.0 && config.chi <= 1.0)) throw Error(ErrorCode::ConfigError, "chi must lie in (0, 1]");
}

double single_update_rms(const Hyperprior& prior, Index d, double alpha, double chi) {
  if (alpha == 0.0) return 0.0;
  InstanceData<Real> data;
  data.y = Vec<Real>::Constant(d, alpha);
  data.dictionary = Mat<Real>::Identity(d, d);
  data.block_sizes = {d};
  const auto inst = validate_instance(std::move(data));
  SolverConfig config;
  config.max_iterations = 1;
  config.warm_start_iterations = 1;
  config.chi = chi;
  config.fixed_noise_precision = 1.0;
  const auto state = fast_solve(inst, prior, config);
  return state.x_hat.norm() / std::sqrt(static_cast<double>(d));
}

double sweep_cutoff(const Hyperprior& prior, Index d, double chi) {
  if (single_update_rms(prior, d, 1e-12, chi) > 0.0) return 0.0;
  double lo = 1e-12;
  double hi = 1.0;
  while (single_update_rms(prior, d, hi, chi) == 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw Error(ErrorCode::InvalidArgument, "no cutoff found below 1e12");
  }
  for (int k = 0; k < 200 && hi - lo > 1e-13 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (single_update_rms(prior, d, mid, chi) > 0.0 ? hi : lo) = mid;
  }
  return hi;
}

std::vector<SweepCurve> run_threshold_sweep(const ThresholdSweepConfig& config) {
  validate_sweep_config(config);
  std::vector<double> alphas = config.alphas;
  if (alphas.empty()) {
    for (int k = 0; k <= 300; ++k) alphas.push_back(0.01 * k);
  }
  std::vector<SweepCurve> curves;
  for (Index d : config.block_sizes) {
    for (const auto& prior : config.priors) {
      SweepCurve curve;
      curve.block_size = d;
      curve.label = prior_name(prior);
      curve.alphas = alphas;
      for (double a : alphas) curve.rms.push_back(single_update_rms(prior, d, a, config.chi));
      curve.cutoff = sweep_cutoff(prior, d, config.chi);
      curves.push_back(std::move(curve));
    }
    SweepCurve hard;
    hard.block_size = d;
    hard.label = "hard-threshold";
    hard.alphas = alphas;
    hard.cutoff = 1.0;
    for (double a : alphas) {
      const Vec<Real> y = Vec<Real>::Constant(d, a);
      hard.rms.push_back(hard_threshold_reference(y, d).norm() / std::sqrt(static_cast<double>(d)));
    }
    curves.push_back(std::move(hard));
  }
  return curves;
}

// ---------------------------------------------------------------------- DOA

DoaBenchConfig default_array_sweep() {
  DoaBenchConfig config;
  config.sweep = DoaSweep::ArraySize;
  config.snapshots = 1;
  config.cases = {{0.0, 1.0, false}, {0.0, 2.0, false}};
  return config;
}

void validate_doa_config(const DoaBenchConfig& config) {
  if (config.sensors < 1) throw Error(ErrorCode::ConfigError, "need at least one sensor");
  if (config.grid_factor < 1) throw Error(ErrorCode::ConfigError, "grid factor must be positive");
  if (config.snapshots < 1) throw Error(ErrorCode::ConfigError, "need at least one snapshot");
  if (config.trials < 1) throw Error(ErrorCode::ConfigError, "trials must be at least 1");
  if (config.cases.empty()) throw Error(ErrorCode::ConfigError, "need at least one case");
  if (!(config.spacing > 0.0) || !(config.wavelength > 0.0)) {
    throw Error(ErrorCode::ConfigError, "spacing and wavelength must be positive");
  }
  if (!(config.ospa_cutoff > 0.0)) throw Error(ErrorCode::ConfigError, "OSPA cutoff must be positive");
  for (const auto& c : config.cases) {
    if (!(std::abs(c.beta) < 1.0)) throw Error(ErrorCode::ConfigError, "cases need |beta| < 1");
    validate_prior(ScaledJeffreys{c.c}, config.snapshots, 1.0);
  }
  for (double a : config.doas) {
    if (!(a >= -90.0 && a < 90.0)) throw Error(ErrorCode::ConfigError, "source DOAs must lie in [-90, 90)");
  }
  if (config.sweep == DoaSweep::Snr && config.snr_db.empty()) throw Error(ErrorCode::ConfigError, "empty SNR list");
  if (config.sweep == DoaSweep::ArraySize) {
    if (config.array_sizes.empty()) throw Error(ErrorCode::ConfigError, "empty array size list");
    for (Index n : config.array_sizes) {
      if (n < 1) throw Error(ErrorCode::ConfigError, "array sizes must be positive");
    }
  }
  validate_config(config.solver);
}

DoaTrial run_doa_trial(const DoaBenchConfig& config, const DoaCase& scenario, Index sensors, double snr_db,
                       int trial) {
  const ArrayGeometry geom = uniform_linear_array(sensors, config.spacing, config.wavelength);
  const DoaGrid grid = sin_regular_grid(config.grid_factor * sensors);
  const Mat<Complex> psi = build_grid_dictionary(geom, grid);

  SourceModel model;
  model.doas_deg = config.doas;
  model.beta = Complex(scenario.beta, 0.0);
  model.snapshots = config.snapshots;
  auto rng = trial_rng(config.seed, static_cast<std::uint64_t>(trial));
  const DoaScenario sim = simulate_sources(model, psi, grid, snr_db, rng);

  Mat<Complex> row_precision = Mat<Complex>::Identity(config.snapshots, config.snapshots);
  if (scenario.use_correlation) {
    row_precision = ar1_covariance(model.beta, config.snapshots).llt().solve(row_precision);
    row_precision = 0.5 * (row_precision + row_precision.adjoint()).eval();
  }
  const auto inst = mmv_to_block(sim.Y, psi, row_precision);

  const auto start = Clock::now();
  const auto state = fast_solve(inst, PriorAssignment(Hyperprior(ScaledJeffreys{scenario.c})), config.solver);
  DoaTrial out;
  out.runtime_seconds = seconds_since(start);
  const auto estimate = extract_doas(state, grid);
  out.beta = scenario.beta;
  out.c = scenario.c;
  out.use_correlation = scenario.use_correlation;
  out.sensors = sensors;
  out.snr_db = snr_db;
  out.trial = trial;
  out.ospa = ospa(estimate, sim.true_doas, config.ospa_cutoff, 1.0);
  out.estimated_sources = static_cast<Index>(estimate.size());
  out.iterations = state.iterations;
  out.converged = state.converged;
  return out;
}

DoaBenchResult run_doa_bench(const DoaBenchConfig& config) {
  validate_doa_config(config);
  struct Task {
    int case_index;
    Index sensors;
    double snr;
  };
  std::vector<Task> points;
  for (int c = 0; c < static_cast<int>(config.cases.size()); ++c) {
    if (config.sweep == DoaSweep::Snr) {
      for (double snr : config.snr_db) points.push_back({c, config.sensors, snr});
    } else {
      for (Index n : config.array_sizes) points.push_back({c, n, config.array_snr_db});
    }
  }

  DoaBenchResult result;
  const int per_point = config.trials;
  result.trials.resize(points.size() * static_cast<std::size_t>(per_point));
  parallel_for(static_cast<int>(result.trials.size()), config.threads, [&](int k) {
    const Task& task = points[static_cast<std::size_t>(k / per_point)];
    DoaTrial row = run_doa_trial(config, config.cases[static_cast<std::size_t>(task.case_index)], task.sensors,
                                 task.snr, k % per_point);
    row.case_index = task.case_index;
    result.trials[static_cast<std::size_t>(k)] = row;
  });

  for (std::size_t p = 0; p < points.size(); ++p) {
    DoaPoint point;
    point.case_index = points[p].case_index;
    point.beta = config.cases[static_cast<std::size_t>(point.case_index)].beta;
    point.c = config.cases[static_cast<std::size_t>(point.case_index)].c;
    point.sensors = points[p].sensors;
    point.snr_db = points[p].snr;
    std::vector<double> o, e, it, rt;
    for (int t = 0; t < per_point; ++t) {
      const auto& row = result.trials[p * static_cast<std::size_t>(per_point) + static_cast<std::size_t>(t)];
      o.push_back(row.ospa);
      e.push_back(static_cast<double>(row.estimated_sources));
      it.push_back(row.iterations);
      rt.push_back(row.runtime_seconds);
    }
    point.mean_ospa = mean_of(o);
    point.mean_estimated_sources = mean_of(e);
    point.mean_iterations = mean_of(it);
    point.mean_runtime_seconds = mean_of(rt);
    result.points.push_back(point);
  }
  return result;
}

}  // namespace vbsbl
