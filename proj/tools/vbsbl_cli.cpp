// vbsbl command line tool.
//
//   vbsbl solve --y y.txt --dict phi.txt --block-size 4 [--prior scaled-jeffreys --c 1] --out dir
//   vbsbl synth-bench [--config cfg.json] [--trials 100] [--seed 1] [--oracle] --out dir
//   vbsbl doa-bench [--sweep snr|array-size] [--config cfg.json] --out dir
//   vbsbl threshold-sweep [--block-sizes 2,10] [--prior jeffreys ...] --out dir
//
// Matrices use the text format documented in vbsbl/io.hpp. Command line
// flags override values from --config. Exit codes: 0 ok, 1 solver failure,
// 2 parse or configuration error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "config_json.hpp"
#include "vbsbl/io.hpp"
#include "vbsbl/version.hpp"

namespace fs = std::filesystem;
using namespace vbsbl;
using cli::json;
using cli::number;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir = "vbsbl-out";
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> threads;
  std::optional<double> chi;
  std::string prior;
  std::optional<double> a, b, c;
  bool oracle = false;
};

void add_prior_flags(CLI::App* app, CommonOptions& o) {
  app->add_option("--prior", o.prior, "jeffreys | scaled-jeffreys | gamma | inverse-gamma | gig");
  app->add_option("--a", o.a, "prior parameter a");
  app->add_option("--b", o.b, "prior parameter b");
  app->add_option("--c", o.c, "prior parameter c");
}

void add_run_flags(CLI::App* app, CommonOptions& o) {
  app->add_option("--config", o.config_path, "JSON config file");
  app->add_option("--out", o.out_dir, "output directory");
  app->add_option("--seed", o.seed, "base RNG seed");
  app->add_option("--trials", o.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  app->add_option("--threads", o.threads, "worker threads (0 = all cores)");
  app->add_option("--chi", o.chi, "stability threshold on |f'|");
}

bool prior_given(const CommonOptions& o) { return !o.prior.empty() || o.a || o.b || o.c; }

Hyperprior resolve_prior(const CommonOptions& o, const Hyperprior& fallback) {
  if (o.prior.empty()) {
    if (o.a || o.b || o.c) return make_prior(prior_name(fallback), o.a, o.b, o.c);
    return fallback;
  }
  return make_prior(o.prior, o.a, o.b, o.c);
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write '" + path.string() + "'");
  return out;
}

void write_json(const fs::path& path, const json& j) { open_out(path) << j.dump(2) << '\n'; }

json provenance(json config) {
  return json{{"version", std::string(version())}, {"config", std::move(config)}};
}

// ---------------------------------------------------------------- solve

struct SolveOptions {
  std::string y_path, dict_path, blocks, precision_path;
  std::optional<Index> block_size;
  std::optional<int> max_iterations;
  std::optional<double> fixed_lambda;
};

std::vector<Index> parse_blocks(const SolveOptions& s, Index cols) {
  if (!s.blocks.empty()) {
    std::vector<Index> out;
    std::stringstream ss(s.blocks);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        std::size_t used = 0;
        out.push_back(std::stoll(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, "bad --blocks entry '" + tok + "'");
      }
    }
    return out;
  }
  const Index d = s.block_size.value_or(1);
  if (d < 1 || cols % d != 0) throw Error(ErrorCode::ConfigError, "--block-size must divide the dictionary width");
  return std::vector<Index>(static_cast<std::size_t>(cols / d), d);
}

template <class Scalar>
json vec_json(const Vec<Scalar>& v) {
  json out = json::array();
  for (Index k = 0; k < v.size(); ++k) {
    if constexpr (is_complex_v<Scalar>) {
      out.push_back(json::array({number(v[k].real()), number(v[k].imag())}));
    } else {
      out.push_back(number(v[k]));
    }
  }
  return out;
}

template <class Scalar>
json state_json(const PosteriorState<Scalar>& st) {
  json gamma = json::array();
  for (double g : st.gamma) gamma.push_back(number(g));
  json trace = json::array();
  for (double o : st.objective_trace) trace.push_back(number(o));
  return json{{"x_hat", vec_json(st.x_hat)},   {"gamma", gamma},
              {"lambda", number(st.lambda)},   {"active_blocks", st.active_blocks},
              {"iterations", st.iterations},   {"converged", st.converged},
              {"objective", number(st.objective)}, {"objective_trace", trace}};
}

template <class Scalar>
int run_solve_typed(const CommonOptions& o, const SolveOptions& s, const AnyMatrix& y_any, const AnyMatrix& dict_any) {
  InstanceData<Scalar> data;
  const Mat<Scalar> y = as_field<Scalar>(y_any);
  if (y.cols() != 1) throw Error(ErrorCode::DimensionMismatch, "y must be a single column");
  data.y = y.col(0);
  data.dictionary = as_field<Scalar>(dict_any);
  data.block_sizes = parse_blocks(s, data.dictionary.cols());
  if (!s.precision_path.empty()) {
    const Mat<Scalar> B = as_field<Scalar>(read_matrix(s.precision_path));
    data.precisions.assign(data.block_sizes.size(), B);
  }
  const auto inst = validate_instance(std::move(data));

  SolverConfig config;
  if (!o.config_path.empty()) {
    const json j = cli::read_json_file(o.config_path);
    if (j.contains("solver")) cli::merge(config, j.at("solver"));
  }
  if (o.chi) config.chi = *o.chi;
  if (s.max_iterations) config.max_iterations = *s.max_iterations;
  if (s.fixed_lambda) config.fixed_noise_precision = *s.fixed_lambda;
  validate_config(config);
  const Hyperprior prior = resolve_prior(o, ScaledJeffreys{1.0});
  for (Index i = 0; i < inst.block_count(); ++i) validate_prior(prior, inst.blocks().size(i), inst.rho());

  const bool fast = has_fast_update(prior);
  const auto state = fast ? fast_solve(inst, prior, config) : slow_solve(inst, prior, config);
  json result{{"version", std::string(version())},
              {"solver", fast ? "fast" : "slow"},
              {"field", is_complex_v<Scalar> ? "complex" : "real"},
              {"prior", cli::prior_to_json(prior)},
              {"config", cli::to_json(config)},
              {"result", state_json(state)}};
  if (o.oracle && fast) result["slow"] = state_json(slow_solve(inst, prior, config));
  fs::create_directories(o.out_dir);
  write_json(fs::path(o.out_dir) / "result.json", result);
  std::cout << "active blocks: " << state.active_blocks.size() << " of " << inst.block_count()
            << ", iterations: " << state.iterations << (state.converged ? "" : " (not converged)") << '\n';
  return 0;
}

int run_solve(const CommonOptions& o, const SolveOptions& s) {
  const AnyMatrix y = read_matrix(s.y_path);
  const AnyMatrix dict = read_matrix(s.dict_path);
  if (is_complex(y) || is_complex(dict)) return run_solve_typed<Complex>(o, s, y, dict);
  return run_solve_typed<Real>(o, s, y, dict);
}

// ---------------------------------------------------------- synth-bench

int run_synth(const CommonOptions& o, std::optional<double> snr) {
  SynthBenchConfig config;
  if (!o.config_path.empty()) cli::merge(config, cli::read_json_file(o.config_path));
  if (o.seed) config.seed = *o.seed;
  if (o.trials) config.trials = *o.trials;
  if (o.threads) config.threads = *o.threads;
  if (o.chi) config.solver.chi = *o.chi;
  if (snr) config.snr_db = *snr;
  if (o.oracle) config.run_slow = true;
  if (prior_given(o)) config.prior = resolve_prior(o, config.prior);
  validate_synth_config(config);

  const auto result = run_synth_bench(config);
  fs::create_directories(o.out_dir);
  const fs::path dir(o.out_dir);
  {
    auto out = open_out(dir / "trials.csv");
    out << "trial,snr_db,nmse,oracle_nmse,support_accuracy,iterations,converged,active_blocks";
    if (config.run_slow) out << ",slow_nmse,slow_support_accuracy,slow_iterations";
    out << '\n';
    for (const auto& t : result.trials) {
      out << t.trial << ',' << fmt(t.snr_db) << ',' << fmt(t.nmse) << ',' << fmt(t.oracle_nmse) << ','
          << fmt(t.support_accuracy) << ',' << t.iterations << ',' << int(t.converged) << ',' << t.active_count;
      if (config.run_slow) {
        out << ',' << fmt(*t.slow_nmse) << ',' << fmt(*t.slow_support_accuracy) << ',' << *t.slow_iterations;
      }
      out << '\n';
    }
  }
  {
    auto out = open_out(dir / "timings.csv");
    out << "trial,fast_seconds" << (config.run_slow ? ",slow_seconds" : "") << '\n';
    for (const auto& t : result.trials) {
      out << t.trial << ',' << fmt(t.runtime_seconds);
      if (config.run_slow) out << ',' << fmt(*t.slow_runtime_seconds);
      out << '\n';
    }
  }
  const auto& s = result.summary;
  json summary = provenance(cli::to_json(config));
  summary["summary"] = {{"mean_nmse", number(s.mean_nmse)},
                        {"mean_oracle_nmse", number(s.mean_oracle_nmse)},
                        {"mean_support_accuracy", number(s.mean_support_accuracy)},
                        {"median_iterations", number(s.median_iterations)},
                        {"mean_iterations", number(s.mean_iterations)},
                        {"converged_fraction", number(s.converged_fraction)}};
  if (s.mean_slow_nmse) summary["summary"]["mean_slow_nmse"] = number(*s.mean_slow_nmse);
  if (s.mean_slow_support_accuracy) {
    summary["summary"]["mean_slow_support_accuracy"] = number(*s.mean_slow_support_accuracy);
  }
  write_json(dir / "summary.json", summary);
  std::cout << "mean NMSE " << s.mean_nmse << " (oracle " << s.mean_oracle_nmse << "), support accuracy "
            << s.mean_support_accuracy << ", median iterations " << s.median_iterations << '\n';
  return 0;
}

// ------------------------------------------------------------ doa-bench

int run_doa(const CommonOptions& o, const std::string& sweep) {
  DoaBenchConfig config = sweep == "array-size" ? default_array_sweep() : DoaBenchConfig{};
  if (!o.config_path.empty()) cli::merge(config, cli::read_json_file(o.config_path));
  if (o.seed) config.seed = *o.seed;
  if (o.trials) config.trials = *o.trials;
  if (o.threads) config.threads = *o.threads;
  if (o.chi) config.solver.chi = *o.chi;
  validate_doa_config(config);

  const auto result = run_doa_bench(config);
  fs::create_directories(o.out_dir);
  const fs::path dir(o.out_dir);
  {
    auto out = open_out(dir / "trials.csv");
    out << "case,beta,c,use_correlation,sensors,snr_db,trial,ospa,estimated_sources,iterations,converged\n";
    for (const auto& t : result.trials) {
      out << t.case_index << ',' << fmt(t.beta) << ',' << fmt(t.c) << ',' << int(t.use_correlation) << ','
          << t.sensors << ',' << fmt(t.snr_db) << ',' << t.trial << ',' << fmt(t.ospa) << ',' << t.estimated_sources
          << ',' << t.iterations << ',' << int(t.converged) << '\n';
    }
  }
  {
    auto out = open_out(dir / "timings.csv");
    out << "case,sensors,snr_db,trial,fast_seconds\n";
    for (const auto& t : result.trials) {
      out << t.case_index << ',' << t.sensors << ',' << fmt(t.snr_db) << ',' << t.trial << ','
          << fmt(t.runtime_seconds) << '\n';
    }
  }
  json points = json::array();
  for (const auto& p : result.points) {
    points.push_back({{"case", p.case_index},
                      {"beta", p.beta},
                      {"c", p.c},
                      {"sensors", p.sensors},
                      {"snr_db", number(p.snr_db)},
                      {"mean_ospa", number(p.mean_ospa)},
                      {"mean_estimated_sources", number(p.mean_estimated_sources)},
                      {"mean_iterations", number(p.mean_iterations)}});
    std::cout << "case " << p.case_index << " (beta " << p.beta << ", c " << p.c << ") N=" << p.sensors
              << " SNR " << p.snr_db << " dB: OSPA " << p.mean_ospa << '\n';
  }
  json summary = provenance(cli::to_json(config));
  summary["points"] = points;
  write_json(dir / "summary.json", summary);
  return 0;
}

// ------------------------------------------------------ threshold-sweep

int run_sweep(const CommonOptions& o, const std::vector<Index>& block_sizes, const std::vector<std::string>& priors) {
  ThresholdSweepConfig config;
  if (!o.config_path.empty()) cli::merge(config, cli::read_json_file(o.config_path));
  if (!block_sizes.empty()) config.block_sizes = block_sizes;
  if (!priors.empty()) {
    config.priors.clear();
    for (const auto& name : priors) config.priors.push_back(make_prior(name, o.a, o.b, o.c));
  }
  if (o.chi) config.chi = *o.chi;
  validate_sweep_config(config);

  const auto curves = run_threshold_sweep(config);
  fs::create_directories(o.out_dir);
  const fs::path dir(o.out_dir);
  {
    auto out = open_out(dir / "curves.csv");
    out << "block_size,label,alpha,rms\n";
    for (const auto& c : curves) {
      for (std::size_t k = 0; k < c.alphas.size(); ++k) {
        out << c.block_size << ',' << c.label << ',' << fmt(c.alphas[k]) << ',' << fmt(c.rms[k]) << '\n';
      }
    }
  }
  json cutoffs = json::array();
  for (const auto& c : curves) {
    cutoffs.push_back({{"block_size", c.block_size}, {"label", c.label}, {"cutoff", number(c.cutoff)}});
    std::cout << "d=" << c.block_size << " " << c.label << ": cutoff " << c.cutoff << '\n';
  }
  json summary = provenance(cli::to_json(config));
  summary["cutoffs"] = cutoffs;
  write_json(dir / "summary.json", summary);
  return 0;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularMatrix:
    case ErrorCode::EigenFailure:
    case ErrorCode::DegeneratePolynomial:
    case ErrorCode::RankDeficient:
    case ErrorCode::ZeroReference:
      return 1;
    default:
      return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fast variational block-sparse Bayesian learning"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  CommonOptions common;
  SolveOptions solve;
  std::optional<double> snr;
  std::string sweep = "snr";
  std::vector<Index> block_sizes;
  std::vector<std::string> sweep_priors;

  auto* solve_cmd = app.add_subcommand("solve", "Run the solver on matrix files");
  solve_cmd->add_option("--y", solve.y_path, "measurement vector file")->required();
  solve_cmd->add_option("--dict", solve.dict_path, "dictionary matrix file")->required();
  auto* blocks_opt = solve_cmd->add_option("--blocks", solve.blocks, "comma-separated block sizes");
  solve_cmd->add_option("--block-size", solve.block_size, "uniform block size")->excludes(blocks_opt);
  solve_cmd->add_option("--block-precision", solve.precision_path, "intra-block precision B shared by all blocks");
  solve_cmd->add_option("--max-iterations", solve.max_iterations, "iteration cap");
  solve_cmd->add_option("--fixed-lambda", solve.fixed_lambda, "pin the noise precision");
  solve_cmd->add_option("--config", common.config_path, "JSON config with a 'solver' section");
  solve_cmd->add_option("--out", common.out_dir, "output directory");
  solve_cmd->add_option("--chi", common.chi, "stability threshold on |f'|");
  solve_cmd->add_flag("--oracle", common.oracle, "also run the slow reference solver");
  add_prior_flags(solve_cmd, common);

  auto* synth_cmd = app.add_subcommand("synth-bench", "Synthetic Monte Carlo benchmark");
  add_run_flags(synth_cmd, common);
  add_prior_flags(synth_cmd, common);
  synth_cmd->add_option("--snr", snr, "SNR in dB");
  synth_cmd->add_flag("--oracle", common.oracle, "also run the slow reference solver");

  auto* doa_cmd = app.add_subcommand("doa-bench", "Grid-based DOA benchmark");
  add_run_flags(doa_cmd, common);
  doa_cmd->add_option("--sweep", sweep, "snr or array-size")->check(CLI::IsMember({"snr", "array-size"}));

  auto* sweep_cmd = app.add_subcommand("threshold-sweep", "Single-update thresholding curves");
  sweep_cmd->add_option("--config", common.config_path, "JSON config file");
  sweep_cmd->add_option("--out", common.out_dir, "output directory");
  sweep_cmd->add_option("--chi", common.chi, "stability threshold on |f'|");
  sweep_cmd->add_option("--block-sizes", block_sizes, "block sizes")->delimiter(',');
  sweep_cmd->add_option("--prior", sweep_priors, "priors to sweep (repeatable)");
  sweep_cmd->add_option("--a", common.a, "prior parameter a");
  sweep_cmd->add_option("--b", common.b, "prior parameter b");
  sweep_cmd->add_option("--c", common.c, "prior parameter c");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (solve_cmd->parsed()) return run_solve(common, solve);
    if (synth_cmd->parsed()) return run_synth(common, snr);
    if (doa_cmd->parsed()) return run_doa(common, sweep);
    if (sweep_cmd->parsed()) return run_sweep(common, block_sizes, sweep_priors);
  } catch (const Error& e) {
    std::cerr << "vbsbl: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const cli::json::exception& e) {
    std::cerr << "vbsbl: config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "vbsbl: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
