#include "config_json.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace vbsbl::cli {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) config_error(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) config_error("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(std::string("bad value for '") + key + "': " + e.what());
  }
}

std::optional<double> opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_number()) config_error(std::string("'") + key + "' must be a number");
  return j.at(key).get<double>();
}

}  // namespace

json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json prior_to_json(const Hyperprior& prior) {
  json j{{"name", prior_name(prior)}};
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, GeneralizedInverseGaussian>) {
          j["a"] = p.a;
          j["b"] = p.b;
          j["c"] = p.c;
        } else if constexpr (std::is_same_v<P, InverseGamma>) {
          j["b"] = p.b;
        } else if constexpr (std::is_same_v<P, GammaPrior>) {
          j["a"] = p.a;
          j["c"] = p.c;
        } else if constexpr (std::is_same_v<P, ScaledJeffreys>) {
          j["c"] = p.c;
        }
      },
      prior);
  return j;
}

Hyperprior prior_from_json(const json& j) {
  if (j.is_string()) return make_prior(j.get<std::string>());
  check_keys(j, {"name", "a", "b", "c"}, "prior");
  if (!j.contains("name") || !j.at("name").is_string()) config_error("prior needs a 'name'");
  return make_prior(j.at("name").get<std::string>(), opt(j, "a"), opt(j, "b"), opt(j, "c"));
}

json to_json(const SolverConfig& c) {
  json j{{"max_iterations", c.max_iterations},
         {"objective_rel_tol", c.objective_rel_tol},
         {"warm_start_iterations", c.warm_start_iterations},
         {"chi", c.chi},
         {"noise_prior", {{"shape", c.noise_prior.shape}, {"rate", c.noise_prior.rate}}},
         {"tol_im", c.tol_im},
         {"prune_threshold", number(c.prune_threshold)}};
  j["fixed_noise_precision"] = c.fixed_noise_precision ? json(*c.fixed_noise_precision) : json(nullptr);
  return j;
}

void merge(SolverConfig& c, const json& j) {
  check_keys(j,
             {"max_iterations", "objective_rel_tol", "warm_start_iterations", "chi", "noise_prior", "tol_im",
              "prune_threshold", "fixed_noise_precision"},
             "solver");
  read(j, "max_iterations", c.max_iterations);
  read(j, "objective_rel_tol", c.objective_rel_tol);
  read(j, "warm_start_iterations", c.warm_start_iterations);
  read(j, "chi", c.chi);
  read(j, "tol_im", c.tol_im);
  read(j, "prune_threshold", c.prune_threshold);
  if (j.contains("noise_prior")) {
    const auto& n = j.at("noise_prior");
    check_keys(n, {"shape", "rate"}, "noise_prior");
    read(n, "shape", c.noise_prior.shape);
    read(n, "rate", c.noise_prior.rate);
  }
  if (j.contains("fixed_noise_precision")) c.fixed_noise_precision = opt(j, "fixed_noise_precision");
}

json to_json(const SynthBenchConfig& c) {
  return json{{"experiment", "synth-bench"},
              {"rows", c.rows},
              {"cols", c.cols},
              {"block_size", c.block_size},
              {"sparsity", c.sparsity},
              {"snr_db", c.snr_db},
              {"trials", c.trials},
              {"seed", c.seed},
              {"prior", prior_to_json(c.prior)},
              {"solver", to_json(c.solver)},
              {"run_slow", c.run_slow}};
}

void merge(SynthBenchConfig& c, const json& j) {
  check_keys(j,
             {"experiment", "rows", "cols", "block_size", "sparsity", "snr_db", "trials", "seed", "prior", "solver",
              "run_slow", "threads"},
             "synth-bench config");
  read(j, "rows", c.rows);
  read(j, "cols", c.cols);
  read(j, "block_size", c.block_size);
  read(j, "sparsity", c.sparsity);
  read(j, "snr_db", c.snr_db);
  read(j, "trials", c.trials);
  read(j, "seed", c.seed);
  read(j, "run_slow", c.run_slow);
  read(j, "threads", c.threads);
  if (j.contains("prior")) c.prior = prior_from_json(j.at("prior"));
  if (j.contains("solver")) merge(c.solver, j.at("solver"));
}

json to_json(const ThresholdSweepConfig& c) {
  json priors = json::array();
  for (const auto& p : c.priors) priors.push_back(prior_to_json(p));
  return json{{"experiment", "threshold-sweep"},
              {"block_sizes", c.block_sizes},
              {"priors", priors},
              {"alphas", c.alphas},
              {"chi", c.chi}};
}

void merge(ThresholdSweepConfig& c, const json& j) {
  check_keys(j, {"experiment", "block_sizes", "priors", "alphas", "chi"}, "threshold-sweep config");
  read(j, "block_sizes", c.block_sizes);
  read(j, "alphas", c.alphas);
  read(j, "chi", c.chi);
  if (j.contains("priors")) {
    if (!j.at("priors").is_array()) config_error("'priors' must be an array");
    c.priors.clear();
    for (const auto& p : j.at("priors")) c.priors.push_back(prior_from_json(p));
  }
}

json to_json(const DoaBenchConfig& c) {
  json cases = json::array();
  for (const auto& k : c.cases) cases.push_back({{"beta", k.beta}, {"c", k.c}, {"use_correlation", k.use_correlation}});
  return json{{"experiment", "doa-bench"},
              {"sweep", c.sweep == DoaSweep::Snr ? "snr" : "array-size"},
              {"sensors", c.sensors},
              {"spacing", c.spacing},
              {"wavelength", c.wavelength},
              {"grid_factor", c.grid_factor},
              {"doas", c.doas},
              {"snapshots", c.snapshots},
              {"snr_db", c.snr_db},
              {"cases", cases},
              {"array_sizes", c.array_sizes},
              {"array_snr_db", c.array_snr_db},
              {"trials", c.trials},
              {"seed", c.seed},
              {"solver", to_json(c.solver)},
              {"ospa_cutoff", c.ospa_cutoff}};
}

void merge(DoaBenchConfig& c, const json& j) {
  check_keys(j,
             {"experiment", "sweep", "sensors", "spacing", "wavelength", "grid_factor", "doas", "snapshots", "snr_db",
              "cases", "array_sizes", "array_snr_db", "trials", "seed", "solver", "ospa_cutoff", "threads"},
             "doa-bench config");
  if (j.contains("sweep")) {
    const auto s = j.at("sweep").get<std::string>();
    if (s == "snr") {
      c.sweep = DoaSweep::Snr;
    } else if (s == "array-size") {
      c.sweep = DoaSweep::ArraySize;
    } else {
      config_error("'sweep' must be 'snr' or 'array-size'");
    }
  }
  read(j, "sensors", c.sensors);
  read(j, "spacing", c.spacing);
  read(j, "wavelength", c.wavelength);
  read(j, "grid_factor", c.grid_factor);
  read(j, "doas", c.doas);
  read(j, "snapshots", c.snapshots);
  read(j, "snr_db", c.snr_db);
  read(j, "array_sizes", c.array_sizes);
  read(j, "array_snr_db", c.array_snr_db);
  read(j, "trials", c.trials);
  read(j, "seed", c.seed);
  read(j, "ospa_cutoff", c.ospa_cutoff);
  read(j, "threads", c.threads);
  if (j.contains("cases")) {
    if (!j.at("cases").is_array()) config_error("'cases' must be an array");
    c.cases.clear();
    for (const auto& k : j.at("cases")) {
      check_keys(k, {"beta", "c", "use_correlation"}, "case");
      DoaCase dc;
      read(k, "beta", dc.beta);
      read(k, "c", dc.c);
      read(k, "use_correlation", dc.use_correlation);
      c.cases.push_back(dc);
    }
  }
  if (j.contains("solver")) merge(c.solver, j.at("solver"));
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
}

}  // namespace vbsbl::cli
