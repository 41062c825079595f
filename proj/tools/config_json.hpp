#pragma once

// JSON mapping of the experiment configs. Readers reject unknown keys so a
// typo in a config file fails loudly instead of silently using a default.

#include <json.hpp>

#include "vbsbl/experiments.hpp"

namespace vbsbl::cli {

using nlohmann::json;

/// Non-finite doubles are written as the strings "inf", "-inf", "nan".
json number(double v);
json prior_to_json(const Hyperprior& prior);
Hyperprior prior_from_json(const json& j);

json to_json(const SolverConfig& c);
json to_json(const SynthBenchConfig& c);
json to_json(const ThresholdSweepConfig& c);
json to_json(const DoaBenchConfig& c);

void merge(SolverConfig& c, const json& j);
void merge(SynthBenchConfig& c, const json& j);
void merge(ThresholdSweepConfig& c, const json& j);
void merge(DoaBenchConfig& c, const json& j);

json read_json_file(const std::string& path);

}  // namespace vbsbl::cli
