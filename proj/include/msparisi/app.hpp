#pragma once

#include <optional>
#include <string>
#include <vector>

#include "msparisi/io.hpp"

namespace msparisi {

/// Levels-per-interval schedule 1, 2, 4, ... capped by and ending at k_per_interval.
std::vector<int> refinement_schedule(int k_per_interval);

/// Value, consistency targets, gradient and residual of one pair.
Json run_eval(const Json& model, const Json& pair, const Json& numerics);

/// Optimizes the model in `config` (a model object that may also carry k_per_interval,
/// tol, damping, max_iter, multistart and numerics). `k_override` replaces k_per_interval.
Json run_optimize(const Json& config, std::optional<int> k_override = std::nullopt);

struct SweepAxis {
    /// gamma[i], gamma2[i] (sets gamma_i = sqrt(value)), zeta[i] or field[i] (atom value);
    /// i is the 0-based index into the corresponding model array.
    std::string param;
    std::vector<double> values;
};

struct ScanSpec {
    Json model;
    std::vector<SweepAxis> axes;
    NumericsConfig numerics;
    OptimizeOptions options;
    int k_per_interval = 2;
    std::string output;
};

/// {"model":{...},"sweep":[{"param":"gamma[1]","start":0.5,"stop":0.9,"steps":5}],
///  "numerics":{...},"optimize":{"k_per_interval":2,...},"output":"scan.csv"}
ScanSpec scan_spec_from_json(const Json& j);

/// Model at one grid point; throws DomainError on an invalid point.
ModelParams apply_sweep(const Json& model, const std::vector<SweepAxis>& axes, const std::vector<double>& values);

/// CSV text, one row per grid point in grid order (first axis outermost).
std::string run_scan(const ScanSpec& spec);

/// {"model":{...},"N":10,"n_outer":2000,"n_inner":[500],"seed":12345,
///  "observable":"pressure"|"overlap2","ell":1}. Returns header plus one CSV row;
/// the wall_time_s field is left empty when record_wall_time is false.
std::string run_simulate(const Json& config, bool record_wall_time = true);

struct VerifyOutcome {
    Json report;
    bool all_pass = false;
};

/// {"numerics":{...},"checks":[{"name":"annealed_value","model":{...}}, ...]}.
/// Unknown names or malformed entries throw ConfigError.
VerifyOutcome run_verify(const Json& config);

}  // namespace msparisi
