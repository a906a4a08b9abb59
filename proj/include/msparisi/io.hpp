#pragma once

#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "msparisi/finite_n.hpp"
#include "msparisi/measures.hpp"
#include "msparisi/model.hpp"
#include "msparisi/optimizer.hpp"
#include "msparisi/parisi.hpp"

namespace msparisi {

/// Malformed or unreadable configuration (maps to exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Json = nlohmann::json;

Json load_json_file(const std::string& path);

/// {"r":2,"zeta":[0.3,0.6,1.0],"gamma":[1.0,1.5],"field":{"atoms":[[0.0,1.0]]}}; r and field optional.
/// Validates the model; violations become ConfigError.
ModelParams model_from_json(const Json& j);
Json to_json(const ModelParams& params);

/// {"atoms":[[0.2,0.3],[0.6,0.7]]}
DiscreteMeasure measure_from_json(const Json& j);
Json to_json(const DiscreteMeasure& mu);

/// {"xi":[...],"x":[...]} including the trailing k+1 entries.
ParisiPair pair_from_json(const Json& j, const ModelParams& params);
Json to_json(const ParisiPair& pair);

/// {"quad_rule":"trapezoid"|"gauss_hermite","quad_nodes":40,"grid_points":2049,"grid_half_width":null}
NumericsConfig numerics_from_json(const Json& j);
Json to_json(const NumericsConfig& num);

/// Reads tol, damping, max_iter, multistart (other keys ignored).
OptimizeOptions optimize_options_from_json(const Json& j);

/// N, n_outer, n_inner, seed, allow_deep.
SimOptions sim_options_from_json(const Json& j);

Json to_json(const OptimReport& report);
Json to_json(const PhaseLabel& label);

}  // namespace msparisi
