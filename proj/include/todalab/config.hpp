#pragma once

#include "todalab/toda.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace todalab {

/// Schema violation or unreadable config file.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    CyclicData data;
    SolverOptions solver;
};

/// {"n", "mode", "grid": {"N", "L"}, "alpha": {"a1", "a", "an_plus", "an_minus"},
///  "solver": {"tol", "max_iter", "damping"}, "deg_Ln_negative"}. Complex numbers
/// are [re, im] pairs and polynomials coefficient arrays [c_0, c_1, ...].
/// "solver", "a1", "deg_Ln_negative" and (for n = 2) "a" are optional.
/// Unknown keys are rejected.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Normalized form; parse_config(config_to_json(c)) reproduces c.
nlohmann::json config_to_json(const RunConfig& c);

}  // namespace todalab
