#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "parisi/functional.hpp"
#include "parisi/measure.hpp"
#include "parisi/mixture.hpp"
#include "parisi/optimizer.hpp"

namespace parisi {

using Json = nlohmann::ordered_json;

/// {"coeffs": {"2": 1.0, "4": 0.5}, "h": 0.3, "allow_degenerate": false}; "h" and
/// "allow_degenerate" are optional. Unknown keys are rejected.
MixtureSpec spec_from_json(const Json& j);
Json spec_to_json(const MixtureSpec& spec);

/// {"q": [...], "m": [...]} with cumulative masses.
DiscreteMeasure measure_from_json(const Json& j);
Json measure_to_json(const DiscreteMeasure& m);

/// Parses a file; ValidationError when it is missing or malformed.
Json read_json_file(const std::string& path);

/// %.*g with the given number of significant digits.
std::string format_double(double x, int digits = 17);

/// Serializes with every floating-point number at 17 significant digits.
std::string dump_json(const Json& j, int indent = 2);

/// Indented "key: value" listing, floats at 6 significant digits.
std::string dump_human(const Json& j);

/// Settings shared by all subcommands; read from a config file and then
/// overridden by command-line flags. Keys:
///   spec, format, seed,
///   quadrature: {hermite_nodes, grid_points, grid_halfwidth_sigmas, interpolation_order},
///   optimizer: {restarts, max_iters, value_tol, stationarity_tol, tie_tol, strategy}
struct RunConfig {
  std::optional<std::string> spec_path;
  QuadratureConfig quad;
  OptimizerOptions opt;
  std::string format = "human";
  std::uint64_t seed = 1;
};

RunConfig run_config_from_json(const Json& j);

}  // namespace parisi
