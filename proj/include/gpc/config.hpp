#pragma once

#include "json.hpp"

#include <string>

#include "gpc/experiments.hpp"

namespace gpc {

using Json = nlohmann::ordered_json;

/// Reads a config tree. Missing keys take their defaults; unknown keys and
/// wrongly typed values throw ConfigError naming the field path.
ExperimentConfig config_from_json(const Json& j);
ExperimentConfig parse_config(const std::string& text);

/// Every field, defaults included, so the result reads back to an equal
/// config.
Json config_to_json(const ExperimentConfig& c);

Json to_json(const TailEstimate& t);
Json to_json(const RateTable& t);
Json to_json(const BoundComparison& b);
Json to_json(const MeanEstimate& m);

}  // namespace gpc
