#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gsb/engine.hpp"

namespace gsb {

using json = nlohmann::json;

// Configs: missing keys keep their defaults, so partial override documents are valid.
void to_json(json& j, const PriorConfig& c);
void from_json(const json& j, PriorConfig& c);
void to_json(json& j, const ScoringConfig& c);
void from_json(const json& j, ScoringConfig& c);
void to_json(json& j, const ToolConfig& c);
void from_json(const json& j, ToolConfig& c);
void to_json(json& j, const EnKFConfig& c);
void from_json(const json& j, EnKFConfig& c);
void to_json(json& j, const EpisodeConfig& c);
void from_json(const json& j, EpisodeConfig& c);

// Wire form of an ensemble: {"generation", "x", "realizations": [{"boundaries": [[...] x 4]}]}.
json ensemble_payload(const Ensemble& ens);
Ensemble ensemble_from_payload(const json& payload);
json realization_json(const Realization& real);

json points_json(const std::vector<Point>& points);
// Parses [{"x": number, "y": number}, ...]; throws ValidationError naming the bad point.
std::vector<Point> points_from_json(const json& j);

json decision_json(const Decision& d);
Decision decision_from_json(const json& j);

// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view bytes);
std::string config_digest(const EpisodeConfig& cfg);
// Digest over the exact bit patterns of every boundary value.
std::string ensemble_digest(const Ensemble& ens);

}  // namespace gsb
