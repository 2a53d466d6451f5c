#include "gsb/serialization.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>

#include "gsb/errors.hpp"

namespace gsb {

namespace {

std::string kind_name(VariogramKind k) { return k == VariogramKind::gaussian ? "gaussian" : "exponential"; }

VariogramKind kind_from(const std::string& s) {
  if (s == "gaussian") return VariogramKind::gaussian;
  if (s == "exponential") return VariogramKind::exponential;
  throw ConfigError("unknown variogram kind '" + s + "'");
}

template <class T>
void read(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

}  // namespace

void to_json(json& j, const PriorConfig& c) {
  j = json{{"mean_depths", c.mean_depths},     {"variogram_range", c.variogram_range},
           {"variogram_sill", c.variogram_sill}, {"variogram_kind", kind_name(c.variogram_kind)},
           {"min_thickness", c.min_thickness}, {"seed", c.seed}};
}

void from_json(const json& j, PriorConfig& c) {
  read(j, "mean_depths", c.mean_depths);
  read(j, "variogram_range", c.variogram_range);
  read(j, "variogram_sill", c.variogram_sill);
  if (j.contains("variogram_kind")) c.variogram_kind = kind_from(j.at("variogram_kind").get<std::string>());
  read(j, "min_thickness", c.min_thickness);
  read(j, "seed", c.seed);
}

void to_json(json& j, const ScoringConfig& c) {
  j = json{{"cost_per_meter", c.cost_per_meter},
           {"sweet_spot_top", c.sweet_spot_top},
           {"sweet_spot_bottom", c.sweet_spot_bottom},
           {"sweet_multiplier", c.sweet_multiplier}};
}

void from_json(const json& j, ScoringConfig& c) {
  read(j, "cost_per_meter", c.cost_per_meter);
  read(j, "sweet_spot_top", c.sweet_spot_top);
  read(j, "sweet_spot_bottom", c.sweet_spot_bottom);
  read(j, "sweet_multiplier", c.sweet_multiplier);
}

void to_json(json& j, const ToolConfig& c) {
  j = json{{"look_around", c.look_around},
           {"noise_std", c.noise_std},
           {"sub_locations_per_stand", c.sub_locations_per_stand},
           {"seed", c.seed}};
}

void from_json(const json& j, ToolConfig& c) {
  read(j, "look_around", c.look_around);
  read(j, "noise_std", c.noise_std);
  read(j, "sub_locations_per_stand", c.sub_locations_per_stand);
  read(j, "seed", c.seed);
}

void to_json(json& j, const EnKFConfig& c) {
  j = json{{"obs_error_std", c.obs_error_std},
           {"perturb_obs", c.perturb_obs},
           {"inflation", c.inflation},
           {"min_thickness", c.min_thickness},
           {"seed", c.seed}};
}

void from_json(const json& j, EnKFConfig& c) {
  read(j, "obs_error_std", c.obs_error_std);
  read(j, "perturb_obs", c.perturb_obs);
  read(j, "inflation", c.inflation);
  read(j, "min_thickness", c.min_thickness);
  read(j, "seed", c.seed);
}

void to_json(json& j, const EpisodeConfig& c) {
  j = json{{"stand_length", c.stand_length},
           {"max_decisions", c.max_decisions},
           {"dogleg_limit", c.dogleg_limit},
           {"start", {{"x", c.start.x}, {"y", c.start.y}}},
           {"initial_dip", c.initial_dip},
           {"y_grid_spacing", c.y_grid_spacing},
           {"x_grid_spacing", c.x_grid_spacing},
           {"ensemble_size", c.ensemble_size},
           {"prior", c.prior},
           {"scoring", c.scoring},
           {"tool", c.tool},
           {"enkf", c.enkf},
           {"truth_seed", c.truth_seed}};
}

void from_json(const json& j, EpisodeConfig& c) {
  if (!j.is_object()) throw ConfigError("episode config must be a JSON object");
  read(j, "stand_length", c.stand_length);
  read(j, "max_decisions", c.max_decisions);
  read(j, "dogleg_limit", c.dogleg_limit);
  if (j.contains("start")) {
    read(j.at("start"), "x", c.start.x);
    read(j.at("start"), "y", c.start.y);
  }
  read(j, "initial_dip", c.initial_dip);
  read(j, "y_grid_spacing", c.y_grid_spacing);
  read(j, "x_grid_spacing", c.x_grid_spacing);
  read(j, "ensemble_size", c.ensemble_size);
  if (j.contains("prior")) from_json(j.at("prior"), c.prior);
  if (j.contains("scoring")) from_json(j.at("scoring"), c.scoring);
  if (j.contains("tool")) from_json(j.at("tool"), c.tool);
  if (j.contains("enkf")) from_json(j.at("enkf"), c.enkf);
  read(j, "truth_seed", c.truth_seed);
}

json realization_json(const Realization& real) {
  json bounds = json::array();
  for (const auto& b : real.boundaries) bounds.push_back(b);
  return json{{"boundaries", std::move(bounds)}};
}

json ensemble_payload(const Ensemble& ens) {
  json members = json::array();
  for (const auto& m : ens.members) members.push_back(realization_json(m));
  return json{{"generation", ens.generation}, {"x", ens.grid.nodes()}, {"realizations", std::move(members)}};
}

Ensemble ensemble_from_payload(const json& payload) {
  try {
    Ensemble ens;
    ens.generation = payload.value("generation", 0);
    ens.grid = LateralGrid::from_nodes(payload.at("x").get<std::vector<double>>());
    for (const auto& r : payload.at("realizations")) {
      const auto& bounds = r.at("boundaries");
      if (bounds.size() != kBoundaryCount) throw ValidationError("realization must have 4 boundaries");
      Realization real;
      real.grid = ens.grid;
      for (int k = 0; k < kBoundaryCount; ++k) {
        auto& b = real.boundaries[static_cast<std::size_t>(k)];
        b = bounds.at(static_cast<std::size_t>(k)).get<std::vector<double>>();
        if (b.size() != ens.grid.size()) throw ValidationError("boundary length does not match x grid");
      }
      ens.members.push_back(std::move(real));
    }
    return ens;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed realization payload: ") + e.what());
  }
}

json points_json(const std::vector<Point>& points) {
  json arr = json::array();
  for (const auto& p : points) arr.push_back({{"x", p.x}, {"y", p.y}});
  return arr;
}

std::vector<Point> points_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("trajectory must be an array of {x, y} points");
  std::vector<Point> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& p = j[i];
    if (!p.is_object() || !p.contains("x") || !p.contains("y") || !p["x"].is_number() || !p["y"].is_number())
      throw ValidationError("trajectory point " + std::to_string(i) + " must be {\"x\": number, \"y\": number}");
    out.push_back({p["x"].get<double>(), p["y"].get<double>()});
  }
  return out;
}

json decision_json(const Decision& d) {
  if (d.is_stop()) return json{{"action", "stop"}};
  return json{{"action", "continue"}, {"y", d.y}};
}

Decision decision_from_json(const json& j) {
  if (!j.is_object() || !j.contains("action") || !j["action"].is_string())
    throw ValidationError("decision must carry an \"action\" string");
  const auto action = j["action"].get<std::string>();
  if (action == "stop") return Decision::stop();
  if (action == "continue") {
    if (!j.contains("y") || !j["y"].is_number()) throw ValidationError("continue decision needs a numeric \"y\"");
    return Decision::go(j["y"].get<double>());
  }
  throw ValidationError("unknown action '" + action + "'");
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_digest(const EpisodeConfig& cfg) { return fnv1a_hex(json(cfg).dump()); }

std::string ensemble_digest(const Ensemble& ens) {
  std::string bytes;
  bytes.reserve(ens.size() * kBoundaryCount * ens.grid.size() * 8);
  for (const auto& m : ens.members)
    for (const auto& b : m.boundaries)
      for (double v : b) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int s = 0; s < 64; s += 8) bytes.push_back(static_cast<char>((bits >> s) & 0xff));
      }
  return fnv1a_hex(bytes);
}

}  // namespace gsb
