#include "mac/config.hpp"

#include <functional>
#include <map>
#include <sstream>
#include <variant>

namespace mac {

using nlohmann::json;

namespace {

std::string join_issues(const std::vector<ConfigIssue>& issues) {
  std::ostringstream os;
  os << "invalid config:";
  for (const auto& i : issues) os << " [" << i.field << ": " << i.message << "]";
  return os.str();
}

using FieldPtr = std::variant<int GameConfig::*, int64_t GameConfig::*, uint64_t GameConfig::*, bool GameConfig::*,
                              double GameConfig::*>;

const std::map<std::string, FieldPtr>& scalar_fields() {
  static const std::map<std::string, FieldPtr> fields = {
      {"map_width", &GameConfig::map_width},
      {"map_height", &GameConfig::map_height},
      {"n_agents", &GameConfig::n_agents},
      {"view_rows", &GameConfig::view_rows},
      {"view_cols", &GameConfig::view_cols},
      {"max_episode_steps", &GameConfig::max_episode_steps},
      {"fixed_timestep_mode", &GameConfig::fixed_timestep_mode},
      {"day_length", &GameConfig::day_length},
      {"intrinsic_decay_interval", &GameConfig::intrinsic_decay_interval},
      {"health_regen_interval", &GameConfig::health_regen_interval},
      {"sleep_energy_interval", &GameConfig::sleep_energy_interval},
      {"wake_light_threshold", &GameConfig::wake_light_threshold},
      {"station_radius", &GameConfig::station_radius},
      {"attack_enabled", &GameConfig::attack_enabled},
      {"consume_trees", &GameConfig::consume_trees},
      {"sapling_probability", &GameConfig::sapling_probability},
      {"plant_ripen_steps", &GameConfig::plant_ripen_steps},
      {"zombie_cap", &GameConfig::zombie_cap},
      {"skeleton_cap", &GameConfig::skeleton_cap},
      {"cow_cap", &GameConfig::cow_cap},
      {"arrow_cap", &GameConfig::arrow_cap},
      {"mob_spawn_min_distance", &GameConfig::mob_spawn_min_distance},
      {"mob_despawn_distance", &GameConfig::mob_despawn_distance},
      {"zombie_spawn_day", &GameConfig::zombie_spawn_day},
      {"zombie_spawn_night", &GameConfig::zombie_spawn_night},
      {"skeleton_spawn", &GameConfig::skeleton_spawn},
      {"cow_spawn", &GameConfig::cow_spawn},
      {"zombie_health", &GameConfig::zombie_health},
      {"skeleton_health", &GameConfig::skeleton_health},
      {"cow_health", &GameConfig::cow_health},
      {"zombie_damage", &GameConfig::zombie_damage},
      {"zombie_sleep_damage", &GameConfig::zombie_sleep_damage},
      {"zombie_cooldown", &GameConfig::zombie_cooldown},
      {"arrow_damage", &GameConfig::arrow_damage},
      {"skeleton_reload", &GameConfig::skeleton_reload},
      {"zombie_chase_distance", &GameConfig::zombie_chase_distance},
      {"zombie_chase_probability", &GameConfig::zombie_chase_probability},
      {"zombie_wander_probability", &GameConfig::zombie_wander_probability},
      {"skeleton_retreat_probability", &GameConfig::skeleton_retreat_probability},
      {"skeleton_shoot_probability", &GameConfig::skeleton_shoot_probability},
      {"skeleton_wander_probability", &GameConfig::skeleton_wander_probability},
      {"skeleton_shoot_distance", &GameConfig::skeleton_shoot_distance},
      {"cow_move_probability", &GameConfig::cow_move_probability},
      {"min_spawn_distance", &GameConfig::min_spawn_distance},
      {"spawn_radius", &GameConfig::spawn_radius},
      {"seed_salt", &GameConfig::seed_salt},
  };
  return fields;
}

const std::map<std::string, double TerrainParams::*>& terrain_fields() {
  static const std::map<std::string, double TerrainParams::*> fields = {
      {"water_frequency", &TerrainParams::water_frequency},
      {"mountain_frequency", &TerrainParams::mountain_frequency},
      {"mountain_threshold", &TerrainParams::mountain_threshold},
      {"cave_threshold", &TerrainParams::cave_threshold},
      {"tunnel_threshold", &TerrainParams::tunnel_threshold},
      {"tree_density", &TerrainParams::tree_density},
      {"coal_density", &TerrainParams::coal_density},
      {"iron_density", &TerrainParams::iron_density},
      {"diamond_density", &TerrainParams::diamond_density},
      {"lava_density", &TerrainParams::lava_density},
      {"clearing_radius", &TerrainParams::clearing_radius},
  };
  return fields;
}

RewardScenario reward_from_json(const json& j, std::vector<ConfigIssue>& issues) {
  RewardScenario r;
  std::string kind;
  if (j.is_string()) {
    kind = j.get<std::string>();
  } else if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      if (key == "kind" && value.is_string()) {
        kind = value.get<std::string>();
      } else if (key == "beta" && value.is_number()) {
        r.beta = value.get<double>();
      } else {
        issues.push_back({"reward_scenario." + key, "unknown or malformed key"});
      }
    }
  } else {
    issues.push_back({"reward_scenario", "expected string or object"});
    return r;
  }
  if (kind == "independent") {
    r.kind = RewardKind::independent;
  } else if (kind == "shared") {
    r.kind = RewardKind::shared;
  } else if (kind == "attack") {
    r.kind = RewardKind::attack;
  } else if (kind == "proximity") {
    r.kind = RewardKind::proximity;
  } else {
    issues.push_back({"reward_scenario", "unknown scenario '" + kind + "'"});
  }
  return r;
}

VisibilityRule rule_from_json(const json& j, std::size_t i, std::vector<ConfigIssue>& issues) {
  const std::string field = "expert_schedule[" + std::to_string(i) + "]";
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "always") return VisibilityRule::always();
    if (s == "never") return VisibilityRule::never();
  } else if (j.is_object() && j.size() == 1 && j.contains("first_k") && j["first_k"].is_number_integer()) {
    return VisibilityRule::first_k(j["first_k"].get<int64_t>());
  }
  issues.push_back({field, "expected \"always\", \"never\" or {\"first_k\": k}"});
  return {};
}

std::string reward_kind_name(RewardKind k) {
  switch (k) {
    case RewardKind::independent: return "independent";
    case RewardKind::shared: return "shared";
    case RewardKind::attack: return "attack";
    case RewardKind::proximity: return "proximity";
  }
  return "independent";
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues) : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

std::vector<ConfigIssue> config_issues(const GameConfig& c) {
  std::vector<ConfigIssue> out;
  auto require = [&](bool ok, const char* field, const char* message) {
    if (!ok) out.push_back({field, message});
  };
  auto probability = [&](double p, const char* field) { require(p >= 0.0 && p <= 1.0, field, "must be in [0,1]"); };

  require(c.n_agents >= 1, "n_agents", "must be >= 1");
  require(c.n_agents <= 64, "n_agents", "must be <= 64");
  require(c.view_rows >= 1 && c.view_rows % 2 == 1, "view_rows", "must be a positive odd number");
  require(c.view_cols >= 1 && c.view_cols % 2 == 1, "view_cols", "must be a positive odd number");
  require(c.map_width >= c.view_cols && c.map_height >= c.view_rows, "map_width",
          "map smaller than view window");
  require(c.map_width <= 4096 && c.map_height <= 4096, "map_width", "map larger than 4096 cells per side");
  require(c.max_episode_steps >= 1, "max_episode_steps", "must be >= 1");
  require(c.day_length >= 1, "day_length", "interval must be >= 1");
  require(c.intrinsic_decay_interval >= 1, "intrinsic_decay_interval", "interval must be >= 1");
  require(c.health_regen_interval >= 1, "health_regen_interval", "interval must be >= 1");
  require(c.sleep_energy_interval >= 1, "sleep_energy_interval", "interval must be >= 1");
  require(c.plant_ripen_steps >= 1, "plant_ripen_steps", "interval must be >= 1");
  require(c.zombie_cooldown >= 1, "zombie_cooldown", "interval must be >= 1");
  require(c.skeleton_reload >= 1, "skeleton_reload", "interval must be >= 1");
  probability(c.wake_light_threshold, "wake_light_threshold");
  require(c.station_radius >= 0, "station_radius", "must be >= 0");
  probability(c.sapling_probability, "sapling_probability");
  require(c.zombie_cap >= 0 && c.skeleton_cap >= 0 && c.cow_cap >= 0 && c.arrow_cap >= 0, "zombie_cap",
          "mob caps must be >= 0");
  require(c.mob_spawn_min_distance >= 0, "mob_spawn_min_distance", "must be >= 0");
  require(c.mob_despawn_distance > c.mob_spawn_min_distance, "mob_despawn_distance",
          "must exceed mob_spawn_min_distance");
  probability(c.zombie_spawn_day, "zombie_spawn_day");
  probability(c.zombie_spawn_night, "zombie_spawn_night");
  probability(c.skeleton_spawn, "skeleton_spawn");
  probability(c.cow_spawn, "cow_spawn");
  probability(c.zombie_chase_probability, "zombie_chase_probability");
  probability(c.zombie_wander_probability, "zombie_wander_probability");
  probability(c.skeleton_retreat_probability, "skeleton_retreat_probability");
  probability(c.skeleton_shoot_probability, "skeleton_shoot_probability");
  probability(c.skeleton_wander_probability, "skeleton_wander_probability");
  probability(c.cow_move_probability, "cow_move_probability");
  require(c.zombie_health >= 1 && c.skeleton_health >= 1 && c.cow_health >= 1, "zombie_health",
          "mob health must be >= 1");
  require(c.zombie_damage >= 0 && c.zombie_sleep_damage >= 0 && c.arrow_damage >= 0, "zombie_damage",
          "damage must be >= 0");
  require(c.min_spawn_distance >= 0, "min_spawn_distance", "must be >= 0");
  require(c.spawn_radius >= 0, "spawn_radius", "must be >= 0");
  require(c.reward_scenario.beta >= 0.0, "reward_scenario.beta", "proximity beta must be >= 0");
  require(c.expert_schedule.empty() || static_cast<int>(c.expert_schedule.size()) == c.n_agents, "expert_schedule",
          "needs one rule per agent");
  for (const auto& r : c.expert_schedule) {
    if (r.kind == VisibilityKind::first_k && r.k < 0) {
      out.push_back({"expert_schedule", "first_k needs k >= 0"});
      break;
    }
  }

  const auto& t = c.terrain;
  for (const auto& [key, member] : terrain_fields()) {
    if (key.ends_with("_density")) probability(t.*member, "terrain.density");
  }
  require(t.diamond_density < t.iron_density && t.iron_density < t.coal_density, "terrain.diamond_density",
          "ore densities must satisfy diamond < iron < coal");
  require(t.water_frequency > 0.0 && t.mountain_frequency > 0.0, "terrain.water_frequency",
          "frequencies must be > 0");
  return out;
}

GameConfig validate_config(GameConfig raw) {
  auto issues = config_issues(raw);
  if (!issues.empty()) throw ConfigError(std::move(issues));
  if (raw.reward_scenario.kind == RewardKind::attack) raw.attack_enabled = true;
  return raw;
}

GameConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError(std::vector<ConfigIssue>{{"<root>", "config must be a JSON object"}});
  GameConfig c;
  std::vector<ConfigIssue> issues;
  for (const auto& [key, value] : j.items()) {
    if (key == "reward_scenario") {
      c.reward_scenario = reward_from_json(value, issues);
      continue;
    }
    if (key == "expert_schedule") {
      if (!value.is_array()) {
        issues.push_back({key, "expected array"});
        continue;
      }
      c.expert_schedule.clear();
      for (std::size_t i = 0; i < value.size(); ++i) c.expert_schedule.push_back(rule_from_json(value[i], i, issues));
      continue;
    }
    if (key == "terrain") {
      if (!value.is_object()) {
        issues.push_back({key, "expected object"});
        continue;
      }
      for (const auto& [tk, tv] : value.items()) {
        auto it = terrain_fields().find(tk);
        if (it == terrain_fields().end()) {
          issues.push_back({"terrain." + tk, "unknown key"});
        } else if (!tv.is_number()) {
          issues.push_back({"terrain." + tk, "expected number"});
        } else {
          c.terrain.*(it->second) = tv.get<double>();
        }
      }
      continue;
    }
    auto it = scalar_fields().find(key);
    if (it == scalar_fields().end()) {
      issues.push_back({key, "unknown key"});
      continue;
    }
    std::visit(
        [&](auto member) {
          using T = std::remove_reference_t<decltype(c.*member)>;
          if constexpr (std::is_same_v<T, bool>) {
            if (!value.is_boolean()) return issues.push_back({key, "expected boolean"});
          } else if constexpr (std::is_floating_point_v<T>) {
            if (!value.is_number()) return issues.push_back({key, "expected number"});
          } else if constexpr (std::is_unsigned_v<T>) {
            if (!value.is_number_unsigned()) return issues.push_back({key, "expected non-negative integer"});
          } else {
            if (!value.is_number_integer()) return issues.push_back({key, "expected integer"});
          }
          c.*member = value.get<T>();
        },
        it->second);
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return c;
}

json config_to_json(const GameConfig& c) {
  json j = json::object();
  for (const auto& [key, member] : scalar_fields()) {
    std::visit([&](auto m) { j[key] = c.*m; }, member);
  }
  json terrain = json::object();
  for (const auto& [key, member] : terrain_fields()) terrain[key] = c.terrain.*member;
  j["terrain"] = terrain;
  j["reward_scenario"] = {{"kind", reward_kind_name(c.reward_scenario.kind)}, {"beta", c.reward_scenario.beta}};
  json schedule = json::array();
  for (const auto& r : c.expert_schedule) {
    switch (r.kind) {
      case VisibilityKind::always: schedule.push_back("always"); break;
      case VisibilityKind::never: schedule.push_back("never"); break;
      case VisibilityKind::first_k: schedule.push_back({{"first_k", r.k}}); break;
    }
  }
  j["expert_schedule"] = schedule;
  return j;
}

}  // namespace mac
