#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace mac {

enum class RewardKind : uint8_t { independent, shared, attack, proximity };

struct RewardScenario {
  RewardKind kind = RewardKind::independent;
  // Bonus per other agent within view; only read for proximity.
  double beta = 0.0;

  friend bool operator==(const RewardScenario&, const RewardScenario&) = default;
};

enum class VisibilityKind : uint8_t { always, first_k, never };

// Rule governing whether a target agent shows up in other agents' observations.
struct VisibilityRule {
  VisibilityKind kind = VisibilityKind::always;
  int64_t k = 0;

  static VisibilityRule always() { return {}; }
  static VisibilityRule never() { return {VisibilityKind::never, 0}; }
  static VisibilityRule first_k(int64_t k) { return {VisibilityKind::first_k, k}; }

  bool permits(int64_t step) const {
    switch (kind) {
      case VisibilityKind::always: return true;
      case VisibilityKind::never: return false;
      case VisibilityKind::first_k: return step < k;
    }
    return false;
  }

  friend bool operator==(const VisibilityRule&, const VisibilityRule&) = default;
};

struct TerrainParams {
  double water_frequency = 1.0 / 15.0;
  double mountain_frequency = 1.0 / 15.0;
  double mountain_threshold = 0.15;
  double cave_threshold = 0.3;
  double tunnel_threshold = 0.4;
  double tree_density = 0.2;
  double coal_density = 0.15;
  double iron_density = 0.1;
  double diamond_density = 0.01;
  double lava_density = 0.35;
  // Radius around the map center forced to grass.
  double clearing_radius = 6.0;

  friend bool operator==(const TerrainParams&, const TerrainParams&) = default;
};

struct GameConfig {
  int map_width = 48;
  int map_height = 48;
  int n_agents = 4;
  int view_rows = 7;
  int view_cols = 9;

  int64_t max_episode_steps = 10000;
  bool fixed_timestep_mode = false;

  int day_length = 300;
  int intrinsic_decay_interval = 25;
  int health_regen_interval = 20;
  int sleep_energy_interval = 10;
  double wake_light_threshold = 0.3;

  int station_radius = 2;
  bool attack_enabled = false;
  bool consume_trees = true;
  double sapling_probability = 0.1;
  int plant_ripen_steps = 300;

  int zombie_cap = 6;
  int skeleton_cap = 4;
  int cow_cap = 6;
  int arrow_cap = 12;
  int mob_spawn_min_distance = 6;
  int mob_despawn_distance = 14;
  double zombie_spawn_day = 0.005;
  double zombie_spawn_night = 0.1;
  double skeleton_spawn = 0.05;
  double cow_spawn = 0.02;
  int zombie_health = 5;
  int skeleton_health = 3;
  int cow_health = 3;
  int zombie_damage = 2;
  int zombie_sleep_damage = 7;
  int zombie_cooldown = 5;
  int arrow_damage = 2;
  int skeleton_reload = 4;
  int zombie_chase_distance = 8;
  double zombie_chase_probability = 0.9;
  double zombie_wander_probability = 0.2;
  double skeleton_retreat_probability = 0.4;
  double skeleton_shoot_probability = 0.5;
  double skeleton_wander_probability = 0.2;
  int skeleton_shoot_distance = 5;
  double cow_move_probability = 0.5;

  int min_spawn_distance = 3;
  int spawn_radius = 8;

  RewardScenario reward_scenario;
  // Empty means every agent is always visible; otherwise one rule per agent.
  std::vector<VisibilityRule> expert_schedule;
  // Mixed into every episode seed; 0 uses episode seeds verbatim.
  uint64_t seed_salt = 0;

  TerrainParams terrain;

  VisibilityRule visibility(int agent) const {
    return expert_schedule.empty() ? VisibilityRule::always() : expert_schedule[agent];
  }

  friend bool operator==(const GameConfig&, const GameConfig&) = default;
};

struct ConfigIssue {
  std::string field;
  std::string message;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

// Every violated constraint, empty when the config is usable.
std::vector<ConfigIssue> config_issues(const GameConfig& cfg);

// Normalized copy of raw; throws ConfigError listing every violation.
GameConfig validate_config(GameConfig raw);

// Unknown keys and malformed values raise ConfigError; missing keys keep defaults.
GameConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const GameConfig& cfg);

}  // namespace mac
