#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mac/config.hpp"
#include "mac/types.hpp"

namespace mac {

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxGenerationAttempts = 16;

// World seed actually used for an episode seed under cfg.seed_salt.
uint64_t world_seed(const GameConfig& cfg, uint64_t episode_seed);

// Deterministic in (cfg, seed). Retries with derived seeds until every
// resource is reachable from every spawn; throws GenerationError otherwise.
WorldState generate_world(const GameConfig& cfg, uint64_t seed);

// n distinct walkable cells near the map center, pairwise at least
// min_distance apart when achievable, else spread by farthest-point picking.
std::vector<Cell> choose_spawns(const WorldState& world, int n_agents, Rng& rng, int min_distance, int radius);

// Resources that cannot be reached from some spawn; empty when all are.
std::vector<std::string> unreachable_resources(const WorldState& world, std::span<const Cell> spawns);

PlayerState make_player(Cell pos);
MobState make_mob(const GameConfig& cfg, MobKind kind, Cell pos);

char block_char(BlockKind k);

// One character per cell, rows separated by '\n'. With overlay, players are
// drawn as digits (dead players omitted) and mobs as Z, K, C, '*'.
std::string dump_text_map(const WorldState& world, bool overlay = false);

// Inverse of dump_text_map. Overlay characters become players (ordered by
// digit) or mobs standing on grass. light_level is set from cfg.day_length.
WorldState parse_text_map(std::string_view text, const GameConfig& cfg, uint64_t seed = 0);

}  // namespace mac
