#include "mac/observation.hpp"

#include <algorithm>
#include <cstdlib>

namespace mac {

nlohmann::json ObsManifest::to_json() const {
  nlohmann::json channels = nlohmann::json::array();
  for (int k = 0; k < kBlockKindCount; ++k) channels.push_back(std::string(name(static_cast<BlockKind>(k))));
  for (int k = 0; k < kMobKindCount; ++k) channels.push_back(std::string(name(static_cast<MobKind>(k))));
  channels.push_back("other_player");
  nlohmann::json items = nlohmann::json::array();
  for (int k = 0; k < kItemCount; ++k) items.push_back(std::string(name(static_cast<Item>(k))));
  return {
      {"version", version},
      {"view_rows", view_rows},
      {"view_cols", view_cols},
      {"n_agents", n_agents},
      {"grid_size", grid_size},
      {"channels", channels},
      {"inventory_items", items},
      {"intrinsics", {"health", "food", "drink", "energy"}},
      {"directions", {"left", "right", "up", "down"}},
      {"offsets",
       {{"map", map_offset},
        {"inventory", inventory_offset},
        {"intrinsics", intrinsics_offset},
        {"direction", direction_offset},
        {"light", light_offset},
        {"sleeping", sleeping_offset},
        {"alive", alive_offset},
        {"others", others_offset}}},
      {"other_block",
       {{"position", other_position_offset},
        {"inventory", other_inventory_offset},
        {"intrinsics", other_intrinsics_offset},
        {"direction", other_direction_offset},
        {"size", other_block_size}}},
      {"total", total},
  };
}

ObsManifest obs_manifest(const GameConfig& cfg) {
  ObsManifest m;
  m.view_rows = cfg.view_rows;
  m.view_cols = cfg.view_cols;
  m.n_agents = cfg.n_agents;
  m.grid_size = static_cast<std::size_t>(cfg.view_rows) * cfg.view_cols;
  m.map_offset = 0;
  m.inventory_offset = m.map_offset + kMapChannels * m.grid_size;
  m.intrinsics_offset = m.inventory_offset + kItemCount;
  m.direction_offset = m.intrinsics_offset + kIntrinsicCount;
  m.light_offset = m.direction_offset + kDirectionCount;
  m.sleeping_offset = m.light_offset + 1;
  m.alive_offset = m.sleeping_offset + 1;
  m.others_offset = m.alive_offset + 1;
  m.other_position_offset = 0;
  m.other_inventory_offset = m.grid_size;
  m.other_intrinsics_offset = m.other_inventory_offset + kItemCount;
  m.other_direction_offset = m.other_intrinsics_offset + kIntrinsicCount;
  m.other_block_size = m.other_direction_offset + kDirectionCount;
  m.total = m.others_offset + static_cast<std::size_t>(cfg.n_agents - 1) * m.other_block_size;
  return m;
}

bool in_view(const GameConfig& cfg, Cell observer, Cell target) {
  return std::abs(target.row - observer.row) <= cfg.view_rows / 2 &&
         std::abs(target.col - observer.col) <= cfg.view_cols / 2;
}

bool is_visible(const GameConfig& cfg, const WorldState& s, int observer, int target) {
  if (observer == target) return false;
  const auto& t = s.players[target];
  return t.alive && in_view(cfg, s.players[observer].pos, t.pos) && cfg.visibility(target).permits(s.step);
}

std::vector<int> visible_players(const GameConfig& cfg, const WorldState& s, int observer) {
  std::vector<int> out;
  for (int t = 0; t < static_cast<int>(s.players.size()); ++t) {
    if (is_visible(cfg, s, observer, t)) out.push_back(t);
  }
  return out;
}

int count_visible_players(const GameConfig& cfg, const WorldState& s, int observer) {
  int n = 0;
  for (int t = 0; t < static_cast<int>(s.players.size()); ++t) n += is_visible(cfg, s, observer, t);
  return n;
}

namespace {

void write_stats(const PlayerState& p, float* inventory, float* intrinsics, float* direction) {
  for (int i = 0; i < kItemCount; ++i) inventory[i] = p.inventory[i] / 10.0f;
  intrinsics[0] = p.health_halves / 20.0f;
  intrinsics[1] = p.food / 10.0f;
  intrinsics[2] = p.drink / 10.0f;
  intrinsics[3] = p.energy / 10.0f;
  direction[static_cast<int>(p.facing)] = 1.0f;
}

}  // namespace

void encode_symbolic(const GameConfig& cfg, const ObsManifest& m, const WorldState& s, int observer,
                     std::span<float> out) {
  std::fill(out.begin(), out.end(), 0.0f);
  const PlayerState& self = s.players[observer];
  const int half_r = cfg.view_rows / 2;
  const int half_c = cfg.view_cols / 2;
  const Cell origin{self.pos.row - half_r, self.pos.col - half_c};
  float* map = out.data() + m.map_offset;

  auto slot = [&](Cell c) -> int {
    const int r = c.row - origin.row;
    const int col = c.col - origin.col;
    if (r < 0 || col < 0 || r >= cfg.view_rows || col >= cfg.view_cols) return -1;
    return r * cfg.view_cols + col;
  };

  for (int r = 0; r < cfg.view_rows; ++r) {
    for (int c = 0; c < cfg.view_cols; ++c) {
      const BlockKind k = s.tile({origin.row + r, origin.col + c});
      map[static_cast<int>(k) * m.grid_size + r * cfg.view_cols + c] = 1.0f;
    }
  }
  for (const auto& mob : s.mobs) {
    const int i = slot(mob.pos);
    if (i >= 0) map[(kBlockKindCount + static_cast<int>(mob.kind)) * m.grid_size + i] = 1.0f;
  }

  write_stats(self, out.data() + m.inventory_offset, out.data() + m.intrinsics_offset,
              out.data() + m.direction_offset);
  out[m.light_offset] = static_cast<float>(s.light_level);
  out[m.sleeping_offset] = self.sleeping ? 1.0f : 0.0f;
  out[m.alive_offset] = self.alive ? 1.0f : 0.0f;

  const int player_channel = kBlockKindCount + kMobKindCount;
  for (int t = 0; t < static_cast<int>(s.players.size()); ++t) {
    if (!is_visible(cfg, s, observer, t)) continue;
    const PlayerState& p = s.players[t];
    const int i = slot(p.pos);
    map[player_channel * m.grid_size + i] = 1.0f;
    float* block = out.data() + m.other_block_offset(other_slot(observer, t));
    block[m.other_position_offset + i] = 1.0f;
    write_stats(p, block + m.other_inventory_offset, block + m.other_intrinsics_offset,
                block + m.other_direction_offset);
  }
}

std::vector<float> encode_symbolic(const GameConfig& cfg, const WorldState& s, int observer) {
  const ObsManifest m = obs_manifest(cfg);
  std::vector<float> out(m.total);
  encode_symbolic(cfg, m, s, observer, out);
  return out;
}

}  // namespace mac
