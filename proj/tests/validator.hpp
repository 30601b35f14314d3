#pragma once

#include <map>
#include <string>
#include <vector>

#include "mac/engine.hpp"

namespace mac::validator {

// Prerequisites written out independently of the engine's recipe table.
struct Need {
  std::map<Item, int> items;
  bool table = false;
  bool furnace = false;
};

inline const std::map<Item, Need>& craft_needs() {
  static const std::map<Item, Need> m = {
      {Item::wood_pickaxe, {{{Item::wood, 1}}, true, false}},
      {Item::wood_sword, {{{Item::wood, 1}}, true, false}},
      {Item::stone_pickaxe, {{{Item::wood, 1}, {Item::stone, 1}}, true, false}},
      {Item::stone_sword, {{{Item::wood, 1}, {Item::stone, 1}}, true, false}},
      {Item::iron_pickaxe, {{{Item::wood, 1}, {Item::coal, 1}, {Item::iron, 1}}, true, true}},
      {Item::iron_sword, {{{Item::wood, 1}, {Item::coal, 1}, {Item::iron, 1}}, true, true}},
  };
  return m;
}

inline const std::map<BlockKind, Need>& place_needs() {
  static const std::map<BlockKind, Need> m = {
      {BlockKind::crafting_table, {{{Item::wood, 2}}, false, false}},
      {BlockKind::furnace, {{{Item::stone, 1}}, true, false}},
      {BlockKind::placed_stone, {{{Item::stone, 1}}, false, false}},
      {BlockKind::plant_sapling, {{{Item::sapling, 1}}, false, false}},
  };
  return m;
}

inline bool placeable_target(BlockKind placed, BlockKind target) {
  const bool floor = target == BlockKind::grass || target == BlockKind::sand || target == BlockKind::path;
  switch (placed) {
    case BlockKind::placed_stone: return floor || target == BlockKind::water || target == BlockKind::lava;
    case BlockKind::plant_sapling: return target == BlockKind::grass;
    default: return floor;
  }
}

// Scans every cell within radius; stations placed earlier in the same step count too.
inline bool station_near(const WorldState& pre, std::span<const StepEvent> earlier, Cell pos, BlockKind station,
                         int radius) {
  for (int r = pos.row - radius; r <= pos.row + radius; ++r)
    for (int c = pos.col - radius; c <= pos.col + radius; ++c)
      if (pre.tile({r, c}) == station) return true;
  for (const auto& e : earlier) {
    if (e.kind == EventKind::block_changed && static_cast<BlockKind>(e.b) == station &&
        chebyshev(e.cell, pos) <= radius)
      return true;
  }
  return false;
}

inline Action craft_action(Item product) {
  switch (product) {
    case Item::wood_pickaxe: return Action::make_wood_pickaxe;
    case Item::stone_pickaxe: return Action::make_stone_pickaxe;
    case Item::iron_pickaxe: return Action::make_iron_pickaxe;
    case Item::wood_sword: return Action::make_wood_sword;
    case Item::stone_sword: return Action::make_stone_sword;
    default: return Action::make_iron_sword;
  }
}

inline Action place_action(BlockKind placed) {
  switch (placed) {
    case BlockKind::crafting_table: return Action::place_table;
    case BlockKind::furnace: return Action::place_furnace;
    case BlockKind::placed_stone: return Action::place_stone;
    default: return Action::place_plant;
  }
}

struct Tally {
  int64_t crafts = 0;
  int64_t places = 0;
  int64_t mines = 0;
};

// Problems with one step's craft, place and mining events, judged against the pre-step state.
inline std::vector<std::string> check_step(const GameConfig& cfg, const WorldState& pre,
                                           std::span<const Action> actions, std::span<const StepEvent> events,
                                           Tally* tally = nullptr) {
  std::vector<std::string> problems;
  auto fail = [&](const StepEvent& e, const std::string& what) {
    problems.push_back("step " + std::to_string(pre.step + 1) + " agent " + std::to_string(e.agent) + ": " + what);
  };
  auto has_items = [&](const PlayerState& p, const Need& need) {
    for (auto [item, n] : need.items)
      if (p.count(item) < n) return false;
    return true;
  };
  for (std::size_t k = 0; k < events.size(); ++k) {
    const StepEvent& e = events[k];
    if (e.agent < 0) continue;
    const PlayerState& p = pre.players[e.agent];
    const auto earlier = events.first(k);
    if (e.kind == EventKind::item_crafted) {
      if (tally) ++tally->crafts;
      const auto product = static_cast<Item>(e.a);
      const auto it = craft_needs().find(product);
      if (it == craft_needs().end()) {
        fail(e, "crafted a non-tool item");
        continue;
      }
      const Need& need = it->second;
      if (!p.alive || p.sleeping) fail(e, "crafted while dead or asleep");
      if (actions[e.agent] != craft_action(product)) fail(e, "crafted without the craft action");
      if (!has_items(p, need)) fail(e, "crafted without inputs");
      if (need.table && !station_near(pre, earlier, p.pos, BlockKind::crafting_table, cfg.station_radius))
        fail(e, "crafted with no table in reach");
      if (need.furnace && !station_near(pre, earlier, p.pos, BlockKind::furnace, cfg.station_radius))
        fail(e, "crafted with no furnace in reach");
    } else if (e.kind == EventKind::block_changed) {
      const auto to = static_cast<BlockKind>(e.b);
      const auto from = static_cast<BlockKind>(e.a);
      const auto it = place_needs().find(to);
      // Eating fruit turns a ripe plant back into a sapling; that is not a placement.
      if (it == place_needs().end() || (to == BlockKind::plant_sapling && from == BlockKind::plant_ripe)) continue;
      if (tally) ++tally->places;
      if (!p.alive || p.sleeping) fail(e, "placed while dead or asleep");
      if (actions[e.agent] != place_action(to)) fail(e, "placed without the place action");
      if (!has_items(p, it->second)) fail(e, "placed without inputs");
      if (!(e.cell == p.pos + offset(p.facing))) fail(e, "placed away from the faced cell");
      if (!placeable_target(to, pre.tile(e.cell))) fail(e, "placed on a forbidden tile");
      if (it->second.table && !station_near(pre, earlier, p.pos, BlockKind::crafting_table, cfg.station_radius))
        fail(e, "placed with no table in reach");
    } else if (e.kind == EventKind::resource_collected) {
      const auto r = static_cast<Resource>(e.a);
      std::optional<Item> tool;
      if (r == Resource::stone || r == Resource::coal) tool = Item::wood_pickaxe;
      if (r == Resource::iron) tool = Item::stone_pickaxe;
      if (r == Resource::diamond) tool = Item::iron_pickaxe;
      if (!tool) continue;
      if (tally) ++tally->mines;
      if (p.count(*tool) == 0) fail(e, "mined without the pickaxe");
      if (actions[e.agent] != Action::do_) fail(e, "mined without DO");
    }
  }
  return problems;
}

// Reward in twentieths rebuilt from events alone (independent scenario).
inline std::vector<int64_t> reward_units_from_events(int n_agents, std::span<const StepEvent> events) {
  std::vector<int64_t> units(n_agents, 0);
  for (const auto& e : events) {
    if (e.kind == EventKind::achievement_unlocked) units[e.agent] += 20;
    if (e.kind == EventKind::health_changed) units[e.agent] += static_cast<int64_t>(e.b) - e.a;
  }
  return units;
}

}  // namespace mac::validator
