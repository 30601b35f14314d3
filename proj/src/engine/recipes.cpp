#include <algorithm>
#include <array>

#include "mac/engine.hpp"

namespace mac {

namespace {

constexpr std::array<uint8_t, kItemCount> cost(std::initializer_list<std::pair<Item, uint8_t>> items) {
  std::array<uint8_t, kItemCount> c{};
  for (auto [item, n] : items) c[static_cast<int>(item)] = n;
  return c;
}

const std::array<Recipe, 10> kRecipes = {{
    {Action::place_stone, cost({{Item::stone, 1}}), false, false, std::nullopt, BlockKind::placed_stone,
     Achievement::place_stone},
    {Action::place_table, cost({{Item::wood, 2}}), false, false, std::nullopt, BlockKind::crafting_table,
     Achievement::place_table},
    {Action::place_furnace, cost({{Item::stone, 1}}), true, false, std::nullopt, BlockKind::furnace,
     Achievement::place_furnace},
    {Action::place_plant, cost({{Item::sapling, 1}}), false, false, std::nullopt, BlockKind::plant_sapling,
     Achievement::place_plant},
    {Action::make_wood_pickaxe, cost({{Item::wood, 1}}), true, false, Item::wood_pickaxe, std::nullopt,
     Achievement::make_wood_pickaxe},
    {Action::make_stone_pickaxe, cost({{Item::wood, 1}, {Item::stone, 1}}), true, false, Item::stone_pickaxe,
     std::nullopt, Achievement::make_stone_pickaxe},
    {Action::make_iron_pickaxe, cost({{Item::wood, 1}, {Item::coal, 1}, {Item::iron, 1}}), true, true,
     Item::iron_pickaxe, std::nullopt, Achievement::make_iron_pickaxe},
    {Action::make_wood_sword, cost({{Item::wood, 1}}), true, false, Item::wood_sword, std::nullopt,
     Achievement::make_wood_sword},
    {Action::make_stone_sword, cost({{Item::wood, 1}, {Item::stone, 1}}), true, false, Item::stone_sword,
     std::nullopt, Achievement::make_stone_sword},
    {Action::make_iron_sword, cost({{Item::wood, 1}, {Item::coal, 1}, {Item::iron, 1}}), true, true,
     Item::iron_sword, std::nullopt, Achievement::make_iron_sword},
}};

}  // namespace

std::span<const Recipe> recipes() { return kRecipes; }

const Recipe* recipe_for(Action a) {
  for (const auto& r : kRecipes) {
    if (r.action == a) return &r;
  }
  return nullptr;
}

bool can_place_on(BlockKind placed, BlockKind target) {
  switch (placed) {
    case BlockKind::placed_stone:
      return target == BlockKind::grass || target == BlockKind::sand || target == BlockKind::path ||
             target == BlockKind::water || target == BlockKind::lava;
    case BlockKind::crafting_table:
    case BlockKind::furnace:
      return target == BlockKind::grass || target == BlockKind::sand || target == BlockKind::path;
    case BlockKind::plant_sapling: return target == BlockKind::grass;
    default: return false;
  }
}

std::optional<Item> required_pickaxe(BlockKind k) {
  switch (k) {
    case BlockKind::stone:
    case BlockKind::placed_stone:
    case BlockKind::coal_ore: return Item::wood_pickaxe;
    case BlockKind::iron_ore: return Item::stone_pickaxe;
    case BlockKind::diamond_ore: return Item::iron_pickaxe;
    default: return std::nullopt;
  }
}

int melee_damage(const PlayerState& p) {
  int damage = 1;
  if (p.count(Item::wood_sword) > 0) damage = std::max(damage, 2);
  if (p.count(Item::stone_sword) > 0) damage = std::max(damage, 3);
  if (p.count(Item::iron_sword) > 0) damage = std::max(damage, 5);
  return damage;
}

std::optional<Cell> nearest_station(const WorldState& s, Cell pos, BlockKind station, int radius) {
  std::optional<Cell> best;
  int best_distance = 0;
  int16_t best_placer = 0;
  for (int r = pos.row - radius; r <= pos.row + radius; ++r) {
    for (int c = pos.col - radius; c <= pos.col + radius; ++c) {
      const Cell cell{r, c};
      if (!s.in_bounds(cell) || s.tile(cell) != station) continue;
      const int d = chebyshev(pos, cell);
      const int16_t placer = s.placer[s.index(cell)];
      if (!best || d < best_distance || (d == best_distance && placer < best_placer)) {
        best = cell;
        best_distance = d;
        best_placer = placer;
      }
    }
  }
  return best;
}

}  // namespace mac
