#include "mac/types.hpp"

#include <cmath>
#include <numbers>

namespace mac {

namespace {

constexpr std::array<std::string_view, kBlockKindCount> kBlockNames = {
    "grass",          "sand",      "water",         "tree",       "stone",        "path",
    "coal_ore",       "iron_ore",  "diamond_ore",   "lava",       "crafting_table", "furnace",
    "plant_sapling",  "plant_ripe", "placed_stone", "darkness"};

constexpr std::array<std::string_view, kItemCount> kItemNames = {
    "wood",         "stone",         "coal",         "iron",       "diamond",     "sapling",
    "wood_pickaxe", "stone_pickaxe", "iron_pickaxe", "wood_sword", "stone_sword", "iron_sword"};

constexpr std::array<std::string_view, kMobKindCount> kMobNames = {"zombie", "skeleton", "cow", "arrow"};

constexpr std::array<std::string_view, kDirectionCount> kDirectionNames = {"left", "right", "up", "down"};

constexpr std::array<std::string_view, kActionCount> kActionNames = {
    "NOOP",           "LEFT",
    "RIGHT",          "UP",
    "DOWN",           "DO",
    "SLEEP",          "PLACE_STONE",
    "PLACE_TABLE",    "PLACE_FURNACE",
    "PLACE_PLANT",    "MAKE_WOOD_PICKAXE",
    "MAKE_STONE_PICKAXE", "MAKE_IRON_PICKAXE",
    "MAKE_WOOD_SWORD", "MAKE_STONE_SWORD",
    "MAKE_IRON_SWORD"};

constexpr std::array<std::string_view, kAchievementCount> kAchievementNames = {
    "collect_coal",      "collect_diamond",    "collect_drink",    "collect_iron",
    "collect_sapling",   "collect_stone",      "collect_wood",     "defeat_skeleton",
    "defeat_zombie",     "eat_cow",            "eat_plant",        "make_iron_pickaxe",
    "make_iron_sword",   "make_stone_pickaxe", "make_stone_sword", "make_wood_pickaxe",
    "make_wood_sword",   "place_furnace",      "place_plant",      "place_stone",
    "place_table",       "wake_up"};

}  // namespace

std::string_view name(BlockKind k) { return kBlockNames[static_cast<int>(k)]; }
std::string_view name(Item k) { return kItemNames[static_cast<int>(k)]; }
std::string_view name(MobKind k) { return kMobNames[static_cast<int>(k)]; }
std::string_view name(Direction k) { return kDirectionNames[static_cast<int>(k)]; }
std::string_view name(Action k) { return kActionNames[static_cast<int>(k)]; }
std::string_view name(Achievement k) { return kAchievementNames[static_cast<int>(k)]; }

std::optional<Action> action_from_index(int index) {
  if (index < 0 || index >= kActionCount) return std::nullopt;
  return static_cast<Action>(index);
}

std::optional<Achievement> achievement_from_name(std::string_view s) {
  for (int i = 0; i < kAchievementCount; ++i) {
    if (kAchievementNames[i] == s) return static_cast<Achievement>(i);
  }
  return std::nullopt;
}

WorldState::WorldState(int w, int h, BlockKind fill)
    : width(w),
      height(h),
      tiles(static_cast<std::size_t>(w) * h, fill),
      placer(static_cast<std::size_t>(w) * h, kNoPlacer),
      plant_age(static_cast<std::size_t>(w) * h, 0) {}

int WorldState::player_at(Cell c) const {
  for (std::size_t i = 0; i < players.size(); ++i) {
    if (players[i].alive && players[i].pos == c) return static_cast<int>(i);
  }
  return -1;
}

int WorldState::mob_at(Cell c) const {
  for (std::size_t i = 0; i < mobs.size(); ++i) {
    if (mobs[i].pos == c) return static_cast<int>(i);
  }
  return -1;
}

int WorldState::mob_count(MobKind k) const {
  int n = 0;
  for (const auto& m : mobs) n += m.kind == k;
  return n;
}

int WorldState::alive_count() const {
  int n = 0;
  for (const auto& p : players) n += p.alive;
  return n;
}

bool is_player_walkable(BlockKind k) {
  return k == BlockKind::grass || k == BlockKind::sand || k == BlockKind::path || k == BlockKind::lava;
}

double daylight(int64_t step, int day_length) {
  const double progress = std::fmod(static_cast<double>(step) / day_length, 1.0) + 0.3;
  const double c = std::abs(std::cos(std::numbers::pi * progress));
  return 1.0 - c * c * c;
}

}  // namespace mac
