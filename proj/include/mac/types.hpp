#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "mac/rng.hpp"

namespace mac {

inline constexpr int kMaxStat = 9;
// Health is tracked in half points so player attacks (+0.5) stay exact.
inline constexpr int kMaxHealthHalves = 2 * kMaxStat;

enum class BlockKind : uint8_t {
  grass,
  sand,
  water,
  tree,
  stone,
  path,
  coal_ore,
  iron_ore,
  diamond_ore,
  lava,
  crafting_table,
  furnace,
  plant_sapling,
  plant_ripe,
  placed_stone,
  darkness,
};
inline constexpr int kBlockKindCount = 16;

enum class Item : uint8_t {
  wood,
  stone,
  coal,
  iron,
  diamond,
  sapling,
  wood_pickaxe,
  stone_pickaxe,
  iron_pickaxe,
  wood_sword,
  stone_sword,
  iron_sword,
};
inline constexpr int kItemCount = 12;

enum class MobKind : uint8_t { zombie, skeleton, cow, arrow };
inline constexpr int kMobKindCount = 4;

enum class Direction : uint8_t { left, right, up, down };
inline constexpr int kDirectionCount = 4;

enum class Action : uint8_t {
  noop,
  left,
  right,
  up,
  down,
  do_,
  sleep,
  place_stone,
  place_table,
  place_furnace,
  place_plant,
  make_wood_pickaxe,
  make_stone_pickaxe,
  make_iron_pickaxe,
  make_wood_sword,
  make_stone_sword,
  make_iron_sword,
};
inline constexpr int kActionCount = 17;

enum class Achievement : uint8_t {
  collect_coal,
  collect_diamond,
  collect_drink,
  collect_iron,
  collect_sapling,
  collect_stone,
  collect_wood,
  defeat_skeleton,
  defeat_zombie,
  eat_cow,
  eat_plant,
  make_iron_pickaxe,
  make_iron_sword,
  make_stone_pickaxe,
  make_stone_sword,
  make_wood_pickaxe,
  make_wood_sword,
  place_furnace,
  place_plant,
  place_stone,
  place_table,
  wake_up,
};
inline constexpr int kAchievementCount = 22;

std::string_view name(BlockKind k);
std::string_view name(Item k);
std::string_view name(MobKind k);
std::string_view name(Direction k);
std::string_view name(Action k);
std::string_view name(Achievement k);

std::optional<Action> action_from_index(int index);
std::optional<Achievement> achievement_from_name(std::string_view s);

struct Cell {
  int row = 0;
  int col = 0;

  friend constexpr bool operator==(Cell, Cell) = default;
  constexpr Cell operator+(Cell o) const { return {row + o.row, col + o.col}; }
};

constexpr Cell offset(Direction d) {
  switch (d) {
    case Direction::left: return {0, -1};
    case Direction::right: return {0, 1};
    case Direction::up: return {-1, 0};
    case Direction::down: return {1, 0};
  }
  return {0, 0};
}

constexpr int chebyshev(Cell a, Cell b) {
  const int dr = a.row > b.row ? a.row - b.row : b.row - a.row;
  const int dc = a.col > b.col ? a.col - b.col : b.col - a.col;
  return dr > dc ? dr : dc;
}

class AchievementSet {
 public:
  constexpr AchievementSet() = default;
  constexpr explicit AchievementSet(uint32_t bits) : bits_(bits & kAll) {}

  constexpr bool contains(Achievement a) const { return (bits_ >> static_cast<int>(a)) & 1u; }
  constexpr void insert(Achievement a) { bits_ |= 1u << static_cast<int>(a); }
  constexpr int size() const { return __builtin_popcount(bits_); }
  constexpr uint32_t bits() const { return bits_; }
  friend constexpr bool operator==(AchievementSet, AchievementSet) = default;

 private:
  static constexpr uint32_t kAll = (1u << kAchievementCount) - 1u;
  uint32_t bits_ = 0;
};

inline constexpr int16_t kNoPlacer = -1;

struct PlayerState {
  Cell pos;
  Direction facing = Direction::down;
  std::array<uint8_t, kItemCount> inventory{};
  uint8_t health_halves = kMaxHealthHalves;
  uint8_t food = kMaxStat;
  uint8_t drink = kMaxStat;
  uint8_t energy = kMaxStat;
  bool alive = true;
  bool sleeping = false;
  AchievementSet achievements;
  uint16_t regen_progress = 0;

  uint8_t count(Item i) const { return inventory[static_cast<int>(i)]; }
  uint8_t& count(Item i) { return inventory[static_cast<int>(i)]; }
  double health() const { return health_halves / 2.0; }

  friend bool operator==(const PlayerState&, const PlayerState&) = default;
};

struct MobState {
  MobKind kind = MobKind::cow;
  Cell pos;
  int16_t health = 0;
  Direction facing = Direction::down;
  int16_t cooldown = 0;

  friend bool operator==(const MobState&, const MobState&) = default;
};

struct WorldState {
  int width = 0;
  int height = 0;
  std::vector<BlockKind> tiles;
  // Agent id that placed the block in each cell, kNoPlacer otherwise.
  std::vector<int16_t> placer;
  std::vector<uint16_t> plant_age;
  std::vector<PlayerState> players;
  std::vector<MobState> mobs;
  int64_t step = 0;
  double light_level = 1.0;
  Rng rng;
  bool terminated = false;

  WorldState() = default;
  WorldState(int w, int h, BlockKind fill = BlockKind::grass);

  bool in_bounds(Cell c) const { return c.row >= 0 && c.col >= 0 && c.row < height && c.col < width; }
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.row) * width + c.col; }
  Cell cell_at(std::size_t i) const { return {static_cast<int>(i / width), static_cast<int>(i % width)}; }
  BlockKind tile(Cell c) const { return in_bounds(c) ? tiles[index(c)] : BlockKind::darkness; }
  void set_tile(Cell c, BlockKind k) { tiles[index(c)] = k; }

  // Index of the alive player standing on c, or -1.
  int player_at(Cell c) const;
  // Index into mobs of the mob on c, or -1.
  int mob_at(Cell c) const;
  int mob_count(MobKind k) const;
  int alive_count() const;

  friend bool operator==(const WorldState&, const WorldState&) = default;
};

bool is_player_walkable(BlockKind k);

// Light in [0,1] on the day/night cycle; 1 is full daylight.
double daylight(int64_t step, int day_length);

}  // namespace mac
