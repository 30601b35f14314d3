#pragma once

#include <string>
#include <vector>

#include "mac/config.hpp"
#include "mac/engine.hpp"
#include "mac/worldgen.hpp"

namespace mac::fixtures {

// Nothing moves or spawns unless the fixture says so.
inline GameConfig still_config(int width, int height, int n_agents) {
  GameConfig c;
  c.map_width = width;
  c.map_height = height;
  c.n_agents = n_agents;
  c.zombie_spawn_day = 0;
  c.zombie_spawn_night = 0;
  c.skeleton_spawn = 0;
  c.cow_spawn = 0;
  c.zombie_chase_probability = 0;
  c.zombie_wander_probability = 0;
  c.skeleton_retreat_probability = 0;
  c.skeleton_shoot_probability = 0;
  c.skeleton_wander_probability = 0;
  c.cow_move_probability = 0;
  c.mob_despawn_distance = 64;
  return c;
}

inline std::string grass_map(int width, int height) {
  std::string s;
  for (int r = 0; r < height; ++r) s += std::string(width, '.') + "\n";
  return s;
}

// Puts overlay characters onto a text map.
inline std::string with_marks(std::string map, int width, std::initializer_list<std::pair<Cell, char>> marks) {
  for (auto [c, ch] : marks) map[static_cast<std::size_t>(c.row) * (width + 1) + c.col] = ch;
  return map;
}

// ---- walkthrough: one agent, every achievement ----

inline GameConfig walkthrough_config() {
  GameConfig c = still_config(20, 9, 1);
  c.sapling_probability = 1.0;
  c.plant_ripen_steps = 5;
  c.sleep_energy_interval = 1;
  c.max_episode_steps = 100;
  return c;
}

inline const char* walkthrough_map() {
  return "####################\n"
         "####################\n"
         "####################\n"
         "####################\n"
         "#TTTTTTTTT##########\n"
         "#0.................K\n"
         "#.~########dicic#CZ#\n"
         "####################\n"
         "####################\n";
}

inline std::vector<Action> walkthrough_script() {
  using A = Action;
  std::vector<A> s = {
      A::do_,          // sapling from the grass below
      A::place_plant,  // plant it
      A::up,   A::do_, // face the first tree, chop it
      A::down, A::noop, A::noop, A::noop,
      A::do_,          // eat the ripe plant
      A::right, A::down, A::do_,  // drink
      A::up,   A::do_,
  };
  for (int c = 3; c <= 9; ++c) {
    s.insert(s.end(), {A::right, A::up, A::do_});
  }
  s.insert(s.end(), {
                        A::place_table,
                        A::make_wood_pickaxe,
                        A::make_wood_sword,
                        A::down, A::do_,   // stone below
                        A::down, A::do_,   // step into the hole, stone below again
                        A::left, A::do_,
                        A::right, A::do_,
                        A::make_stone_pickaxe,
                        A::make_stone_sword,
                        A::place_furnace,  // into the cell just mined on the right
                        A::up, A::right, A::right, A::right,
                        A::down, A::do_,   // iron
                        A::right, A::down, A::do_,  // coal
                        A::right, A::down, A::do_,  // iron
                        A::right, A::down, A::do_,  // coal
                        A::left, A::left, A::left, A::left,
                        A::make_iron_pickaxe,
                        A::make_iron_sword,
                        A::down, A::do_,   // diamond
                        A::right,
                        A::place_stone, A::do_,
                        A::right, A::right, A::right, A::right, A::right,
                        A::down, A::do_,   // cow
                        A::right, A::do_,  // skeleton ahead
                        A::down, A::do_,   // zombie below
                        A::sleep, A::noop, A::noop, A::noop, A::noop, A::noop,
                    });
  return s;
}

inline WorldState walkthrough_world(uint64_t seed = 11) {
  return parse_text_map(walkthrough_map(), walkthrough_config(), seed);
}

// ---- provenance: A places a table, B crafts at it ----

inline GameConfig provenance_config() {
  GameConfig c = still_config(12, 9, 2);
  c.max_episode_steps = 10;
  return c;
}

inline WorldState provenance_world() {
  const GameConfig cfg = provenance_config();
  WorldState w = parse_text_map(with_marks(grass_map(12, 9), 12, {{{4, 4}, '0'}, {{4, 6}, '1'}}), cfg, 3);
  w.players[0].count(Item::wood) = 2;
  w.players[1].count(Item::wood) = 1;
  return w;
}

// A faces down and places the table at (5,4); B, two cells away, crafts next step.
inline std::vector<Action> provenance_script_a() { return {Action::place_table}; }
inline std::vector<Action> provenance_script_b() { return {Action::noop, Action::make_wood_pickaxe}; }

// ---- proximity: B walks into A's window for exactly 10 of 100 steps ----

inline GameConfig proximity_config() {
  GameConfig c = still_config(20, 12, 2);
  c.max_episode_steps = 100;
  return c;
}

inline WorldState proximity_world() {
  return parse_text_map(with_marks(grass_map(20, 12), 20, {{{5, 2}, '0'}, {{6, 12}, '1'}}), proximity_config(), 5);
}

inline std::vector<Action> proximity_script_b() {
  std::vector<Action> s(6, Action::left);
  s.insert(s.end(), 9, Action::noop);
  s.push_back(Action::right);
  return s;
}

// ---- two adjacent agents for scenario rewards ----

inline WorldState duel_world(const GameConfig& cfg) {
  WorldState w = parse_text_map(with_marks(grass_map(12, 9), 12, {{{4, 4}, '0'}, {{4, 5}, '1'}}), cfg, 9);
  w.players[0].facing = Direction::right;
  return w;
}

}  // namespace mac::fixtures
