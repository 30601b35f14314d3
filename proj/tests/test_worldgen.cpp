#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <deque>
#include <set>

#include "fixtures.hpp"
#include "mac/worldgen.hpp"

using namespace mac;

namespace {

int count_blocks(const WorldState& w, BlockKind k) {
  int n = 0;
  for (auto t : w.tiles) n += t == k;
  return n;
}

// Independent reachability oracle: a plain BFS over cells a player could
// eventually walk or mine through with every tool, starting from a spawn.
bool reaches(const WorldState& w, Cell from, BlockKind target) {
  auto passable = [](BlockKind k) {
    return k != BlockKind::water && k != BlockKind::lava && k != BlockKind::darkness;
  };
  std::vector<uint8_t> seen(w.tiles.size(), 0);
  std::deque<Cell> q{from};
  seen[w.index(from)] = 1;
  while (!q.empty()) {
    const Cell c = q.front();
    q.pop_front();
    for (auto d : {Direction::left, Direction::right, Direction::up, Direction::down}) {
      const Cell n = c + offset(d);
      if (!w.in_bounds(n) || seen[w.index(n)]) continue;
      seen[w.index(n)] = 1;
      if (w.tile(n) == target) return true;
      if (passable(w.tile(n))) q.push_back(n);
    }
  }
  return false;
}

}  // namespace

TEST_CASE("generation is deterministic") {
  const GameConfig cfg;
  const WorldState a = generate_world(cfg, 7);
  const WorldState b = generate_world(cfg, 7);
  CHECK(a == b);
  CHECK(dump_text_map(a, true) == dump_text_map(b, true));
  CHECK(generate_world(cfg, 8).tiles != a.tiles);
}

TEST_CASE("100 default maps each hold diamonds and reachable resources") {
  const GameConfig cfg;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    const WorldState w = generate_world(cfg, seed);
    REQUIRE(count_blocks(w, BlockKind::diamond_ore) >= 1);
    REQUIRE(w.players.size() == 4);
    std::set<std::pair<int, int>> cells;
    for (const auto& p : w.players) {
      REQUIRE(is_player_walkable(w.tile(p.pos)));
      REQUIRE(w.tile(p.pos) != BlockKind::lava);
      cells.insert({p.pos.row, p.pos.col});
    }
    REQUIRE(cells.size() == 4);
    for (const auto& p : w.players) {
      for (auto k : {BlockKind::tree, BlockKind::water, BlockKind::stone, BlockKind::coal_ore, BlockKind::iron_ore,
                     BlockKind::diamond_ore}) {
        REQUIRE(reaches(w, p.pos, k));
      }
    }
    CHECK(unreachable_resources(w, std::vector<Cell>{w.players[0].pos}).empty());
  }
}

TEST_CASE("no trees means wood is unobtainable") {
  GameConfig cfg;
  cfg.terrain.tree_density = 0.0;
  CHECK_THROWS_AS(generate_world(cfg, 1), GenerationError);
}

TEST_CASE("initial mobs respect caps and occupancy") {
  const GameConfig cfg;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const WorldState w = generate_world(cfg, seed);
    CHECK(w.mob_count(MobKind::zombie) <= cfg.zombie_cap);
    CHECK(w.mob_count(MobKind::cow) <= cfg.cow_cap);
    std::set<std::pair<int, int>> taken;
    for (const auto& p : w.players) taken.insert({p.pos.row, p.pos.col});
    for (const auto& m : w.mobs) CHECK(taken.insert({m.pos.row, m.pos.col}).second);
  }
}

TEST_CASE("seed salt changes the world") {
  GameConfig salted;
  salted.seed_salt = 99;
  CHECK(world_seed(GameConfig{}, 4) == 4);
  CHECK(world_seed(salted, 4) != 4);
  CHECK(generate_world(salted, 4).tiles != generate_world(GameConfig{}, 4).tiles);
}

TEST_CASE("choose_spawns") {
  const WorldState w = generate_world(GameConfig{}, 3);
  Rng rng = Rng::from_seed(1);

  const auto one = choose_spawns(w, 1, rng, 3, 8);
  REQUIRE(one.size() == 1);
  CHECK(is_player_walkable(w.tile(one[0])));

  for (uint64_t seed = 0; seed < 100; ++seed) {
    Rng r = Rng::from_seed(seed);
    const auto four = choose_spawns(w, 4, r, 3, 8);
    REQUIRE(four.size() == 4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i + 1; j < 4; ++j) REQUIRE_FALSE(four[i] == four[j]);
  }

  // A minimum distance beyond the map diagonal falls back to dispersion.
  Rng r = Rng::from_seed(5);
  const auto spread = choose_spawns(w, 4, r, 1000, 8);
  REQUIRE(spread.size() == 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) CHECK_FALSE(spread[i] == spread[j]);
}

TEST_CASE("text map round trip") {
  const WorldState w = generate_world(GameConfig{}, 12);
  const std::string text = dump_text_map(w, true);
  GameConfig cfg;
  const WorldState back = parse_text_map(text, cfg, 12);
  REQUIRE(back.players.size() == w.players.size());
  for (std::size_t i = 0; i < w.players.size(); ++i) CHECK(back.players[i].pos == w.players[i].pos);
  CHECK(dump_text_map(back, true) == text);
  // Without overlay the tiles under players and mobs survive too.
  CHECK(parse_text_map(dump_text_map(w), cfg).tiles == w.tiles);
}

TEST_CASE("text map errors") {
  const GameConfig cfg;
  CHECK_THROWS_AS(parse_text_map("", cfg), GenerationError);
  CHECK_THROWS_AS(parse_text_map("...\n..\n", cfg), GenerationError);
  CHECK_THROWS_AS(parse_text_map("..x\n...\n", cfg), GenerationError);
}

TEST_CASE("walkthrough fixture parses") {
  const WorldState w = fixtures::walkthrough_world();
  CHECK(w.width == 20);
  CHECK(w.height == 9);
  REQUIRE(w.players.size() == 1);
  CHECK(w.players[0].pos == Cell{5, 1});
  CHECK(w.mobs.size() == 3);
  CHECK(w.tile({6, 11}) == BlockKind::diamond_ore);
}
