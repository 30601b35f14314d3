#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fixtures.hpp"
#include "mac/engine.hpp"
#include "mac/observation.hpp"

using namespace mac;
using fixtures::grass_map;
using fixtures::still_config;
using fixtures::with_marks;

namespace {

WorldState two_players(const GameConfig& cfg, Cell a, Cell b) {
  return parse_text_map(with_marks(grass_map(cfg.map_width, cfg.map_height), cfg.map_width, {{a, '0'}, {b, '1'}}),
                        cfg);
}

bool all_zero(std::span<const float> xs) {
  for (float x : xs)
    if (x != 0.0f) return false;
  return true;
}

std::span<const float> other_block(const ObsManifest& m, const std::vector<float>& obs, int observer, int target) {
  return std::span<const float>(obs).subspan(m.other_block_offset(other_slot(observer, target)), m.other_block_size);
}

// Random reachable states: random play from generated worlds.
std::vector<WorldState> random_states(const GameConfig& cfg, int count, uint64_t seed) {
  std::vector<WorldState> out;
  Rng rng = Rng::from_seed(seed);
  uint64_t world = seed * 1000;
  while (static_cast<int>(out.size()) < count) {
    WorldState s = generate_world(cfg, world++);
    std::vector<Action> a(cfg.n_agents);
    while (!s.terminated && static_cast<int>(out.size()) < count) {
      for (auto& x : a) x = static_cast<Action>(rng.uniform_int(kActionCount));
      step(cfg, s, a);
      if (rng.uniform() < 0.1) out.push_back(s);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("visibility geometry") {
  const GameConfig cfg = still_config(20, 20, 2);
  CHECK(is_visible(cfg, two_players(cfg, {10, 10}, {10, 11}), 0, 1));
  CHECK(is_visible(cfg, two_players(cfg, {10, 10}, {13, 14}), 0, 1));
  CHECK_FALSE(is_visible(cfg, two_players(cfg, {10, 10}, {14, 14}), 0, 1));
  CHECK_FALSE(is_visible(cfg, two_players(cfg, {10, 10}, {10, 15}), 0, 1));
  CHECK(is_visible(cfg, two_players(cfg, {10, 10}, {7, 6}), 0, 1));
}

TEST_CASE("first_k rule hides the target from step k") {
  GameConfig cfg = still_config(20, 20, 2);
  cfg.expert_schedule = {VisibilityRule::always(), VisibilityRule::first_k(50)};
  WorldState s = two_players(cfg, {10, 10}, {10, 11});
  s.step = 49;
  CHECK(is_visible(cfg, s, 0, 1));
  s.step = 50;
  CHECK_FALSE(is_visible(cfg, s, 0, 1));
  s.step = 51;
  CHECK_FALSE(is_visible(cfg, s, 0, 1));
  CHECK(is_visible(cfg, s, 1, 0));
}

TEST_CASE("dead targets are invisible") {
  const GameConfig cfg = still_config(20, 20, 2);
  WorldState s = two_players(cfg, {10, 10}, {10, 11});
  s.players[1].alive = false;
  CHECK_FALSE(is_visible(cfg, s, 0, 1));
  const auto obs = encode_symbolic(cfg, s, 0);
  CHECK(all_zero(other_block(obs_manifest(cfg), obs, 0, 1)));
}

TEST_CASE("manifest length for the default config") {
  const GameConfig cfg;
  const ObsManifest m = obs_manifest(cfg);
  CHECK(m.grid_size == 63);
  CHECK(m.other_block_size == 63 + 12 + 4 + 4);
  CHECK(m.total == 21 * 63 + 12 + 4 + 4 + 1 + 1 + 1 + 3 * (63 + 12 + 4 + 4));
  CHECK(m.total == 1595);
  CHECK(m.version == std::string(kManifestVersion));
  const auto j = m.to_json();
  CHECK(j["total"] == 1595);
  CHECK(j["channels"].size() == kMapChannels);
  CHECK(j["channels"][20] == "other_player");
}

TEST_CASE("one agent has no other-player blocks") {
  GameConfig cfg;
  cfg.n_agents = 1;
  const ObsManifest m = obs_manifest(cfg);
  CHECK(m.total == m.others_offset);
  CHECK(m.total == 21 * 63 + 23);
}

TEST_CASE("encoding length, one-hot cells and value range over 1000 states") {
  GameConfig cfg;
  const ObsManifest m = obs_manifest(cfg);
  const auto states = random_states(cfg, 1000, 3);
  for (const auto& s : states) {
    for (int i = 0; i < cfg.n_agents; ++i) {
      const auto obs = encode_symbolic(cfg, s, i);
      REQUIRE(obs.size() == m.total);
      for (std::size_t cell = 0; cell < m.grid_size; ++cell) {
        float ones = 0;
        for (int k = 0; k < kBlockKindCount; ++k) ones += obs[m.channel_offset(k) + cell];
        REQUIRE(ones == 1.0f);
      }
      for (float x : obs) {
        REQUIRE(x >= 0.0f);
        REQUIRE(x <= 1.0f);
      }
    }
  }
}

TEST_CASE("visibility symmetry and zero leak over random states") {
  GameConfig cfg;
  const ObsManifest m = obs_manifest(cfg);
  for (const auto& s : random_states(cfg, 300, 8)) {
    for (int a = 0; a < cfg.n_agents; ++a) {
      const auto obs = encode_symbolic(cfg, s, a);
      for (int b = 0; b < cfg.n_agents; ++b) {
        if (a == b) continue;
        if (s.players[a].alive && s.players[b].alive) REQUIRE(is_visible(cfg, s, a, b) == is_visible(cfg, s, b, a));
        const auto block = other_block(m, obs, a, b);
        if (!is_visible(cfg, s, a, b)) {
          REQUIRE(all_zero(block));
        } else {
          float ones = 0;
          for (std::size_t i = 0; i < m.grid_size; ++i) ones += block[m.other_position_offset + i];
          REQUIRE(ones == 1.0f);
        }
      }
    }
  }
}

TEST_CASE("inventory scaling") {
  const GameConfig cfg = still_config(20, 20, 2);
  WorldState s = two_players(cfg, {10, 10}, {2, 2});
  s.players[0].count(Item::wood) = 9;
  s.players[0].count(Item::stone) = 3;
  const ObsManifest m = obs_manifest(cfg);
  const auto obs = encode_symbolic(cfg, s, 0);
  CHECK(obs[m.inventory_offset + static_cast<int>(Item::wood)] == doctest::Approx(0.9));
  CHECK(obs[m.inventory_offset + static_cast<int>(Item::stone)] == doctest::Approx(0.3));
  CHECK(obs[m.intrinsics_offset] == doctest::Approx(0.9));
  CHECK(obs[m.direction_offset + static_cast<int>(Direction::down)] == 1.0f);
  CHECK(obs[m.alive_offset] == 1.0f);
}

TEST_CASE("an adjacent player shows as a single 1 in its position map") {
  const GameConfig cfg = still_config(20, 20, 2);
  WorldState s = two_players(cfg, {10, 10}, {10, 11});
  s.players[1].count(Item::wood) = 4;
  const ObsManifest m = obs_manifest(cfg);
  const auto obs = encode_symbolic(cfg, s, 0);
  const auto block = other_block(m, obs, 0, 1);
  int ones = 0;
  std::size_t where = 0;
  for (std::size_t i = 0; i < m.grid_size; ++i) {
    if (block[m.other_position_offset + i] == 1.0f) {
      ++ones;
      where = i;
    }
  }
  CHECK(ones == 1);
  CHECK(where == 3 * 9 + 5);
  CHECK(block[m.other_inventory_offset + static_cast<int>(Item::wood)] == doctest::Approx(0.4));
  CHECK(obs[m.channel_offset(kBlockKindCount + kMobKindCount) + 3 * 9 + 5] == 1.0f);
}

TEST_CASE("cells beyond the map edge read as darkness") {
  const GameConfig cfg = still_config(20, 20, 1);
  const WorldState s = parse_text_map(with_marks(grass_map(20, 20), 20, {{{0, 0}, '0'}}), cfg);
  const ObsManifest m = obs_manifest(cfg);
  const auto obs = encode_symbolic(cfg, s, 0);
  CHECK(obs[m.channel_offset(static_cast<int>(BlockKind::darkness)) + 0] == 1.0f);
  CHECK(obs[m.channel_offset(static_cast<int>(BlockKind::grass)) + 3 * 9 + 4] == 1.0f);
}

TEST_CASE("mobs appear in their channels") {
  const GameConfig cfg = still_config(20, 20, 1);
  const WorldState s = parse_text_map(with_marks(grass_map(20, 20), 20, {{{10, 10}, '0'}, {{9, 12}, 'C'}}), cfg);
  const ObsManifest m = obs_manifest(cfg);
  const auto obs = encode_symbolic(cfg, s, 0);
  CHECK(obs[m.channel_offset(kBlockKindCount + static_cast<int>(MobKind::cow)) + 2 * 9 + 6] == 1.0f);
}

TEST_CASE("render_frame") {
  GameConfig cfg;
  const WorldState s = generate_world(cfg, 1);
  const Image a = render_frame(s, 4);
  const Image b = render_frame(s, 4);
  CHECK(a == b);
  CHECK(a.width == cfg.map_width * 4);
  CHECK(a.height == cfg.map_height * 4);
  CHECK(a.rgb.size() == static_cast<std::size_t>(a.width) * a.height * 3);

  // A dead player renders exactly like the same map without that player.
  const GameConfig small = still_config(12, 9, 2);
  WorldState dead = two_players(small, {4, 4}, {4, 7});
  const Image alive_frame = render_frame(dead, 4);
  dead.players[1].alive = false;
  WorldState gone = dead;
  gone.players.pop_back();
  CHECK(render_frame(dead, 4) == render_frame(gone, 4));
  CHECK_FALSE(render_frame(dead, 4) == alive_frame);
}

TEST_CASE("render_view has window dimensions") {
  GameConfig cfg;
  const WorldState s = generate_world(cfg, 1);
  const Image v = render_view(cfg, s, 0, 5);
  CHECK(v.width == cfg.view_cols * 5);
  CHECK(v.height == cfg.view_rows * 5);
}

TEST_CASE("gif and ppm writers") {
  GameConfig cfg = still_config(12, 9, 1);
  const WorldState s = parse_text_map(with_marks(grass_map(12, 9), 12, {{{4, 4}, '0'}}), cfg);
  const auto dir = std::filesystem::temp_directory_path() / "mac_obs_test";
  std::filesystem::create_directories(dir);
  const Image frame = render_frame(s, 2);
  write_ppm(dir / "f.ppm", frame);
  CHECK(std::filesystem::file_size(dir / "f.ppm") > static_cast<uintmax_t>(frame.rgb.size()));

  std::vector<Image> frames(5, frame);
  write_gif(dir / "a.gif", frames);
  std::ifstream in(dir / "a.gif", std::ios::binary);
  std::string head(6, '\0');
  in.read(head.data(), 6);
  CHECK(head == "GIF89a");
  in.seekg(-1, std::ios::end);
  CHECK(in.get() == 0x3b);

  GifWriter w(dir / "b.gif", frame.width, frame.height);
  w.add(frame);
  w.add(frame);
  CHECK(w.frames() == 2);
  CHECK_THROWS(w.add(render_frame(s, 3)));
  w.finish();
  CHECK_THROWS(w.add(frame));
  std::filesystem::remove_all(dir);
}
