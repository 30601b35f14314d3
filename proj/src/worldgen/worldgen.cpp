#include "mac/worldgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "noise.hpp"

namespace mac {

namespace {

constexpr std::array<char, kBlockKindCount> kBlockChars = {'.', ':', '~', 'T', '#', '_', 'c', 'i',
                                                           'd', 'L', 't', 'f', 'p', 'P', 'S', '?'};

bool spawnable(BlockKind k) { return k == BlockKind::grass || k == BlockKind::sand || k == BlockKind::path; }

void fill_terrain(WorldState& w, const GameConfig& cfg, Rng& rng) {
  const auto& tp = cfg.terrain;
  const detail::GradientNoise noise(rng.next_u64());
  const double cx = (w.width - 1) / 2.0;
  const double cy = (w.height - 1) / 2.0;
  const double water_size = 1.0 / tp.water_frequency;
  const double mountain_size = 1.0 / tp.mountain_frequency;

  for (int y = 0; y < w.height; ++y) {
    for (int x = 0; x < w.width; ++x) {
      double start = tp.clearing_radius - std::hypot(x - cx, y - cy);
      start += 2 * noise.octaves(x, y, 8, {{3, 1}});
      start = 1 / (1 + std::exp(-start));
      double water = noise.octaves(x, y, 3, {{water_size, 1}, {5, 0.15}}, false) + 0.1;
      water -= 2 * start;
      double mountain = noise.octaves(x, y, 0, {{mountain_size, 1}, {5, 0.3}});
      mountain -= 4 * start;

      BlockKind k = BlockKind::grass;
      const double u_coal = rng.uniform();
      const double u_iron = rng.uniform();
      const double u_rare = rng.uniform();
      if (start > 0.5) {
        k = BlockKind::grass;
      } else if (mountain > tp.mountain_threshold) {
        if (noise.octaves(x, y, 6, {{7, 1}}) > 0.15 && mountain > tp.cave_threshold) {
          k = BlockKind::path;
        } else if (noise.octaves(2 * x, y / 5.0, 7, {{3, 1}}) > tp.tunnel_threshold) {
          k = BlockKind::path;
        } else if (noise.octaves(x / 5.0, 2 * y, 7, {{3, 1}}) > tp.tunnel_threshold) {
          k = BlockKind::path;
        } else if (noise.octaves(x, y, 1, {{8, 1}}) > 0 && u_coal < tp.coal_density) {
          k = BlockKind::coal_ore;
        } else if (noise.octaves(x, y, 2, {{6, 1}}) > 0.25 && u_iron < tp.iron_density) {
          k = BlockKind::iron_ore;
        } else if (mountain > tp.mountain_threshold + 0.03 && u_rare < tp.diamond_density) {
          k = BlockKind::diamond_ore;
        } else if (mountain > tp.cave_threshold && noise.octaves(x, y, 6, {{5, 1}}) > 1 - 2 * tp.lava_density) {
          k = BlockKind::lava;
        } else {
          k = BlockKind::stone;
        }
      } else if (water > 0.25 && water < 0.35 && noise.octaves(x, y, 4, {{9, 1}}) > -0.2) {
        k = BlockKind::sand;
      } else if (water > 0.3) {
        k = BlockKind::water;
      } else if (noise.octaves(x, y, 5, {{7, 1}}) > 0 && u_rare < tp.tree_density) {
        k = BlockKind::tree;
      }
      w.set_tile({y, x}, k);
    }
  }
}

void place_initial_mobs(WorldState& w, const GameConfig& cfg, std::span<const Cell> spawns, Rng& rng) {
  auto min_spawn_distance = [&](Cell c) {
    int best = std::numeric_limits<int>::max();
    for (auto s : spawns) best = std::min(best, chebyshev(c, s));
    return best;
  };
  for (int y = 0; y < w.height; ++y) {
    for (int x = 0; x < w.width; ++x) {
      const Cell c{y, x};
      const BlockKind k = w.tile(c);
      const double u = rng.uniform();
      if (std::find(spawns.begin(), spawns.end(), c) != spawns.end()) continue;
      const int d = min_spawn_distance(c);
      if (k == BlockKind::grass && d > 3 && u < 0.015 && w.mob_count(MobKind::cow) < cfg.cow_cap) {
        w.mobs.push_back(make_mob(cfg, MobKind::cow, c));
      } else if (k == BlockKind::grass && d > 10 && u > 0.993 && w.mob_count(MobKind::zombie) < cfg.zombie_cap) {
        w.mobs.push_back(make_mob(cfg, MobKind::zombie, c));
      } else if (k == BlockKind::path && d > cfg.mob_spawn_min_distance && u < 0.05 &&
                 w.mob_count(MobKind::skeleton) < cfg.skeleton_cap) {
        w.mobs.push_back(make_mob(cfg, MobKind::skeleton, c));
      }
    }
  }
}

}  // namespace

uint64_t world_seed(const GameConfig& cfg, uint64_t episode_seed) {
  return cfg.seed_salt == 0 ? episode_seed : Rng::mix(episode_seed ^ Rng::mix(cfg.seed_salt));
}

PlayerState make_player(Cell pos) {
  PlayerState p;
  p.pos = pos;
  return p;
}

MobState make_mob(const GameConfig& cfg, MobKind kind, Cell pos) {
  MobState m;
  m.kind = kind;
  m.pos = pos;
  switch (kind) {
    case MobKind::zombie: m.health = static_cast<int16_t>(cfg.zombie_health); break;
    case MobKind::skeleton: m.health = static_cast<int16_t>(cfg.skeleton_health); break;
    case MobKind::cow: m.health = static_cast<int16_t>(cfg.cow_health); break;
    case MobKind::arrow: m.health = 1; break;
  }
  return m;
}

std::vector<Cell> choose_spawns(const WorldState& world, int n_agents, Rng& rng, int min_distance, int radius) {
  const Cell center{(world.height - 1) / 2, (world.width - 1) / 2};
  std::vector<Cell> near;
  std::vector<Cell> all;
  for (std::size_t i = 0; i < world.tiles.size(); ++i) {
    const Cell c = world.cell_at(i);
    if (!spawnable(world.tiles[i]) || world.mob_at(c) >= 0) continue;
    all.push_back(c);
    if (chebyshev(c, center) <= radius) near.push_back(c);
  }
  if (static_cast<int>(all.size()) < n_agents) throw GenerationError("no-walkable-cells: too few walkable cells for spawns");
  std::vector<Cell> candidates = static_cast<int>(near.size()) >= n_agents ? near : all;
  for (std::size_t i = candidates.size(); i > 1; --i) {
    std::swap(candidates[i - 1], candidates[rng.uniform_int(static_cast<uint32_t>(i))]);
  }

  auto spread = [](const std::vector<Cell>& chosen, Cell c) {
    int best = std::numeric_limits<int>::max();
    for (auto s : chosen) best = std::min(best, chebyshev(c, s));
    return best;
  };

  std::vector<Cell> chosen;
  for (auto c : candidates) {
    if (static_cast<int>(chosen.size()) == n_agents) break;
    if (spread(chosen, c) >= min_distance) chosen.push_back(c);
  }
  if (static_cast<int>(chosen.size()) == n_agents) return chosen;

  // Fallback: farthest-point placement.
  chosen.assign(1, candidates.front());
  while (static_cast<int>(chosen.size()) < n_agents) {
    Cell best_cell = candidates.front();
    int best = -1;
    for (auto c : candidates) {
      const int d = spread(chosen, c);
      if (d > best) {
        best = d;
        best_cell = c;
      }
    }
    chosen.push_back(best_cell);
  }
  return chosen;
}

std::vector<std::string> unreachable_resources(const WorldState& w, std::span<const Cell> spawns) {
  auto flood = [&](Cell from, auto passable) {
    std::vector<uint8_t> seen(w.tiles.size(), 0);
    std::deque<Cell> queue{from};
    seen[w.index(from)] = 1;
    while (!queue.empty()) {
      const Cell c = queue.front();
      queue.pop_front();
      for (int d = 0; d < kDirectionCount; ++d) {
        const Cell n = c + offset(static_cast<Direction>(d));
        if (!w.in_bounds(n) || seen[w.index(n)] || !passable(w.tile(n))) continue;
        seen[w.index(n)] = 1;
        queue.push_back(n);
      }
    }
    return seen;
  };
  auto touches = [&](const std::vector<uint8_t>& region, BlockKind kind) {
    for (std::size_t i = 0; i < w.tiles.size(); ++i) {
      if (w.tiles[i] != kind) continue;
      const Cell c = w.cell_at(i);
      if (region[i]) return true;
      for (int d = 0; d < kDirectionCount; ++d) {
        const Cell n = c + offset(static_cast<Direction>(d));
        if (w.in_bounds(n) && region[w.index(n)]) return true;
      }
    }
    return false;
  };
  auto walkable = [](BlockKind k) { return spawnable(k); };
  // Mining turns stone and ores into path, so with tools they open up.
  auto with_tools = [](BlockKind k) {
    switch (k) {
      case BlockKind::grass:
      case BlockKind::sand:
      case BlockKind::path:
      case BlockKind::tree:
      case BlockKind::stone:
      case BlockKind::placed_stone:
      case BlockKind::coal_ore:
      case BlockKind::iron_ore:
      case BlockKind::diamond_ore: return true;
      default: return false;
    }
  };

  std::vector<std::string> missing;
  auto note = [&](const std::string& s) {
    if (std::find(missing.begin(), missing.end(), s) == missing.end()) missing.push_back(s);
  };
  for (auto s : spawns) {
    const auto bare = flood(s, walkable);
    if (!touches(bare, BlockKind::tree)) note("wood");
    const auto full = flood(s, with_tools);
    if (!touches(full, BlockKind::water)) note("water");
    if (!touches(full, BlockKind::stone)) note("stone");
    if (!touches(full, BlockKind::coal_ore)) note("coal");
    if (!touches(full, BlockKind::iron_ore)) note("iron");
    if (!touches(full, BlockKind::diamond_ore)) note("diamond");
    bool grass = false;
    for (std::size_t i = 0; i < w.tiles.size() && !grass; ++i) grass = full[i] && w.tiles[i] == BlockKind::grass;
    if (!grass) note("grass");
  }
  return missing;
}

WorldState generate_world(const GameConfig& cfg, uint64_t seed) {
  const Rng root = Rng::from_seed(world_seed(cfg, seed));
  std::string last_missing;
  for (int attempt = 0; attempt < kMaxGenerationAttempts; ++attempt) {
    Rng rng = root.substream(static_cast<uint64_t>(Stream::worldgen)).substream(attempt);
    WorldState w(cfg.map_width, cfg.map_height);
    fill_terrain(w, cfg, rng);
    Rng spawn_rng = rng.substream(static_cast<uint64_t>(Stream::spawns));
    const auto spawns = choose_spawns(w, cfg.n_agents, spawn_rng, cfg.min_spawn_distance, cfg.spawn_radius);
    const auto missing = unreachable_resources(w, spawns);
    if (!missing.empty()) {
      last_missing.clear();
      for (const auto& m : missing) last_missing += (last_missing.empty() ? "" : ", ") + m;
      continue;
    }
    place_initial_mobs(w, cfg, spawns, rng);
    for (auto s : spawns) w.players.push_back(make_player(s));
    w.rng = root.substream(attempt);
    w.light_level = daylight(0, cfg.day_length);
    return w;
  }
  throw GenerationError("generation-retry-exhausted: unreachable resources after " +
                        std::to_string(kMaxGenerationAttempts) + " attempts (" + last_missing + ")");
}

char block_char(BlockKind k) { return kBlockChars[static_cast<int>(k)]; }

std::string dump_text_map(const WorldState& w, bool overlay) {
  std::string out;
  out.reserve(static_cast<std::size_t>(w.width + 1) * w.height);
  for (int r = 0; r < w.height; ++r) {
    for (int c = 0; c < w.width; ++c) {
      char ch = block_char(w.tile({r, c}));
      if (overlay) {
        const int m = w.mob_at({r, c});
        if (m >= 0) ch = "ZKC*"[static_cast<int>(w.mobs[m].kind)];
        const int p = w.player_at({r, c});
        if (p >= 0 && p < 10) ch = static_cast<char>('0' + p);
      }
      out.push_back(ch);
    }
    out.push_back('\n');
  }
  return out;
}

WorldState parse_text_map(std::string_view text, const GameConfig& cfg, uint64_t seed) {
  std::vector<std::string_view> rows;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    if (!line.empty()) rows.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  if (rows.empty()) throw GenerationError("empty text map");
  const int height = static_cast<int>(rows.size());
  const int width = static_cast<int>(rows.front().size());
  WorldState w(width, height);
  std::array<std::optional<Cell>, 10> players;
  for (int r = 0; r < height; ++r) {
    if (static_cast<int>(rows[r].size()) != width) throw GenerationError("ragged text map at row " + std::to_string(r));
    for (int c = 0; c < width; ++c) {
      const char ch = rows[r][c];
      const auto it = std::find(kBlockChars.begin(), kBlockChars.end(), ch);
      if (it != kBlockChars.end()) {
        w.set_tile({r, c}, static_cast<BlockKind>(it - kBlockChars.begin()));
      } else if (ch >= '0' && ch <= '9') {
        players[ch - '0'] = Cell{r, c};
      } else if (ch == 'Z' || ch == 'K' || ch == 'C') {
        const MobKind kind = ch == 'Z' ? MobKind::zombie : ch == 'K' ? MobKind::skeleton : MobKind::cow;
        w.mobs.push_back(make_mob(cfg, kind, {r, c}));
      } else {
        throw GenerationError(std::string("unknown map character '") + ch + "'");
      }
    }
  }
  for (const auto& p : players) {
    if (!p) break;
    w.players.push_back(make_player(*p));
  }
  w.rng = Rng::from_seed(seed);
  w.light_level = daylight(0, cfg.day_length);
  return w;
}

}  // namespace mac
