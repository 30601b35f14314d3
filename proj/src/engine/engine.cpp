#include "mac/engine.hpp"

#include <algorithm>
#include <string>

#include "mac/observation.hpp"
#include "mac/worldgen.hpp"

namespace mac {

namespace {

constexpr Cell kRemoved{-1 << 20, -1 << 20};

uint8_t clamp_stat(int v) { return static_cast<uint8_t>(std::clamp(v, 0, kMaxStat)); }
uint8_t clamp_health(int v) { return static_cast<uint8_t>(std::clamp(v, 0, kMaxHealthHalves)); }

void add_item(PlayerState& p, Item i, int n) { p.count(i) = clamp_stat(p.count(i) + n); }

StepEvent make_event(EventKind kind, int agent) {
  StepEvent e;
  e.kind = kind;
  e.agent = static_cast<int16_t>(agent);
  return e;
}

void damage_player(PlayerState& p, int points) {
  p.health_halves = clamp_health(p.health_halves - 2 * points);
  // Damage interrupts sleep; waking this way does not count as waking up.
  p.sleeping = false;
}

bool is_move(Action a) { return a == Action::left || a == Action::right || a == Action::up || a == Action::down; }

Direction move_direction(Action a) {
  switch (a) {
    case Action::left: return Direction::left;
    case Action::right: return Direction::right;
    case Action::up: return Direction::up;
    default: return Direction::down;
  }
}

bool is_cell_action(Action a) {
  return a == Action::do_ || a == Action::place_stone || a == Action::place_table || a == Action::place_furnace ||
         a == Action::place_plant;
}

bool has_inputs(const PlayerState& p, const Recipe& r) {
  for (int i = 0; i < kItemCount; ++i) {
    if (p.inventory[i] < r.cost[i]) return false;
  }
  return true;
}

void debit(PlayerState& p, const Recipe& r) {
  for (int i = 0; i < kItemCount; ++i) p.inventory[i] = static_cast<uint8_t>(p.inventory[i] - r.cost[i]);
}

void emit_tool_use(const WorldState& s, int agent, Cell station, std::vector<StepEvent>& events) {
  auto e = make_event(EventKind::tool_used, agent);
  e.cell = station;
  e.other = s.placer[s.index(station)];
  e.a = static_cast<uint8_t>(s.tile(station));
  events.push_back(e);
}

void change_block(WorldState& s, int agent, Cell c, BlockKind to, std::vector<StepEvent>& events) {
  auto e = make_event(EventKind::block_changed, agent);
  e.cell = c;
  e.a = static_cast<uint8_t>(s.tile(c));
  e.b = static_cast<uint8_t>(to);
  events.push_back(e);
  const auto i = s.index(c);
  s.tiles[i] = to;
  s.placer[i] = kNoPlacer;
  s.plant_age[i] = 0;
}

void collect(int agent, Cell c, Resource r, std::vector<StepEvent>& events) {
  auto e = make_event(EventKind::resource_collected, agent);
  e.cell = c;
  e.a = static_cast<uint8_t>(r);
  events.push_back(e);
}

std::optional<Direction> toward(Cell from, Cell to) {
  const int dr = to.row - from.row;
  const int dc = to.col - from.col;
  if (dr == 0 && dc == 0) return std::nullopt;
  if (std::abs(dc) > std::abs(dr)) return dc > 0 ? Direction::right : Direction::left;
  return dr > 0 ? Direction::down : Direction::up;
}

Direction opposite(Direction d) {
  switch (d) {
    case Direction::left: return Direction::right;
    case Direction::right: return Direction::left;
    case Direction::up: return Direction::down;
    case Direction::down: return Direction::up;
  }
  return d;
}

bool mob_floor(MobKind kind, BlockKind tile) {
  switch (kind) {
    case MobKind::zombie:
    case MobKind::cow: return tile == BlockKind::grass || tile == BlockKind::sand || tile == BlockKind::path;
    case MobKind::skeleton: return tile == BlockKind::path;
    case MobKind::arrow:
      return tile == BlockKind::grass || tile == BlockKind::sand || tile == BlockKind::path ||
             tile == BlockKind::water || tile == BlockKind::lava;
  }
  return false;
}

bool mob_can_enter(const WorldState& s, MobKind kind, Cell c) {
  return s.in_bounds(c) && mob_floor(kind, s.tile(c)) && s.mob_at(c) < 0 && s.player_at(c) < 0;
}

void try_move_mob(WorldState& s, MobState& m, Direction d) {
  const Cell target = m.pos + offset(d);
  if (mob_can_enter(s, m.kind, target)) m.pos = target;
}

int nearest_distance(const WorldState& s, Cell pos) {
  const auto p = nearest_living_player(s, pos);
  return p ? chebyshev(pos, s.players[*p].pos) : -1;
}

void update_zombie(const GameConfig& cfg, WorldState& s, MobState& m, Rng& rng) {
  const auto target = nearest_living_player(s, m.pos);
  if (!target) return;
  PlayerState& p = s.players[*target];
  if (chebyshev(m.pos, p.pos) <= cfg.zombie_chase_distance && rng.bernoulli(cfg.zombie_chase_probability)) {
    if (auto d = toward(m.pos, p.pos)) try_move_mob(s, m, *d);
  } else if (rng.bernoulli(cfg.zombie_wander_probability)) {
    try_move_mob(s, m, static_cast<Direction>(rng.uniform_int(kDirectionCount)));
  }
  if (chebyshev(m.pos, p.pos) <= 1) {
    if (m.cooldown > 0) {
      --m.cooldown;
    } else {
      damage_player(p, p.sleeping ? cfg.zombie_sleep_damage : cfg.zombie_damage);
      m.cooldown = static_cast<int16_t>(cfg.zombie_cooldown);
    }
  }
}

void update_skeleton(const GameConfig& cfg, WorldState& s, MobState& m, Rng& rng) {
  if (m.cooldown > 0) --m.cooldown;
  const auto target = nearest_living_player(s, m.pos);
  if (!target) return;
  PlayerState& p = s.players[*target];
  const int dist = chebyshev(m.pos, p.pos);
  if (dist <= 3 && rng.bernoulli(cfg.skeleton_retreat_probability)) {
    if (auto d = toward(m.pos, p.pos)) try_move_mob(s, m, opposite(*d));
  } else if (m.cooldown == 0 && dist <= cfg.skeleton_shoot_distance && rng.bernoulli(cfg.skeleton_shoot_probability)) {
    const auto d = toward(m.pos, p.pos);
    if (!d) return;
    m.facing = *d;
    const Cell c = m.pos + offset(*d);
    if (c == p.pos) {
      damage_player(p, cfg.arrow_damage);
    } else if (s.mob_count(MobKind::arrow) < cfg.arrow_cap && mob_can_enter(s, MobKind::arrow, c)) {
      MobState arrow = make_mob(cfg, MobKind::arrow, c);
      arrow.facing = *d;
      s.mobs.push_back(arrow);
    }
    m.cooldown = static_cast<int16_t>(cfg.skeleton_reload);
  } else if (rng.bernoulli(cfg.skeleton_wander_probability)) {
    try_move_mob(s, m, static_cast<Direction>(rng.uniform_int(kDirectionCount)));
  }
}

// Returns false when the arrow is spent.
bool update_arrow(const GameConfig& cfg, WorldState& s, MobState& m) {
  const Cell next = m.pos + offset(m.facing);
  const int hit = s.player_at(next);
  if (hit >= 0) {
    damage_player(s.players[hit], cfg.arrow_damage);
    return false;
  }
  if (!mob_can_enter(s, MobKind::arrow, next)) return false;
  m.pos = next;
  return true;
}

void spawn_mobs(const GameConfig& cfg, WorldState& s, Rng& rng) {
  struct Rule {
    MobKind kind;
    int cap;
    double probability;
    BlockKind floor;
  };
  const double zombie_p = cfg.zombie_spawn_day + (cfg.zombie_spawn_night - cfg.zombie_spawn_day) * (1.0 - s.light_level);
  const Rule rules[] = {
      {MobKind::zombie, cfg.zombie_cap, zombie_p, BlockKind::grass},
      {MobKind::skeleton, cfg.skeleton_cap, cfg.skeleton_spawn, BlockKind::path},
      {MobKind::cow, cfg.cow_cap, cfg.cow_spawn, BlockKind::grass},
  };
  const auto cells = static_cast<uint32_t>(s.tiles.size());
  for (const auto& rule : rules) {
    if (s.mob_count(rule.kind) >= rule.cap || !rng.bernoulli(rule.probability)) continue;
    const Cell c = s.cell_at(rng.uniform_int(cells));
    if (s.tile(c) != rule.floor || s.mob_at(c) >= 0 || s.player_at(c) >= 0) continue;
    const int d = nearest_distance(s, c);
    if (d < cfg.mob_spawn_min_distance || d > cfg.mob_despawn_distance) continue;
    s.mobs.push_back(make_mob(cfg, rule.kind, c));
  }
}

}  // namespace

std::optional<int> nearest_living_player(const WorldState& s, Cell pos) {
  std::optional<int> best;
  int best_distance = 0;
  for (std::size_t i = 0; i < s.players.size(); ++i) {
    const auto& p = s.players[i];
    if (!p.alive) continue;
    const int d = chebyshev(pos, p.pos);
    if (!best || d < best_distance) {
      best = static_cast<int>(i);
      best_distance = d;
    }
  }
  return best;
}

std::vector<uint8_t> resolve_cell_conflicts(std::span<const Intent> intents, const Rng& rng, int width) {
  std::vector<uint8_t> wins(intents.size(), 1);
  std::vector<std::size_t> group;
  std::vector<uint8_t> seen(intents.size(), 0);
  for (std::size_t i = 0; i < intents.size(); ++i) {
    if (seen[i]) continue;
    group.clear();
    for (std::size_t j = i; j < intents.size(); ++j) {
      if (!seen[j] && intents[j].target == intents[i].target) {
        group.push_back(j);
        seen[j] = 1;
      }
    }
    if (group.size() < 2) continue;
    std::sort(group.begin(), group.end(), [&](auto a, auto b) { return intents[a].agent < intents[b].agent; });
    const Cell c = intents[i].target;
    const auto key = static_cast<uint64_t>(static_cast<int64_t>(c.row) * width + c.col);
    Rng cell_rng = rng.substream(key);
    const auto winner = cell_rng.uniform_int(static_cast<uint32_t>(group.size()));
    for (std::size_t k = 0; k < group.size(); ++k) wins[group[k]] = k == winner;
  }
  return wins;
}

void apply_do(const GameConfig& cfg, WorldState& s, int agent, Rng& rng, std::vector<StepEvent>& events) {
  PlayerState& p = s.players[agent];
  const Cell target = p.pos + offset(p.facing);
  if (!s.in_bounds(target)) return;

  const int victim = s.player_at(target);
  if (victim >= 0) {
    if (!cfg.attack_enabled) return;
    PlayerState& v = s.players[victim];
    v.health_halves = clamp_health(v.health_halves - 2);
    v.sleeping = false;
    p.health_halves = clamp_health(p.health_halves + 1);
    auto e = make_event(EventKind::attack, agent);
    e.other = static_cast<int16_t>(victim);
    e.cell = target;
    e.amount = 2;
    events.push_back(e);
    return;
  }

  const int mob_index = s.mob_at(target);
  if (mob_index >= 0) {
    MobState& m = s.mobs[mob_index];
    if (m.kind == MobKind::arrow) return;
    m.health = static_cast<int16_t>(m.health - melee_damage(p));
    if (m.health > 0) return;
    auto e = make_event(EventKind::mob_killed, agent);
    e.cell = target;
    e.a = static_cast<uint8_t>(m.kind);
    events.push_back(e);
    if (m.kind == MobKind::cow) p.food = clamp_stat(p.food + 6);
    s.mobs.erase(s.mobs.begin() + mob_index);
    return;
  }

  const BlockKind block = s.tile(target);
  switch (block) {
    case BlockKind::grass:
      if (rng.bernoulli(cfg.sapling_probability)) {
        add_item(p, Item::sapling, 1);
        collect(agent, target, Resource::sapling, events);
      }
      break;
    case BlockKind::tree:
      add_item(p, Item::wood, 1);
      collect(agent, target, Resource::wood, events);
      if (cfg.consume_trees) change_block(s, agent, target, BlockKind::grass, events);
      break;
    case BlockKind::water:
      p.drink = clamp_stat(p.drink + 1);
      collect(agent, target, Resource::drink, events);
      break;
    case BlockKind::plant_ripe:
      p.food = clamp_stat(p.food + 4);
      collect(agent, target, Resource::fruit, events);
      {
        const int16_t placer = s.placer[s.index(target)];
        change_block(s, agent, target, BlockKind::plant_sapling, events);
        s.placer[s.index(target)] = placer;
      }
      break;
    case BlockKind::stone:
    case BlockKind::placed_stone:
    case BlockKind::coal_ore:
    case BlockKind::iron_ore:
    case BlockKind::diamond_ore: {
      const auto tool = required_pickaxe(block);
      if (tool && p.count(*tool) == 0) break;
      Resource r = Resource::stone;
      Item item = Item::stone;
      if (block == BlockKind::coal_ore) {
        r = Resource::coal;
        item = Item::coal;
      } else if (block == BlockKind::iron_ore) {
        r = Resource::iron;
        item = Item::iron;
      } else if (block == BlockKind::diamond_ore) {
        r = Resource::diamond;
        item = Item::diamond;
      }
      add_item(p, item, 1);
      collect(agent, target, r, events);
      change_block(s, agent, target, BlockKind::path, events);
      break;
    }
    default: break;
  }
}

void apply_place(const GameConfig& cfg, WorldState& s, int agent, Action kind, std::vector<StepEvent>& events) {
  const Recipe* recipe = recipe_for(kind);
  if (recipe == nullptr || !recipe->placed) return;
  PlayerState& p = s.players[agent];
  const Cell target = p.pos + offset(p.facing);
  if (!s.in_bounds(target) || !can_place_on(*recipe->placed, s.tile(target))) return;
  if (s.player_at(target) >= 0 || s.mob_at(target) >= 0) return;
  if (!has_inputs(p, *recipe)) return;
  std::optional<Cell> table;
  if (recipe->needs_table) {
    table = nearest_station(s, p.pos, BlockKind::crafting_table, cfg.station_radius);
    if (!table) return;
  }
  debit(p, *recipe);
  if (table) emit_tool_use(s, agent, *table, events);
  change_block(s, agent, target, *recipe->placed, events);
  s.placer[s.index(target)] = static_cast<int16_t>(agent);
}

void apply_craft(const GameConfig& cfg, WorldState& s, int agent, const Recipe& recipe,
                 std::vector<StepEvent>& events) {
  if (!recipe.product) return;
  PlayerState& p = s.players[agent];
  if (!has_inputs(p, recipe) || p.count(*recipe.product) >= kMaxStat) return;
  std::optional<Cell> table;
  std::optional<Cell> furnace;
  if (recipe.needs_table) {
    table = nearest_station(s, p.pos, BlockKind::crafting_table, cfg.station_radius);
    if (!table) return;
  }
  if (recipe.needs_furnace) {
    furnace = nearest_station(s, p.pos, BlockKind::furnace, cfg.station_radius);
    if (!furnace) return;
  }
  debit(p, recipe);
  add_item(p, *recipe.product, 1);
  if (table) emit_tool_use(s, agent, *table, events);
  if (furnace) emit_tool_use(s, agent, *furnace, events);
  auto e = make_event(EventKind::item_crafted, agent);
  e.a = static_cast<uint8_t>(*recipe.product);
  events.push_back(e);
}

void apply_sleep(WorldState& s, int agent) {
  PlayerState& p = s.players[agent];
  if (p.energy < kMaxStat) p.sleeping = true;
}

void update_mobs(const GameConfig& cfg, WorldState& s, Rng& rng, std::vector<StepEvent>& /*events*/) {
  const std::size_t existing = s.mobs.size();
  for (std::size_t i = 0; i < existing; ++i) {
    MobState m = s.mobs[i];
    // Vacate while moving so the mob does not block itself.
    s.mobs[i].pos = kRemoved;
    bool keep = true;
    switch (m.kind) {
      case MobKind::zombie: update_zombie(cfg, s, m, rng); break;
      case MobKind::skeleton: update_skeleton(cfg, s, m, rng); break;
      case MobKind::cow:
        if (nearest_living_player(s, m.pos) && rng.bernoulli(cfg.cow_move_probability)) {
          try_move_mob(s, m, static_cast<Direction>(rng.uniform_int(kDirectionCount)));
        }
        break;
      case MobKind::arrow: keep = update_arrow(cfg, s, m); break;
    }
    s.mobs[i] = keep ? m : MobState{m.kind, kRemoved, 0, m.facing, 0};
  }

  if (s.alive_count() > 0) {
    for (auto& m : s.mobs) {
      if (m.pos == kRemoved || m.kind == MobKind::arrow) continue;
      if (nearest_distance(s, m.pos) > cfg.mob_despawn_distance) m.pos = kRemoved;
    }
  }
  std::erase_if(s.mobs, [](const MobState& m) { return m.pos == kRemoved; });

  if (s.alive_count() > 0) spawn_mobs(cfg, s, rng);
}

void update_survival(const GameConfig& cfg, WorldState& s, std::vector<StepEvent>& events) {
  s.light_level = daylight(s.step, cfg.day_length);
  const bool decay_tick = s.step % cfg.intrinsic_decay_interval == 0;
  const bool sleep_tick = s.step % cfg.sleep_energy_interval == 0;
  for (std::size_t i = 0; i < s.players.size(); ++i) {
    PlayerState& p = s.players[i];
    if (!p.alive) continue;
    if (s.tile(p.pos) == BlockKind::lava) {
      p.health_halves = 0;
      continue;
    }
    if (decay_tick) {
      p.food = clamp_stat(p.food - 1);
      p.drink = clamp_stat(p.drink - 1);
      if (!p.sleeping) p.energy = clamp_stat(p.energy - 1);
      if (p.food == 0 || p.drink == 0 || p.energy == 0) p.health_halves = clamp_health(p.health_halves - 2);
    }
    if (p.sleeping && sleep_tick) p.energy = clamp_stat(p.energy + 1);
    if (p.food > 0 && p.drink > 0 && p.energy > 0) {
      if (++p.regen_progress >= cfg.health_regen_interval) {
        p.health_halves = clamp_health(p.health_halves + 2);
        p.regen_progress = 0;
      }
    } else {
      p.regen_progress = 0;
    }
    if (p.sleeping && p.energy >= kMaxStat && s.light_level > cfg.wake_light_threshold) {
      p.sleeping = false;
      events.push_back(make_event(EventKind::woke_up, static_cast<int>(i)));
    }
  }
  for (std::size_t i = 0; i < s.tiles.size(); ++i) {
    if (s.tiles[i] != BlockKind::plant_sapling) continue;
    if (++s.plant_age[i] >= cfg.plant_ripen_steps) s.tiles[i] = BlockKind::plant_ripe;
  }
}

bool apply_deaths(const GameConfig& cfg, WorldState& s, std::vector<StepEvent>& events) {
  for (std::size_t i = 0; i < s.players.size(); ++i) {
    PlayerState& p = s.players[i];
    if (!p.alive || p.health_halves > 0) continue;
    p.alive = false;
    auto e = make_event(EventKind::death, static_cast<int>(i));
    e.cell = p.pos;
    events.push_back(e);
  }
  const bool horizon = s.step >= cfg.max_episode_steps;
  const bool all_dead = s.alive_count() == 0;
  return horizon || (!cfg.fixed_timestep_mode && all_dead);
}

std::optional<Achievement> achievement_for(const StepEvent& e) {
  switch (e.kind) {
    case EventKind::resource_collected:
      switch (static_cast<Resource>(e.a)) {
        case Resource::wood: return Achievement::collect_wood;
        case Resource::stone: return Achievement::collect_stone;
        case Resource::coal: return Achievement::collect_coal;
        case Resource::iron: return Achievement::collect_iron;
        case Resource::diamond: return Achievement::collect_diamond;
        case Resource::sapling: return Achievement::collect_sapling;
        case Resource::drink: return Achievement::collect_drink;
        case Resource::fruit: return Achievement::eat_plant;
      }
      return std::nullopt;
    case EventKind::mob_killed:
      switch (static_cast<MobKind>(e.a)) {
        case MobKind::zombie: return Achievement::defeat_zombie;
        case MobKind::skeleton: return Achievement::defeat_skeleton;
        case MobKind::cow: return Achievement::eat_cow;
        case MobKind::arrow: return std::nullopt;
      }
      return std::nullopt;
    case EventKind::item_crafted:
      switch (static_cast<Item>(e.a)) {
        case Item::wood_pickaxe: return Achievement::make_wood_pickaxe;
        case Item::stone_pickaxe: return Achievement::make_stone_pickaxe;
        case Item::iron_pickaxe: return Achievement::make_iron_pickaxe;
        case Item::wood_sword: return Achievement::make_wood_sword;
        case Item::stone_sword: return Achievement::make_stone_sword;
        case Item::iron_sword: return Achievement::make_iron_sword;
        default: return std::nullopt;
      }
    case EventKind::block_changed:
      if (e.agent < 0) return std::nullopt;
      switch (static_cast<BlockKind>(e.b)) {
        case BlockKind::crafting_table: return Achievement::place_table;
        case BlockKind::furnace: return Achievement::place_furnace;
        case BlockKind::placed_stone: return Achievement::place_stone;
        case BlockKind::plant_sapling:
          // Eating fruit also turns the plant back into a sapling.
          if (static_cast<BlockKind>(e.a) == BlockKind::grass) return Achievement::place_plant;
          return std::nullopt;
        default: return std::nullopt;
      }
    case EventKind::woke_up: return Achievement::wake_up;
    default: return std::nullopt;
  }
}

int unlock_achievements(WorldState& s, std::vector<StepEvent>& events) {
  int unlocked = 0;
  const std::size_t n = events.size();
  for (std::size_t i = 0; i < n; ++i) {
    const StepEvent e = events[i];
    const auto a = achievement_for(e);
    if (!a || e.agent < 0) continue;
    PlayerState& p = s.players[e.agent];
    if (p.achievements.contains(*a)) continue;
    p.achievements.insert(*a);
    auto u = make_event(EventKind::achievement_unlocked, e.agent);
    u.a = static_cast<uint8_t>(*a);
    events.push_back(u);
    ++unlocked;
  }
  return unlocked;
}

void compute_rewards(const GameConfig& cfg, std::span<const uint8_t> prev_health_halves, const WorldState& next,
                     std::span<const StepEvent> events, std::vector<double>& rewards) {
  const std::size_t n = next.players.size();
  // Rewards are accumulated in twentieths so every base term is an integer:
  // an achievement is 20, one half point of health is 1 (0.1 * 0.5).
  std::array<int64_t, 64> units{};
  for (std::size_t i = 0; i < n; ++i) {
    units[i] = static_cast<int64_t>(next.players[i].health_halves) - prev_health_halves[i];
  }
  for (const auto& e : events) {
    if (e.kind == EventKind::achievement_unlocked) {
      units[e.agent] += 20;
    } else if (e.kind == EventKind::attack && cfg.reward_scenario.kind == RewardKind::attack) {
      units[e.agent] += 20;
      units[e.other] -= 10;
    }
  }
  rewards.assign(n, 0.0);
  switch (cfg.reward_scenario.kind) {
    case RewardKind::independent:
    case RewardKind::attack:
      for (std::size_t i = 0; i < n; ++i) rewards[i] = static_cast<double>(units[i]) / 20.0;
      break;
    case RewardKind::shared: {
      int64_t total = 0;
      for (std::size_t i = 0; i < n; ++i) total += units[i];
      for (std::size_t i = 0; i < n; ++i) rewards[i] = static_cast<double>(total) / 20.0;
      break;
    }
    case RewardKind::proximity:
      for (std::size_t i = 0; i < n; ++i) {
        rewards[i] = static_cast<double>(units[i]) / 20.0;
        if (next.players[i].alive) {
          rewards[i] += cfg.reward_scenario.beta * count_visible_players(cfg, next, static_cast<int>(i));
        }
      }
      break;
  }
}

void step(const GameConfig& cfg, WorldState& s, std::span<const Action> actions, StepResult& out) {
  const std::size_t n = s.players.size();
  if (s.terminated) throw StepError("cannot step a terminated episode");
  if (actions.size() != n) {
    throw StepError("expected " + std::to_string(n) + " actions, got " + std::to_string(actions.size()));
  }
  out.events.clear();
  out.rewards.clear();
  out.done.clear();
  auto& events = out.events;

  std::array<uint8_t, 64> prev_health{};
  std::array<Action, 64> act{};
  for (std::size_t i = 0; i < n; ++i) {
    prev_health[i] = s.players[i].health_halves;
    const auto& p = s.players[i];
    act[i] = (p.alive && !p.sleeping) ? actions[i] : Action::noop;
  }

  const Rng step_rng = s.rng.substream(static_cast<uint64_t>(s.step + 1));
  s.step += 1;
  s.light_level = daylight(s.step, cfg.day_length);

  // Movement: valid moves contend for their target cell.
  std::vector<Intent> moves;
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_move(act[i])) continue;
    PlayerState& p = s.players[i];
    p.facing = move_direction(act[i]);
    const Cell target = p.pos + offset(p.facing);
    if (!s.in_bounds(target) || !is_player_walkable(s.tile(target))) continue;
    if (s.player_at(target) >= 0 || s.mob_at(target) >= 0) continue;
    moves.push_back({static_cast<int>(i), target, act[i]});
  }
  if (!moves.empty()) {
    const auto wins = resolve_cell_conflicts(moves, step_rng.substream(static_cast<uint64_t>(Stream::move_conflict)), s.width);
    for (std::size_t k = 0; k < moves.size(); ++k) {
      if (wins[k]) s.players[moves[k].agent].pos = moves[k].target;
    }
  }

  // DO and PLACE contend for the faced cell.
  std::vector<Intent> cell_actions;
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_cell_action(act[i])) continue;
    const auto& p = s.players[i];
    cell_actions.push_back({static_cast<int>(i), p.pos + offset(p.facing), act[i]});
  }
  if (!cell_actions.empty()) {
    const auto wins =
        resolve_cell_conflicts(cell_actions, step_rng.substream(static_cast<uint64_t>(Stream::cell_conflict)), s.width);
    for (std::size_t k = 0; k < cell_actions.size(); ++k) {
      if (!wins[k]) act[cell_actions[k].agent] = Action::noop;
    }
  }

  Rng do_rng = step_rng.substream(static_cast<uint64_t>(Stream::do_effects));
  for (std::size_t i = 0; i < n; ++i) {
    const int agent = static_cast<int>(i);
    const Action a = act[i];
    if (a == Action::do_) {
      Rng agent_rng = do_rng.substream(i);
      apply_do(cfg, s, agent, agent_rng, events);
    } else if (a == Action::sleep) {
      apply_sleep(s, agent);
    } else if (const Recipe* r = recipe_for(a)) {
      if (r->placed) {
        apply_place(cfg, s, agent, a, events);
      } else {
        apply_craft(cfg, s, agent, *r, events);
      }
    }
  }

  Rng mob_rng = step_rng.substream(static_cast<uint64_t>(Stream::mobs));
  update_mobs(cfg, s, mob_rng, events);
  update_survival(cfg, s, events);
  const bool over = apply_deaths(cfg, s, events);
  unlock_achievements(s, events);
  for (std::size_t i = 0; i < n; ++i) {
    const uint8_t h = s.players[i].health_halves;
    if (h == prev_health[i]) continue;
    auto e = make_event(EventKind::health_changed, static_cast<int>(i));
    e.a = prev_health[i];
    e.b = h;
    events.push_back(e);
  }
  compute_rewards(cfg, std::span(prev_health.data(), n), s, events, out.rewards);
  s.terminated = over;
  out.episode_over = over;
  out.done.assign(n, over ? 1 : 0);
}

StepResult step(const GameConfig& cfg, WorldState& s, std::span<const Action> actions) {
  StepResult r;
  step(cfg, s, actions, r);
  return r;
}

Env::Env(GameConfig cfg, WorldState initial) : cfg_(validate_config(std::move(cfg))), state_(std::move(initial)) {
  if (static_cast<int>(state_.players.size()) != cfg_.n_agents) {
    throw StepError("state has " + std::to_string(state_.players.size()) + " players, config expects " +
                    std::to_string(cfg_.n_agents));
  }
}

Env Env::generate(GameConfig cfg, uint64_t seed) {
  cfg = validate_config(std::move(cfg));
  WorldState w = generate_world(cfg, seed);
  return Env(std::move(cfg), std::move(w));
}

const StepResult& Env::step(std::span<const Action> actions) {
  mac::step(cfg_, state_, actions, result_);
  return result_;
}

}  // namespace mac
