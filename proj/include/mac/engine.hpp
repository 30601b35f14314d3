#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mac/config.hpp"
#include "mac/types.hpp"

namespace mac {

enum class EventKind : uint8_t {
  achievement_unlocked,  // agent, a = Achievement
  attack,                // agent = attacker, other = victim, amount = damage in half points
  tool_used,             // agent, cell = station, other = placer, a = station BlockKind
  block_changed,         // agent, cell, a = from BlockKind, b = to BlockKind
  mob_killed,            // agent, cell, a = MobKind
  death,                 // agent, cell
  resource_collected,    // agent, cell, a = Resource
  item_crafted,          // agent, a = Item
  woke_up,               // agent
  health_changed,        // agent, a = old half points, b = new half points
};
inline constexpr int kEventKindCount = 10;

enum class Resource : uint8_t { wood, stone, coal, iron, diamond, sapling, drink, fruit };

struct StepEvent {
  EventKind kind = EventKind::death;
  int16_t agent = -1;
  int16_t other = -1;
  Cell cell{-1, -1};
  uint8_t a = 0;
  uint8_t b = 0;
  int16_t amount = 0;

  friend bool operator==(const StepEvent&, const StepEvent&) = default;
};

struct StepResult {
  std::vector<double> rewards;
  // One flag per agent; all flags equal the episode-termination flag.
  std::vector<uint8_t> done;
  std::vector<StepEvent> events;
  bool episode_over = false;
};

class StepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Intent {
  int agent = 0;
  Cell target;
  Action action = Action::noop;
};

struct Recipe {
  Action action = Action::noop;
  std::array<uint8_t, kItemCount> cost{};
  bool needs_table = false;
  bool needs_furnace = false;
  std::optional<Item> product;
  std::optional<BlockKind> placed;
  Achievement achievement = Achievement::collect_wood;
};

// Every craft and placement rule; the single place costs are pinned.
std::span<const Recipe> recipes();
const Recipe* recipe_for(Action a);
// Whether a recipe's placed block may go onto a target tile.
bool can_place_on(BlockKind placed, BlockKind target);
// Pickaxe needed to mine a block, or nullopt for blocks that need none.
std::optional<Item> required_pickaxe(BlockKind k);
// Melee damage from the best sword held.
int melee_damage(const PlayerState& p);

// Closest station of kind within radius (Chebyshev); ties go to the lowest
// placer id, then row-major order.
std::optional<Cell> nearest_station(const WorldState& s, Cell pos, BlockKind station, int radius);

// Full joint step. Throws StepError for a wrong action count or a
// terminated episode. out is cleared and refilled.
void step(const GameConfig& cfg, WorldState& s, std::span<const Action> actions, StepResult& out);
StepResult step(const GameConfig& cfg, WorldState& s, std::span<const Action> actions);

// For each intent, whether it wins its target cell. Contenders for a cell
// are ordered by agent id and one is drawn from rng.substream(cell index).
std::vector<uint8_t> resolve_cell_conflicts(std::span<const Intent> intents, const Rng& rng, int width);

void apply_do(const GameConfig& cfg, WorldState& s, int agent, Rng& rng, std::vector<StepEvent>& events);
void apply_place(const GameConfig& cfg, WorldState& s, int agent, Action kind, std::vector<StepEvent>& events);
void apply_craft(const GameConfig& cfg, WorldState& s, int agent, const Recipe& recipe,
                 std::vector<StepEvent>& events);
void apply_sleep(WorldState& s, int agent);

std::optional<int> nearest_living_player(const WorldState& s, Cell pos);

void update_mobs(const GameConfig& cfg, WorldState& s, Rng& rng, std::vector<StepEvent>& events);
void update_survival(const GameConfig& cfg, WorldState& s, std::vector<StepEvent>& events);
// Marks players at zero health dead; returns whether the episode is over.
bool apply_deaths(const GameConfig& cfg, WorldState& s, std::vector<StepEvent>& events);
// Appends achievement_unlocked events for first occurrences; returns how many.
int unlock_achievements(WorldState& s, std::vector<StepEvent>& events);
void compute_rewards(const GameConfig& cfg, std::span<const uint8_t> prev_health_halves, const WorldState& next,
                     std::span<const StepEvent> events, std::vector<double>& rewards);

// Achievement implied by an event, if any.
std::optional<Achievement> achievement_for(const StepEvent& e);

// Convenience owner of a config and a state.
class Env {
 public:
  Env(GameConfig cfg, WorldState initial);
  static Env generate(GameConfig cfg, uint64_t seed);

  const StepResult& step(std::span<const Action> actions);
  const WorldState& state() const { return state_; }
  WorldState& mutable_state() { return state_; }
  const GameConfig& config() const { return cfg_; }

 private:
  GameConfig cfg_;
  WorldState state_;
  StepResult result_;
};

}  // namespace mac
