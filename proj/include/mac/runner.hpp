#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mac/config.hpp"
#include "mac/digest.hpp"
#include "mac/engine.hpp"
#include "mac/observation.hpp"
#include "mac/types.hpp"

namespace mac {

// ---- policies ----

struct Transition {
  std::span<const float> obs;
  int action = 0;
  double reward = 0.0;
  bool done = false;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  // Called at the start of every episode.
  virtual void reset(const GameConfig& /*cfg*/, int /*agent*/) {}
  // Any int may come back; values outside [0, 17) are treated as NOOP and counted.
  virtual int act(std::span<const float> obs, Rng& rng) = 0;
  // Trainable policies receive on_transition; frozen ones never do.
  virtual bool trainable() const { return false; }
  virtual void on_transition(const Transition& /*t*/) {}
};

class RandomPolicy : public Policy {
 public:
  std::string name() const override { return "random"; }
  int act(std::span<const float> obs, Rng& rng) override;
};

class NoopPolicy : public Policy {
 public:
  std::string name() const override { return "noop"; }
  int act(std::span<const float>, Rng&) override { return 0; }
};

// Replays a fixed action list, then NOOPs.
class ScriptedPolicy : public Policy {
 public:
  explicit ScriptedPolicy(std::vector<Action> script) : script_(std::move(script)) {}
  std::string name() const override { return "scripted"; }
  void reset(const GameConfig&, int) override { next_ = 0; }
  int act(std::span<const float>, Rng&) override;

 private:
  std::vector<Action> script_;
  std::size_t next_ = 0;
};

// Hand-coded heuristic working only from its own symbolic observation:
// flees adjacent hostiles, drinks, eats cows, sleeps when tired, chops wood.
class SurvivorPolicy : public Policy {
 public:
  std::string name() const override { return "survivor"; }
  void reset(const GameConfig& cfg, int agent) override;
  int act(std::span<const float> obs, Rng& rng) override;

 private:
  ObsManifest manifest_;
  int view_rows_ = 7;
  int view_cols_ = 9;
};

using PolicyFactory = std::function<std::unique_ptr<Policy>(int agent)>;

// "random", "noop" or "survivor"; throws std::invalid_argument otherwise.
std::unique_ptr<Policy> make_policy(const std::string& name);
PolicyFactory policy_factory(const std::string& name);
// Per-slot names: slot 0 uses names[0] and so on; a single name applies to all.
PolicyFactory policy_factory(const std::vector<std::string>& names);

// ---- scenarios ----

enum class ScenarioKind : uint8_t { solo, full_expert, half_expert };

// Slot learner is the observer being evaluated; every other slot is an expert
// whose visibility to others the scenario controls. Experts always act in the
// world; solo only hides them.
struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::full_expert;
  int64_t half_k = 50;
  RewardScenario reward;
  bool fixed_timestep = false;
  // Overrides max_episode_steps when set.
  std::optional<int64_t> horizon;
  int learner = 0;

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

std::string_view name(ScenarioKind k);
std::optional<ScenarioKind> scenario_kind_from_name(std::string_view s);
nlohmann::json scenario_to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const nlohmann::json& j);

// Expert slots for n agents under spec (every slot except the learner).
std::vector<int> expert_slots(const ScenarioSpec& spec, int n_agents);
// cfg with the scenario's visibility schedule, reward and horizon applied, validated.
GameConfig apply_scenario(GameConfig cfg, const ScenarioSpec& spec);

// ---- trajectory logs ----

inline constexpr const char* kLogFormatVersion = "1.1";

struct StepRecord {
  std::vector<uint8_t> actions;
  std::vector<double> rewards;
  std::vector<StepEvent> events;
  // Absent in format 1.0.
  std::optional<StateDigest> digest;
  bool done = false;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct LogHeader {
  std::string format_version = kLogFormatVersion;
  nlohmann::json config;
  StateDigest config_digest;
  uint64_t seed = 0;
  int n_agents = 0;
  std::string manifest_version = kManifestVersion;
  nlohmann::json scenario;
  std::vector<int> expert_slots;
  // Serialized initial state for episodes not produced by generate_world.
  std::optional<std::vector<uint8_t>> initial_state;
  // Filled by read_log when an older format was migrated.
  std::vector<std::string> notes;

  friend bool operator==(const LogHeader&, const LogHeader&) = default;
};

struct TrajectoryLog {
  LogHeader header;
  std::vector<StepRecord> steps;
  std::vector<AchievementSet> final_achievements;
  int64_t invalid_actions = 0;
  // Not serialized: learning callbacks delivered per slot during the run.
  std::vector<int64_t> learning_callbacks;

  std::size_t step_count() const { return steps.size(); }
  bool operator==(const TrajectoryLog& o) const {
    return header == o.header && steps == o.steps && final_achievements == o.final_achievements &&
           invalid_actions == o.invalid_actions;
  }
};

class LogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

StateDigest config_digest(const GameConfig& cfg);

std::vector<uint8_t> encode_log(const TrajectoryLog& log);
TrajectoryLog decode_log(std::span<const uint8_t> bytes);
void write_log(const TrajectoryLog& log, const std::filesystem::path& path);
TrajectoryLog read_log(const std::filesystem::path& path);

// Config recorded in a log header.
GameConfig log_config(const LogHeader& h);
// Initial state of a logged episode: the embedded one, or regenerated from the seed.
WorldState log_initial_state(const LogHeader& h);

// ---- episodes ----

struct RunOptions {
  // Per-step records; when false only the final achievements are kept.
  bool record_steps = true;
  bool record_digests = true;
  bool embed_initial_state = false;
  // Called after every step with the post-step state.
  std::function<void(const WorldState&, const StepResult&)> on_step;
};

// Runs one episode from generate_world(cfg, seed).
TrajectoryLog run_episode(const GameConfig& cfg, const ScenarioSpec& scenario, std::span<Policy* const> policies,
                          uint64_t seed, const RunOptions& options = {});
// Runs one episode from a given initial state; the state is embedded in the log.
TrajectoryLog run_episode_from(const GameConfig& cfg, const ScenarioSpec& scenario, WorldState initial,
                               std::span<Policy* const> policies, uint64_t seed, const RunOptions& options = {});

struct EpisodeOutcome {
  uint64_t seed = 0;
  std::optional<TrajectoryLog> log;
  std::string error;
  int64_t steps = 0;
  std::vector<int> achievements;
  StateDigest final_digest;

  bool ok() const { return error.empty(); }
};

struct BatchResult {
  // In seed order regardless of scheduling.
  std::vector<EpisodeOutcome> episodes;
  int failed = 0;
  // Mean achievements per episode per agent slot, over successful episodes.
  std::vector<double> mean_achievements;
  double mean_steps = 0.0;
};

// Seeds must be distinct. Per-episode failures are recorded, not thrown.
BatchResult run_batch(const GameConfig& cfg, const ScenarioSpec& scenario, const PolicyFactory& factory,
                      std::span<const uint64_t> seeds, int parallelism, const RunOptions& options = {});

// ---- replay ----

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(int64_t step, const std::string& what);
  int64_t step() const { return step_; }

 private:
  int64_t step_;
};

struct ReplayOptions {
  std::optional<std::filesystem::path> gif;
  int sprite_size = 8;
  std::function<void(const WorldState&)> on_state;
};

struct ReplayReport {
  int64_t steps = 0;
  int64_t frames = 0;
  std::vector<StateDigest> digests;
  WorldState final_state;
};

// Re-simulates the log; throws DivergenceError at the first mismatching step.
ReplayReport replay(const TrajectoryLog& log, const ReplayOptions& options = {});

// ---- batched environment ----

struct BatchedStepInfo {
  std::vector<std::vector<StepEvent>> events;
  std::vector<int64_t> invalid_actions;
  // Envs that were auto-reset during the last step.
  std::vector<uint8_t> reset;
};

// K environments sharing one config, stepped in lockstep with flat buffers.
class BatchedEnv {
 public:
  BatchedEnv(GameConfig cfg, int num_envs, bool auto_reset = true);

  int num_envs() const { return static_cast<int>(envs_.size()); }
  int n_agents() const { return cfg_.n_agents; }
  std::size_t obs_size() const { return manifest_.total; }
  const ObsManifest& manifest() const { return manifest_; }
  const GameConfig& config() const { return cfg_; }

  // obs: K * n_agents * obs_size floats.
  void reset(std::span<const uint64_t> seeds, std::span<float> obs);
  // actions: K * n_agents; rewards: K * n_agents; dones: K * n_agents.
  void step(std::span<const int32_t> actions, std::span<float> obs, std::span<double> rewards,
            std::span<uint8_t> dones);
  const BatchedStepInfo& info() const { return info_; }
  const WorldState& state(int env) const { return envs_.at(env).state; }
  uint64_t seed(int env) const { return envs_.at(env).seed; }

 private:
  struct Slot {
    WorldState state;
    uint64_t seed = 0;
    uint64_t episodes = 0;
    bool live = false;
  };
  void encode(int env, std::span<float> obs) const;

  GameConfig cfg_;
  ObsManifest manifest_;
  bool auto_reset_;
  std::vector<Slot> envs_;
  StepResult scratch_;
  std::vector<Action> joint_;
  BatchedStepInfo info_;
};

// Seed used for the episode after `episodes` completed ones in an auto-reset env.
uint64_t auto_reset_seed(uint64_t initial_seed, uint64_t episodes);

// ---- benchmark ----

struct BenchOptions {
  double duration_seconds = 2.0;
  int batched_instances = 8;
  int parallelism = 0;  // 0 = hardware concurrency
  std::string policy = "random";
  bool include_logging = true;
};

struct BenchPhase {
  double step_seconds = 0.0;
  double encode_seconds = 0.0;
  double log_seconds = 0.0;
};

struct BenchReport {
  int n_agents = 0;
  double single_env_steps_per_sec = 0.0;
  double single_agent_steps_per_sec = 0.0;
  double logged_agent_steps_per_sec = 0.0;
  double batched_agent_steps_per_sec = 0.0;
  int batched_instances = 0;
  int threads = 0;
  BenchPhase phases;
  nlohmann::json to_json() const;
};

BenchReport bench(const GameConfig& cfg, const BenchOptions& options);

}  // namespace mac
