#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mac/runner.hpp"

namespace mac {

class MetricsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Moments {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1)
  std::size_t n = 0;
};
Moments moments(std::span<const double> xs);

// Mean scores per scenario with their spreads. The sd fields feed error
// propagation; from_samples fills everything from per-episode lists.
struct ScenarioScores {
  double a_full = 0.0;
  double a_half = 0.0;
  double a_solo = 0.0;
  double e = 0.0;
  double sd_full = 0.0;
  double sd_half = 0.0;
  double sd_solo = 0.0;
  double sd_e = 0.0;
  std::vector<double> samples_full, samples_half, samples_solo, samples_e;

  static ScenarioScores from_samples(std::vector<double> full, std::vector<double> half, std::vector<double> solo,
                                     std::vector<double> expert);
};

struct CtResult {
  double value = 0.0;
  // First-order propagation of the four independent spreads.
  double std = 0.0;
};

// Throws MetricsError("zero-expert-score") when e == 0.
CtResult cultural_transmission(const ScenarioScores& s);

// Which per-episode number stands for a slot's score.
enum class ScoreKind : uint8_t { achievements, rewards };

// Scores from logs grouped by the scenario recorded in each header: the
// learner slot feeds a_full/a_half/a_solo, expert slots feed e.
ScenarioScores scores_from_logs(std::span<const TrajectoryLog> logs, ScoreKind kind = ScoreKind::achievements);

struct ProximityReport {
  int n_agents = 0;
  // [observer][target]; nullopt when the pair was never alive together.
  std::vector<std::vector<std::optional<double>>> fraction;
  std::vector<std::vector<int64_t>> in_view_steps;
  std::vector<std::vector<int64_t>> mutual_alive_steps;
  double mean = 0.0;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

// Replays the log; each post-step state counts once per ordered pair that is alive in it.
ProximityReport proximity_fraction(const TrajectoryLog& log);
// Pooled over logs: counts are summed before dividing.
ProximityReport proximity_fraction(std::span<const TrajectoryLog> logs);

struct AgentToolUse {
  int64_t own = 0;
  int64_t other = 0;
  // Uses per placer id; index n_agents holds stations with no recorded placer.
  std::vector<int64_t> by_placer;

  int64_t total() const { return own + other; }
  std::optional<double> own_probability() const;
};

struct ToolUseStats {
  int n_agents = 0;
  std::vector<AgentToolUse> agents;
  AgentToolUse pooled;
  // Chance of picking one's own station uniformly among n agents.
  double uniform_baseline = 0.0;
  // 95% Wilson interval for the pooled own-use probability.
  std::optional<std::array<double, 2>> pooled_ci;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

ToolUseStats tool_use_stats(const TrajectoryLog& log);
ToolUseStats tool_use_stats(std::span<const TrajectoryLog> logs);

struct AchievementSummary {
  int n_agents = 0;
  std::size_t episodes = 0;
  // [agent][achievement] fraction of episodes in which it was unlocked.
  std::vector<std::array<double, kAchievementCount>> per_agent;
  std::array<double, kAchievementCount> pooled{};
  std::vector<Moments> agent_score;
  Moments pooled_score;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

// One entry per episode, one AchievementSet per agent slot.
AchievementSummary achievement_summary(std::span<const std::vector<AchievementSet>> episodes);
AchievementSummary achievement_summary(std::span<const TrajectoryLog> logs);

nlohmann::json ct_to_json(const ScenarioScores& s, const CtResult& ct);
std::string ct_to_csv(const ScenarioScores& s, const CtResult& ct);

}  // namespace mac
