#include <stdexcept>

#include "mac/runner.hpp"

namespace mac {

std::string_view name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::solo: return "solo";
    case ScenarioKind::full_expert: return "full_expert";
    case ScenarioKind::half_expert: return "half_expert";
  }
  return "?";
}

std::optional<ScenarioKind> scenario_kind_from_name(std::string_view s) {
  for (auto k : {ScenarioKind::solo, ScenarioKind::full_expert, ScenarioKind::half_expert}) {
    if (name(k) == s) return k;
  }
  if (s == "full") return ScenarioKind::full_expert;
  if (s == "half") return ScenarioKind::half_expert;
  return std::nullopt;
}

nlohmann::json scenario_to_json(const ScenarioSpec& spec) {
  GameConfig holder;
  holder.reward_scenario = spec.reward;
  nlohmann::json j = {
      {"kind", std::string(name(spec.kind))},
      {"half_k", spec.half_k},
      {"reward", config_to_json(holder)["reward_scenario"]},
      {"fixed_timestep", spec.fixed_timestep},
      {"learner", spec.learner},
  };
  j["horizon"] = spec.horizon ? nlohmann::json(*spec.horizon) : nlohmann::json(nullptr);
  return j;
}

ScenarioSpec scenario_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("scenario must be a JSON object");
  ScenarioSpec spec;
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") {
      const auto k = value.is_string() ? scenario_kind_from_name(value.get<std::string>()) : std::nullopt;
      if (!k) throw std::invalid_argument("scenario.kind must be solo, full_expert or half_expert");
      spec.kind = *k;
    } else if (key == "half_k" && value.is_number_integer()) {
      spec.half_k = value.get<int64_t>();
    } else if (key == "reward") {
      spec.reward = config_from_json({{"reward_scenario", value}}).reward_scenario;
    } else if (key == "fixed_timestep" && value.is_boolean()) {
      spec.fixed_timestep = value.get<bool>();
    } else if (key == "horizon" && (value.is_null() || value.is_number_integer())) {
      if (!value.is_null()) spec.horizon = value.get<int64_t>();
    } else if (key == "learner" && value.is_number_integer()) {
      spec.learner = value.get<int>();
    } else {
      throw std::invalid_argument("scenario: unknown or malformed key '" + key + "'");
    }
  }
  return spec;
}

std::vector<int> expert_slots(const ScenarioSpec& spec, int n_agents) {
  std::vector<int> out;
  for (int i = 0; i < n_agents; ++i) {
    if (i != spec.learner) out.push_back(i);
  }
  return out;
}

GameConfig apply_scenario(GameConfig cfg, const ScenarioSpec& spec) {
  if (spec.half_k < 0) throw std::invalid_argument("half_expert k must be >= 0");
  if (spec.learner < 0 || spec.learner >= cfg.n_agents) throw std::invalid_argument("learner slot out of range");
  VisibilityRule expert = VisibilityRule::always();
  if (spec.kind == ScenarioKind::solo) expert = VisibilityRule::never();
  if (spec.kind == ScenarioKind::half_expert) expert = VisibilityRule::first_k(spec.half_k);
  cfg.expert_schedule.assign(static_cast<std::size_t>(cfg.n_agents), expert);
  cfg.expert_schedule[spec.learner] = VisibilityRule::always();
  cfg.reward_scenario = spec.reward;
  cfg.fixed_timestep_mode = spec.fixed_timestep;
  if (spec.horizon) cfg.max_episode_steps = *spec.horizon;
  return validate_config(std::move(cfg));
}

}  // namespace mac
