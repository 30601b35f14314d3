#include "mac/metrics.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "mac/observation.hpp"

namespace mac {

Moments moments(std::span<const double> xs) {
  Moments m;
  m.n = xs.size();
  if (xs.empty()) return m;
  m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return m;
}

ScenarioScores ScenarioScores::from_samples(std::vector<double> full, std::vector<double> half,
                                            std::vector<double> solo, std::vector<double> expert) {
  ScenarioScores s;
  const auto f = moments(full);
  const auto h = moments(half);
  const auto so = moments(solo);
  const auto e = moments(expert);
  s.a_full = f.mean;
  s.a_half = h.mean;
  s.a_solo = so.mean;
  s.e = e.mean;
  s.sd_full = f.std;
  s.sd_half = h.std;
  s.sd_solo = so.std;
  s.sd_e = e.std;
  s.samples_full = std::move(full);
  s.samples_half = std::move(half);
  s.samples_solo = std::move(solo);
  s.samples_e = std::move(expert);
  return s;
}

CtResult cultural_transmission(const ScenarioScores& s) {
  if (s.e == 0.0) throw MetricsError("zero-expert-score: expert score must be nonzero");
  CtResult r;
  r.value = 0.5 * (s.a_full - s.a_solo) / s.e + 0.5 * (s.a_half - s.a_solo) / s.e;
  // Partial derivatives of the formula with respect to each score.
  const double d_full = 0.5 / s.e;
  const double d_half = 0.5 / s.e;
  const double d_solo = -1.0 / s.e;
  const double d_e = -r.value / s.e;
  r.std = std::sqrt(std::pow(d_full * s.sd_full, 2) + std::pow(d_half * s.sd_half, 2) +
                    std::pow(d_solo * s.sd_solo, 2) + std::pow(d_e * s.sd_e, 2));
  return r;
}

ScenarioScores scores_from_logs(std::span<const TrajectoryLog> logs, ScoreKind kind) {
  std::vector<double> full, half, solo, expert;
  for (const auto& log : logs) {
    const ScenarioSpec spec = scenario_from_json(log.header.scenario);
    auto score = [&](int slot) {
      if (kind == ScoreKind::achievements) {
        if (static_cast<std::size_t>(slot) >= log.final_achievements.size()) throw MetricsError("log lacks final achievements");
        return static_cast<double>(log.final_achievements[slot].size());
      }
      if (log.steps.empty()) throw MetricsError("reward scores need per-step records");
      double total = 0.0;
      for (const auto& rec : log.steps) total += rec.rewards.at(slot);
      return total;
    };
    const double learner = score(spec.learner);
    switch (spec.kind) {
      case ScenarioKind::full_expert: full.push_back(learner); break;
      case ScenarioKind::half_expert: half.push_back(learner); break;
      case ScenarioKind::solo: solo.push_back(learner); break;
    }
    for (int e : log.header.expert_slots) expert.push_back(score(e));
  }
  if (full.empty() || half.empty() || solo.empty()) {
    throw MetricsError("cultural transmission needs solo, full_expert and half_expert logs");
  }
  if (expert.empty()) throw MetricsError("zero-expert-score: no expert slots in the logs");
  return ScenarioScores::from_samples(std::move(full), std::move(half), std::move(solo), std::move(expert));
}

namespace {

ProximityReport empty_proximity(int n) {
  ProximityReport r;
  r.n_agents = n;
  r.fraction.assign(n, std::vector<std::optional<double>>(n));
  r.in_view_steps.assign(n, std::vector<int64_t>(n, 0));
  r.mutual_alive_steps.assign(n, std::vector<int64_t>(n, 0));
  return r;
}

void accumulate_proximity(const TrajectoryLog& log, ProximityReport& r) {
  const GameConfig cfg = log_config(log.header);
  const int n = cfg.n_agents;
  ReplayOptions opts;
  opts.on_state = [&](const WorldState& s) {
    for (int i = 0; i < n; ++i) {
      if (!s.players[i].alive) continue;
      for (int j = 0; j < n; ++j) {
        if (i == j || !s.players[j].alive) continue;
        ++r.mutual_alive_steps[i][j];
        if (is_visible(cfg, s, i, j)) ++r.in_view_steps[i][j];
      }
    }
  };
  try {
    replay(log, opts);
  } catch (const DivergenceError& e) {
    throw MetricsError(std::string("corrupt log: ") + e.what());
  }
}

void finish_proximity(ProximityReport& r) {
  double sum = 0.0;
  int pairs = 0;
  for (int i = 0; i < r.n_agents; ++i) {
    for (int j = 0; j < r.n_agents; ++j) {
      if (i == j || r.mutual_alive_steps[i][j] == 0) continue;
      const double f = static_cast<double>(r.in_view_steps[i][j]) / static_cast<double>(r.mutual_alive_steps[i][j]);
      r.fraction[i][j] = f;
      sum += f;
      ++pairs;
    }
  }
  r.mean = pairs > 0 ? sum / pairs : 0.0;
}

}  // namespace

ProximityReport proximity_fraction(const TrajectoryLog& log) { return proximity_fraction(std::span(&log, 1)); }

ProximityReport proximity_fraction(std::span<const TrajectoryLog> logs) {
  if (logs.empty()) throw MetricsError("no logs given");
  const int n = logs.front().header.n_agents;
  ProximityReport r = empty_proximity(n);
  for (const auto& log : logs) {
    if (log.header.n_agents != n) throw MetricsError("logs disagree on n_agents");
    accumulate_proximity(log, r);
  }
  finish_proximity(r);
  return r;
}

nlohmann::json ProximityReport::to_json() const {
  nlohmann::json pairs = nlohmann::json::array();
  for (int i = 0; i < n_agents; ++i) {
    for (int j = 0; j < n_agents; ++j) {
      if (i == j) continue;
      pairs.push_back({{"observer", i},
                       {"target", j},
                       {"fraction", fraction[i][j] ? nlohmann::json(*fraction[i][j]) : nlohmann::json(nullptr)},
                       {"in_view_steps", in_view_steps[i][j]},
                       {"mutual_alive_steps", mutual_alive_steps[i][j]}});
    }
  }
  return {{"report", "proximity"}, {"n_agents", n_agents}, {"mean", mean}, {"pairs", pairs}};
}

std::string ProximityReport::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "observer,target,fraction,in_view_steps,mutual_alive_steps\n";
  for (int i = 0; i < n_agents; ++i) {
    for (int j = 0; j < n_agents; ++j) {
      if (i == j) continue;
      os << i << ',' << j << ',';
      if (fraction[i][j]) os << *fraction[i][j];
      os << ',' << in_view_steps[i][j] << ',' << mutual_alive_steps[i][j] << '\n';
    }
  }
  os << "mean,," << mean << ",,\n";
  return os.str();
}

std::optional<double> AgentToolUse::own_probability() const {
  if (total() == 0) return std::nullopt;
  return static_cast<double>(own) / static_cast<double>(total());
}

namespace {

std::array<double, 2> wilson(int64_t successes, int64_t n) {
  constexpr double z = 1.959963984540054;
  const double p = static_cast<double>(successes) / static_cast<double>(n);
  const double denom = 1.0 + z * z / n;
  const double centre = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

void count_tool_use(const TrajectoryLog& log, ToolUseStats& st) {
  const int n = st.n_agents;
  for (const auto& rec : log.steps) {
    for (const auto& e : rec.events) {
      if (e.kind != EventKind::tool_used) continue;
      if (e.agent < 0 || e.agent >= n) throw MetricsError("tool_used event with bad agent id");
      AgentToolUse& a = st.agents[e.agent];
      const bool own = e.other == e.agent;
      (own ? a.own : a.other) += 1;
      (own ? st.pooled.own : st.pooled.other) += 1;
      const int placer = e.other >= 0 && e.other < n ? e.other : n;
      ++a.by_placer[placer];
      ++st.pooled.by_placer[placer];
    }
  }
}

}  // namespace

ToolUseStats tool_use_stats(const TrajectoryLog& log) { return tool_use_stats(std::span(&log, 1)); }

ToolUseStats tool_use_stats(std::span<const TrajectoryLog> logs) {
  if (logs.empty()) throw MetricsError("no logs given");
  ToolUseStats st;
  st.n_agents = logs.front().header.n_agents;
  st.agents.assign(st.n_agents, AgentToolUse{0, 0, std::vector<int64_t>(st.n_agents + 1, 0)});
  st.pooled.by_placer.assign(st.n_agents + 1, 0);
  for (const auto& log : logs) {
    if (log.header.n_agents != st.n_agents) throw MetricsError("logs disagree on n_agents");
    count_tool_use(log, st);
  }
  st.uniform_baseline = 1.0 / st.n_agents;
  if (st.pooled.total() > 0) st.pooled_ci = wilson(st.pooled.own, st.pooled.total());
  return st;
}

nlohmann::json ToolUseStats::to_json() const {
  auto agent_json = [](const AgentToolUse& a) {
    const auto p = a.own_probability();
    return nlohmann::json{{"own", a.own},
                          {"other", a.other},
                          {"total", a.total()},
                          {"own_probability", p ? nlohmann::json(*p) : nlohmann::json(nullptr)},
                          {"by_placer", a.by_placer}};
  };
  nlohmann::json agents_json = nlohmann::json::array();
  for (const auto& a : agents) agents_json.push_back(agent_json(a));
  nlohmann::json j = {{"report", "tools"},
                      {"n_agents", n_agents},
                      {"agents", agents_json},
                      {"pooled", agent_json(pooled)},
                      {"uniform_baseline", uniform_baseline}};
  j["pooled_ci95"] = pooled_ci ? nlohmann::json(*pooled_ci) : nlohmann::json(nullptr);
  return j;
}

std::string ToolUseStats::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "agent,own,other,total,own_probability,uniform_baseline\n";
  auto row = [&](const std::string& who, const AgentToolUse& a) {
    os << who << ',' << a.own << ',' << a.other << ',' << a.total() << ',';
    if (auto p = a.own_probability()) os << *p;
    os << ',' << uniform_baseline << '\n';
  };
  for (int i = 0; i < n_agents; ++i) row(std::to_string(i), agents[i]);
  row("pooled", pooled);
  return os.str();
}

AchievementSummary achievement_summary(std::span<const std::vector<AchievementSet>> episodes) {
  AchievementSummary s;
  s.episodes = episodes.size();
  if (episodes.empty()) return s;
  s.n_agents = static_cast<int>(episodes.front().size());
  s.per_agent.assign(s.n_agents, {});
  std::vector<std::vector<double>> scores(s.n_agents);
  std::vector<double> pooled_scores;
  for (const auto& ep : episodes) {
    if (static_cast<int>(ep.size()) != s.n_agents) throw MetricsError("episodes disagree on n_agents");
    for (int a = 0; a < s.n_agents; ++a) {
      for (int k = 0; k < kAchievementCount; ++k) {
        if (ep[a].contains(static_cast<Achievement>(k))) {
          s.per_agent[a][k] += 1.0;
          s.pooled[k] += 1.0;
        }
      }
      scores[a].push_back(ep[a].size());
      pooled_scores.push_back(ep[a].size());
    }
  }
  const double eps = static_cast<double>(episodes.size());
  for (auto& row : s.per_agent) {
    for (auto& v : row) v /= eps;
  }
  for (auto& v : s.pooled) v /= eps * s.n_agents;
  for (const auto& sc : scores) s.agent_score.push_back(moments(sc));
  s.pooled_score = moments(pooled_scores);
  return s;
}

AchievementSummary achievement_summary(std::span<const TrajectoryLog> logs) {
  std::vector<std::vector<AchievementSet>> episodes;
  for (const auto& log : logs) episodes.push_back(log.final_achievements);
  return achievement_summary(episodes);
}

nlohmann::json AchievementSummary::to_json() const {
  nlohmann::json table = nlohmann::json::object();
  for (int k = 0; k < kAchievementCount; ++k) {
    nlohmann::json row = {{"pooled", pooled[k]}};
    nlohmann::json agents = nlohmann::json::array();
    for (const auto& a : per_agent) agents.push_back(a[k]);
    row["agents"] = agents;
    table[std::string(name(static_cast<Achievement>(k)))] = row;
  }
  nlohmann::json scores = nlohmann::json::array();
  for (const auto& m : agent_score) scores.push_back({{"mean", m.mean}, {"std", m.std}});
  return {{"report", "achievements"},
          {"episodes", episodes},
          {"n_agents", n_agents},
          {"probabilities", table},
          {"agent_scores", scores},
          {"mean_score", pooled_score.mean},
          {"std_score", pooled_score.std}};
}

std::string AchievementSummary::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "achievement,pooled";
  for (int a = 0; a < n_agents; ++a) os << ",agent_" << a;
  os << '\n';
  for (int k = 0; k < kAchievementCount; ++k) {
    os << name(static_cast<Achievement>(k)) << ',' << pooled[k];
    for (const auto& row : per_agent) os << ',' << row[k];
    os << '\n';
  }
  os << "mean_score," << pooled_score.mean;
  for (const auto& m : agent_score) os << ',' << m.mean;
  os << "\nstd_score," << pooled_score.std;
  for (const auto& m : agent_score) os << ',' << m.std;
  os << '\n';
  return os.str();
}

nlohmann::json ct_to_json(const ScenarioScores& s, const CtResult& ct) {
  return {{"report", "ct"},   {"ct", ct.value},    {"ct_std", ct.std},     {"a_full", s.a_full},
          {"a_half", s.a_half}, {"a_solo", s.a_solo}, {"e", s.e},          {"sd_full", s.sd_full},
          {"sd_half", s.sd_half}, {"sd_solo", s.sd_solo}, {"sd_e", s.sd_e}, {"episodes_full", s.samples_full.size()},
          {"episodes_half", s.samples_half.size()}, {"episodes_solo", s.samples_solo.size()}};
}

std::string ct_to_csv(const ScenarioScores& s, const CtResult& ct) {
  std::ostringstream os;
  os.precision(17);
  os << "ct,ct_std,a_full,a_half,a_solo,e,sd_full,sd_half,sd_solo,sd_e\n";
  os << ct.value << ',' << ct.std << ',' << s.a_full << ',' << s.a_half << ',' << s.a_solo << ',' << s.e << ','
     << s.sd_full << ',' << s.sd_half << ',' << s.sd_solo << ',' << s.sd_e << '\n';
  return os.str();
}

}  // namespace mac
