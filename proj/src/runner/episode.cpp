#include <algorithm>
#include <atomic>
#include <set>
#include <thread>

#include "mac/runner.hpp"
#include "mac/worldgen.hpp"

namespace mac {

namespace {

struct EpisodeRun {
  TrajectoryLog log;
  StateDigest final_digest;
  int64_t steps = 0;
};

EpisodeRun run_applied(const GameConfig& cfg, const ScenarioSpec& scenario, WorldState s,
                       std::span<Policy* const> policies, uint64_t seed, bool embed, const RunOptions& options) {
  const int n = cfg.n_agents;
  if (static_cast<int>(policies.size()) != n) {
    throw std::invalid_argument("expected " + std::to_string(n) + " policies, got " + std::to_string(policies.size()));
  }
  if (static_cast<int>(s.players.size()) != n) throw std::invalid_argument("initial state player count != n_agents");
  const auto experts = expert_slots(scenario, n);
  for (int e : experts) {
    if (policies[e] == nullptr) throw std::invalid_argument("missing policy for slot " + std::to_string(e));
    if (policies[e]->trainable()) {
      throw std::invalid_argument("expert slot " + std::to_string(e) + " must hold a frozen policy");
    }
  }
  std::vector<uint8_t> is_expert(n, 0);
  for (int e : experts) is_expert[e] = 1;

  EpisodeRun run;
  TrajectoryLog& log = run.log;
  log.header.config = config_to_json(cfg);
  log.header.config_digest = config_digest(cfg);
  log.header.seed = seed;
  log.header.n_agents = n;
  log.header.scenario = scenario_to_json(scenario);
  log.header.expert_slots = experts;
  if (embed) log.header.initial_state = serialize_state(s);
  if (!options.record_digests) log.header.format_version = "1.0";
  log.learning_callbacks.assign(n, 0);

  const Rng policy_root = Rng::from_seed(world_seed(cfg, seed)).substream(static_cast<uint64_t>(Stream::policy));
  std::vector<Rng> rngs;
  for (int i = 0; i < n; ++i) {
    rngs.push_back(policy_root.substream(static_cast<uint64_t>(i)));
    policies[i]->reset(cfg, i);
  }

  const ObsManifest m = obs_manifest(cfg);
  std::vector<float> obs(m.total * n);
  std::vector<Action> actions(n);
  std::vector<int> raw(n);
  StepResult result;
  while (!s.terminated) {
    for (int i = 0; i < n; ++i) {
      const std::span<float> o(obs.data() + i * m.total, m.total);
      encode_symbolic(cfg, m, s, i, o);
      raw[i] = policies[i]->act(o, rngs[i]);
      const auto a = action_from_index(raw[i]);
      if (!a) ++log.invalid_actions;
      actions[i] = a.value_or(Action::noop);
    }
    step(cfg, s, actions, result);
    for (int i = 0; i < n; ++i) {
      if (is_expert[i] || !policies[i]->trainable()) continue;
      policies[i]->on_transition({std::span<const float>(obs.data() + i * m.total, m.total),
                                  static_cast<int>(actions[i]), result.rewards[i], result.episode_over});
      ++log.learning_callbacks[i];
    }
    if (options.record_steps) {
      StepRecord rec;
      rec.actions.resize(n);
      for (int i = 0; i < n; ++i) rec.actions[i] = static_cast<uint8_t>(actions[i]);
      rec.rewards = result.rewards;
      rec.events = result.events;
      if (options.record_digests) rec.digest = digest_state(s);
      rec.done = result.episode_over;
      log.steps.push_back(std::move(rec));
    }
    if (options.on_step) options.on_step(s, result);
  }
  for (const auto& p : s.players) log.final_achievements.push_back(p.achievements);
  run.final_digest = digest_state(s);
  run.steps = s.step;
  return run;
}

}  // namespace

TrajectoryLog run_episode(const GameConfig& cfg, const ScenarioSpec& scenario, std::span<Policy* const> policies,
                          uint64_t seed, const RunOptions& options) {
  const GameConfig applied = apply_scenario(cfg, scenario);
  return run_applied(applied, scenario, generate_world(applied, seed), policies, seed, options.embed_initial_state,
                     options)
      .log;
}

TrajectoryLog run_episode_from(const GameConfig& cfg, const ScenarioSpec& scenario, WorldState initial,
                               std::span<Policy* const> policies, uint64_t seed, const RunOptions& options) {
  const GameConfig applied = apply_scenario(cfg, scenario);
  return run_applied(applied, scenario, std::move(initial), policies, seed, true, options).log;
}

BatchResult run_batch(const GameConfig& cfg, const ScenarioSpec& scenario, const PolicyFactory& factory,
                      std::span<const uint64_t> seeds, int parallelism, const RunOptions& options) {
  if (std::set<uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw std::invalid_argument("run_batch: seeds must be distinct");
  }
  const GameConfig applied = apply_scenario(cfg, scenario);
  const int n = applied.n_agents;
  BatchResult out;
  out.episodes.resize(seeds.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      EpisodeOutcome& o = out.episodes[i];
      o.seed = seeds[i];
      try {
        std::vector<std::unique_ptr<Policy>> owned;
        std::vector<Policy*> ptrs;
        for (int a = 0; a < n; ++a) {
          owned.push_back(factory(a));
          ptrs.push_back(owned.back().get());
        }
        auto run = run_applied(applied, scenario, generate_world(applied, seeds[i]), ptrs, seeds[i],
                               options.embed_initial_state, options);
        o.steps = run.steps;
        o.final_digest = run.final_digest;
        for (const auto& a : run.log.final_achievements) o.achievements.push_back(a.size());
        o.log = std::move(run.log);
      } catch (const std::exception& e) {
        o.error = e.what();
        if (o.error.empty()) o.error = "unknown error";
      }
    }
  };

  if (parallelism <= 0) parallelism = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const int threads = std::min<int>(parallelism, static_cast<int>(std::max<std::size_t>(seeds.size(), 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  out.mean_achievements.assign(n, 0.0);
  int ok = 0;
  double steps = 0;
  for (const auto& o : out.episodes) {
    if (!o.ok()) {
      ++out.failed;
      continue;
    }
    ++ok;
    steps += static_cast<double>(o.steps);
    for (int a = 0; a < n; ++a) out.mean_achievements[a] += o.achievements[a];
  }
  if (ok > 0) {
    for (auto& v : out.mean_achievements) v /= ok;
    out.mean_steps = steps / ok;
  }
  return out;
}

DivergenceError::DivergenceError(int64_t step, const std::string& what)
    : std::runtime_error("divergence at step " + std::to_string(step) + ": " + what), step_(step) {}

ReplayReport replay(const TrajectoryLog& log, const ReplayOptions& options) {
  const GameConfig cfg = log_config(log.header);
  WorldState s = log_initial_state(log.header);
  const std::size_t n = static_cast<std::size_t>(cfg.n_agents);

  std::optional<GifWriter> gif;
  if (options.gif) {
    const Image probe = render_frame(s, options.sprite_size);
    gif.emplace(*options.gif, probe.width, probe.height);
  }

  ReplayReport report;
  std::vector<Action> actions(n);
  StepResult result;
  for (std::size_t i = 0; i < log.steps.size(); ++i) {
    const int64_t t = static_cast<int64_t>(i) + 1;
    const StepRecord& rec = log.steps[i];
    if (rec.actions.size() != n) throw DivergenceError(t, "record has wrong action count");
    for (std::size_t a = 0; a < n; ++a) {
      const auto act = action_from_index(rec.actions[a]);
      if (!act) throw DivergenceError(t, "invalid logged action " + std::to_string(rec.actions[a]));
      actions[a] = *act;
    }
    if (s.terminated) throw DivergenceError(t, "episode already terminated in replay");
    step(cfg, s, actions, result);
    if (result.events != rec.events) throw DivergenceError(t, "event stream differs");
    if (result.rewards != rec.rewards) throw DivergenceError(t, "rewards differ");
    if (result.episode_over != rec.done) throw DivergenceError(t, "done flag differs");
    const StateDigest d = digest_state(s);
    if (rec.digest && *rec.digest != d) throw DivergenceError(t, "state digest differs");
    report.digests.push_back(d);
    if (options.on_state) options.on_state(s);
    if (gif) gif->add(render_frame(s, options.sprite_size));
  }
  report.steps = static_cast<int64_t>(log.steps.size());
  if (!log.steps.empty() && !s.terminated) throw DivergenceError(report.steps, "log ends before the episode does");
  if (!log.steps.empty()) {
    for (std::size_t a = 0; a < n && a < log.final_achievements.size(); ++a) {
      if (s.players[a].achievements != log.final_achievements[a]) {
        throw DivergenceError(report.steps, "final achievements differ for agent " + std::to_string(a));
      }
    }
  }
  if (gif) {
    report.frames = gif->frames();
    gif->finish();
  }
  report.final_state = std::move(s);
  return report;
}

}  // namespace mac
