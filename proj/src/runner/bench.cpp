#include <atomic>
#include <chrono>
#include <thread>

#include "mac/runner.hpp"
#include "mac/worldgen.hpp"

namespace mac {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct LoopResult {
  int64_t env_steps = 0;
  double wall = 0.0;
  BenchPhase phases;
};

// Steps fresh episodes back to back until the deadline passes.
LoopResult stepping_loop(const GameConfig& cfg, const std::string& policy, double duration, bool logging,
                         bool timed, uint64_t seed0) {
  const int n = cfg.n_agents;
  const ObsManifest m = obs_manifest(cfg);
  std::vector<std::unique_ptr<Policy>> policies;
  for (int i = 0; i < n; ++i) {
    policies.push_back(make_policy(policy));
    policies.back()->reset(cfg, i);
  }
  std::vector<float> obs(m.total * n);
  std::vector<Action> actions(n);
  StepResult result;
  std::vector<StepRecord> records;
  Rng rng = Rng::from_seed(seed0).substream(static_cast<uint64_t>(Stream::policy));

  LoopResult out;
  const auto start = Clock::now();
  for (uint64_t seed = seed0;; ++seed) {
    WorldState s = generate_world(cfg, seed);
    records.clear();
    while (!s.terminated) {
      auto t0 = timed ? Clock::now() : Clock::time_point{};
      for (int i = 0; i < n; ++i) {
        const std::span<float> o(obs.data() + i * m.total, m.total);
        encode_symbolic(cfg, m, s, i, o);
        actions[i] = action_from_index(policies[i]->act(o, rng)).value_or(Action::noop);
      }
      auto t1 = timed ? Clock::now() : Clock::time_point{};
      step(cfg, s, actions, result);
      auto t2 = timed ? Clock::now() : Clock::time_point{};
      if (logging) {
        StepRecord rec;
        rec.actions.assign(n, 0);
        for (int i = 0; i < n; ++i) rec.actions[i] = static_cast<uint8_t>(actions[i]);
        rec.rewards = result.rewards;
        rec.events = result.events;
        rec.digest = digest_state(s);
        rec.done = result.episode_over;
        records.push_back(std::move(rec));
      }
      if (timed) {
        const auto t3 = Clock::now();
        out.phases.encode_seconds += std::chrono::duration<double>(t1 - t0).count();
        out.phases.step_seconds += std::chrono::duration<double>(t2 - t1).count();
        out.phases.log_seconds += std::chrono::duration<double>(t3 - t2).count();
      }
      ++out.env_steps;
      if ((out.env_steps & 255) == 0 && seconds_since(start) >= duration) {
        out.wall = seconds_since(start);
        return out;
      }
    }
  }
}

}  // namespace

nlohmann::json BenchReport::to_json() const {
  return {
      {"n_agents", n_agents},
      {"single_env_steps_per_sec", single_env_steps_per_sec},
      {"single_agent_steps_per_sec", single_agent_steps_per_sec},
      {"logged_agent_steps_per_sec", logged_agent_steps_per_sec},
      {"batched_agent_steps_per_sec", batched_agent_steps_per_sec},
      {"batched_instances", batched_instances},
      {"threads", threads},
      {"phase_seconds", {{"step", phases.step_seconds}, {"encode", phases.encode_seconds}, {"log", phases.log_seconds}}},
  };
}

BenchReport bench(const GameConfig& raw, const BenchOptions& options) {
  const GameConfig cfg = validate_config(raw);
  make_policy(options.policy);
  BenchReport r;
  r.n_agents = cfg.n_agents;

  const auto plain = stepping_loop(cfg, options.policy, options.duration_seconds, false, false, 1);
  r.single_env_steps_per_sec = plain.env_steps / plain.wall;
  r.single_agent_steps_per_sec = r.single_env_steps_per_sec * cfg.n_agents;

  // Phase breakdown comes from a separate timed pass so clock reads do not
  // slow the headline figure.
  const auto timed = stepping_loop(cfg, options.policy, options.duration_seconds / 2, options.include_logging, true, 1);
  r.phases = timed.phases;
  if (options.include_logging) {
    const auto logged = stepping_loop(cfg, options.policy, options.duration_seconds, true, false, 1);
    r.logged_agent_steps_per_sec = logged.env_steps / logged.wall * cfg.n_agents;
  }

  r.batched_instances = std::max(1, options.batched_instances);
  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  r.threads = std::min(r.batched_instances, options.parallelism > 0 ? options.parallelism : hw);
  std::atomic<int64_t> total{0};
  std::atomic<std::size_t> next{0};
  const auto start = Clock::now();
  std::vector<std::thread> pool;
  for (int t = 0; t < r.threads; ++t) {
    pool.emplace_back([&] {
      // Each instance runs for its share of the duration, so the batch takes about duration seconds.
      for (std::size_t i = next++; i < static_cast<std::size_t>(r.batched_instances); i = next++) {
        const double share = options.duration_seconds * r.threads / r.batched_instances;
        total += stepping_loop(cfg, options.policy, share, false, false, 1000 + i * 100000).env_steps;
      }
    });
  }
  for (auto& t : pool) t.join();
  r.batched_agent_steps_per_sec = total.load() / seconds_since(start) * cfg.n_agents;
  return r;
}

}  // namespace mac
