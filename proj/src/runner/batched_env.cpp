#include <stdexcept>

#include "mac/runner.hpp"
#include "mac/worldgen.hpp"

namespace mac {

uint64_t auto_reset_seed(uint64_t initial_seed, uint64_t episodes) {
  if (episodes == 0) return initial_seed;
  return Rng::from_seed(initial_seed).substream(static_cast<uint64_t>(Stream::auto_reset)).substream(episodes).next_u64();
}

BatchedEnv::BatchedEnv(GameConfig cfg, int num_envs, bool auto_reset)
    : cfg_(validate_config(std::move(cfg))), manifest_(obs_manifest(cfg_)), auto_reset_(auto_reset) {
  if (num_envs < 1) throw std::invalid_argument("num_envs must be >= 1");
  envs_.resize(static_cast<std::size_t>(num_envs));
  joint_.resize(static_cast<std::size_t>(cfg_.n_agents));
  info_.events.resize(envs_.size());
  info_.invalid_actions.assign(envs_.size(), 0);
  info_.reset.assign(envs_.size(), 0);
}

void BatchedEnv::encode(int env, std::span<float> obs) const {
  const std::size_t per_env = manifest_.total * cfg_.n_agents;
  for (int a = 0; a < cfg_.n_agents; ++a) {
    encode_symbolic(cfg_, manifest_, envs_[env].state, a, obs.subspan(env * per_env + a * manifest_.total, manifest_.total));
  }
}

void BatchedEnv::reset(std::span<const uint64_t> seeds, std::span<float> obs) {
  if (seeds.size() != envs_.size()) {
    throw std::invalid_argument("reset: expected " + std::to_string(envs_.size()) + " seeds, got " +
                                std::to_string(seeds.size()));
  }
  if (obs.size() != envs_.size() * cfg_.n_agents * manifest_.total) throw std::invalid_argument("reset: obs buffer size");
  for (std::size_t k = 0; k < envs_.size(); ++k) {
    envs_[k].seed = seeds[k];
    envs_[k].episodes = 0;
    envs_[k].state = generate_world(cfg_, seeds[k]);
    envs_[k].live = true;
    info_.events[k].clear();
    info_.invalid_actions[k] = 0;
    info_.reset[k] = 0;
    encode(static_cast<int>(k), obs);
  }
}

void BatchedEnv::step(std::span<const int32_t> actions, std::span<float> obs, std::span<double> rewards,
                      std::span<uint8_t> dones) {
  const std::size_t n = static_cast<std::size_t>(cfg_.n_agents);
  const std::size_t k_envs = envs_.size();
  if (actions.size() != k_envs * n) throw std::invalid_argument("step: actions must have num_envs * n_agents entries");
  if (obs.size() != k_envs * n * manifest_.total) throw std::invalid_argument("step: obs buffer size");
  if (rewards.size() != k_envs * n || dones.size() != k_envs * n) throw std::invalid_argument("step: output size");
  for (std::size_t k = 0; k < k_envs; ++k) {
    Slot& env = envs_[k];
    if (!env.live) throw std::logic_error("step called before reset");
    info_.reset[k] = 0;
    if (env.state.terminated) {
      // Without auto-reset a finished env stays finished until reset.
      for (std::size_t a = 0; a < n; ++a) {
        rewards[k * n + a] = 0.0;
        dones[k * n + a] = 1;
      }
      info_.events[k].clear();
      encode(static_cast<int>(k), obs);
      continue;
    }
    for (std::size_t a = 0; a < n; ++a) {
      const auto act = action_from_index(actions[k * n + a]);
      if (!act) ++info_.invalid_actions[k];
      joint_[a] = act.value_or(Action::noop);
    }
    mac::step(cfg_, env.state, joint_, scratch_);
    for (std::size_t a = 0; a < n; ++a) {
      rewards[k * n + a] = scratch_.rewards[a];
      dones[k * n + a] = scratch_.done[a];
    }
    info_.events[k] = scratch_.events;
    if (scratch_.episode_over && auto_reset_) {
      ++env.episodes;
      env.state = generate_world(cfg_, auto_reset_seed(env.seed, env.episodes));
      info_.reset[k] = 1;
    }
    encode(static_cast<int>(k), obs);
  }
}

}  // namespace mac
