"""Multi-agent Craftax engine: batched environments, episode logs and social-learning metrics."""

import json

from . import _core
from ._core import (
    LOG_FORMAT_VERSION,
    MANIFEST_VERSION,
    NUM_ACTIONS,
    ConfigError,
    DivergenceError,
    LogError,
    MetricsError,
    cultural_transmission,
)

EVENT_KINDS = (
    "achievement_unlocked",
    "attack",
    "tool_used",
    "block_changed",
    "mob_killed",
    "death",
    "resource_collected",
    "item_crafted",
    "woke_up",
    "health_changed",
)


def _config_text(config):
    if config is None:
        return ""
    return config if isinstance(config, str) else json.dumps(config)


def default_config():
    return json.loads(_core.default_config_json())


def manifest(config=None):
    return json.loads(_core.manifest_json(_config_text(config)))


class BatchedEnv:
    """K environments sharing one config, stepped in lockstep.

    reset(seeds) returns observations shaped (K, n_agents, obs_size).
    step(actions) takes (K, n_agents) integers and returns (obs, rewards, dones, info).
    Out-of-range actions act as NOOP and are counted in info["invalid_actions"].
    """

    def __init__(self, config=None, num_envs=1, auto_reset=True):
        self._env = _core.BatchedEnv(_config_text(config), num_envs, auto_reset)

    @property
    def num_envs(self):
        return self._env.num_envs

    @property
    def n_agents(self):
        return self._env.n_agents

    @property
    def obs_size(self):
        return self._env.obs_size

    num_actions = NUM_ACTIONS

    def manifest(self):
        return json.loads(self._env.manifest_json())

    def config(self):
        return json.loads(self._env.config_json())

    def seed(self, env):
        return self._env.seed(env)

    def state_digest(self, env):
        return self._env.state_digest(env)

    def reset(self, seeds):
        return self._env.reset(list(seeds))

    def step(self, actions):
        obs, rewards, dones, info = self._env.step(actions)
        info["events"] = [
            [(EVENT_KINDS[e[0]],) + tuple(e[1:]) for e in per_env] for per_env in info["events"]
        ]
        return obs, rewards, dones, info


def run_episode(config=None, scenario=None, policies=("random",), seed=0, log_path=None):
    text = _core.run_episode(
        _config_text(config), _config_text(scenario), list(policies), seed, str(log_path or "")
    )
    return json.loads(text)


def load_log(path):
    out = _core.load_log(str(path))
    out["header"] = json.loads(out["header"])
    return out


def replay(path, gif=None, sprite=8):
    return json.loads(_core.replay(str(path), str(gif or ""), sprite))


def _paths(paths):
    return [str(p) for p in ([paths] if isinstance(paths, (str, bytes)) or hasattr(paths, "__fspath__") else paths)]


def ct_from_logs(paths, kind="achievements"):
    return json.loads(_core.ct_from_logs_json(_paths(paths), kind))


def proximity(paths):
    return json.loads(_core.proximity_json(_paths(paths)))


def tool_use(paths):
    return json.loads(_core.tool_use_json(_paths(paths)))


def achievements(paths):
    return json.loads(_core.achievements_json(_paths(paths)))
