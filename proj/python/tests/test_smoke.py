import numpy as np
import pytest

import macraftax as mc


def test_manifest_matches_env():
    m = mc.manifest()
    assert m["total"] == 1595
    assert m["version"] == mc.MANIFEST_VERSION
    env = mc.BatchedEnv(num_envs=2)
    assert env.manifest() == m
    assert env.obs_size == 1595
    assert env.num_actions == 17


def test_reset_shapes_range_and_determinism():
    env = mc.BatchedEnv(num_envs=3)
    a = env.reset([1, 2, 3])
    b = env.reset([1, 2, 3])
    assert a.shape == (3, 4, 1595)
    assert a.dtype == np.float32
    assert np.array_equal(a, b)
    assert a.min() >= 0.0 and a.max() <= 1.0
    with pytest.raises(ValueError):
        env.reset([1, 2])


def test_step_shapes_and_invalid_actions():
    env = mc.BatchedEnv(num_envs=2)
    env.reset([5, 6])
    actions = np.zeros((2, 4), dtype=np.int32)
    actions[0, 1] = 99
    actions[1, 2] = -1
    obs, rewards, dones, info = env.step(actions)
    assert obs.shape == (2, 4, 1595)
    assert rewards.shape == (2, 4)
    assert dones.shape == (2, 4)
    assert list(info["invalid_actions"]) == [1, 1]
    assert len(info["events"]) == 2


def test_auto_reset_gives_a_fresh_observation():
    cfg = mc.default_config()
    cfg["max_episode_steps"] = 3
    env = mc.BatchedEnv(cfg, num_envs=1)
    first = env.reset([9])
    noop = np.zeros((1, 4), dtype=np.int32)
    for _ in range(2):
        _, _, dones, info = env.step(noop)
        assert not dones.any()
    obs, _, dones, info = env.step(noop)
    assert dones.all()
    assert info["reset"] == [True]
    assert env.state_digest(0) != ""
    assert obs.shape == first.shape


def test_bindings_match_native_runner(tmp_path):
    cfg = mc.default_config()
    cfg["max_episode_steps"] = 500
    for seed in range(10):
        path = tmp_path / f"ep{seed}.maclog"
        mc.run_episode(cfg, policies=["random"], seed=seed, log_path=path)
        log = mc.load_log(path)
        env = mc.BatchedEnv(cfg, num_envs=1, auto_reset=False)
        env.reset([seed])
        for t in range(len(log["actions"])):
            _, rewards, dones, _ = env.step(log["actions"][t][None, :])
            assert np.array_equal(rewards[0], log["rewards"][t]), (seed, t)
            assert bool(dones[0, 0]) == bool(log["dones"][t]), (seed, t)


def test_replay_gif_has_one_frame_per_step(tmp_path):
    from PIL import Image

    cfg = mc.default_config()
    cfg["max_episode_steps"] = 25
    path = tmp_path / "ep.maclog"
    summary = mc.run_episode(cfg, seed=3, log_path=path)
    rep = mc.replay(path, gif=tmp_path / "ep.gif", sprite=2)
    assert rep["steps"] == summary["steps"] == 25
    with Image.open(tmp_path / "ep.gif") as im:
        assert im.n_frames == 25


def test_metrics_from_logs(tmp_path):
    cfg = mc.default_config()
    paths = []
    for kind in ("solo", "full_expert", "half_expert"):
        for seed in range(2):
            p = tmp_path / f"{kind}{seed}.maclog"
            mc.run_episode(cfg, {"kind": kind, "horizon": 60}, seed=seed, log_path=p)
            paths.append(p)
    ct = mc.ct_from_logs(paths)
    assert "ct" in ct
    assert 0.0 <= mc.proximity(paths)["mean"] <= 1.0
    assert mc.tool_use(paths)["uniform_baseline"] == 0.25
    assert mc.achievements(paths[0])["episodes"] == 1


def test_cultural_transmission():
    value, _ = mc.cultural_transmission(14.44, 14.68, 15.44, 15.84)
    assert value == pytest.approx(-0.88 / 15.84)
    with pytest.raises(mc.MetricsError):
        mc.cultural_transmission(1, 2, 3, 0)


def test_bad_config_is_rejected():
    cfg = mc.default_config()
    cfg["n_agents"] = 0
    with pytest.raises(mc.ConfigError):
        mc.BatchedEnv(cfg)
