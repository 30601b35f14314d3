#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fixtures.hpp"
#include "mac/runner.hpp"
#include "stats.hpp"

using namespace mac;
namespace fs = std::filesystem;

namespace {

// Trainable stand-in that records what it was shown.
class LearnerProbe : public Policy {
 public:
  std::string name() const override { return "probe"; }
  int act(std::span<const float>, Rng& rng) override { return static_cast<int>(rng.uniform_int(kActionCount)); }
  bool trainable() const override { return true; }
  void on_transition(const Transition&) override { ++callbacks; }
  int64_t callbacks = 0;
};

// Returns out-of-range indices every other step.
class SloppyPolicy : public Policy {
 public:
  std::string name() const override { return "sloppy"; }
  int act(std::span<const float>, Rng&) override { return (flip = !flip) ? 99 : -3; }
  bool flip = false;
};

std::vector<Policy*> raw(std::vector<std::unique_ptr<Policy>>& owned) {
  std::vector<Policy*> out;
  for (auto& p : owned) out.push_back(p.get());
  return out;
}

std::vector<std::unique_ptr<Policy>> randoms(int n) {
  std::vector<std::unique_ptr<Policy>> out;
  for (int i = 0; i < n; ++i) out.push_back(std::make_unique<RandomPolicy>());
  return out;
}

std::vector<uint64_t> seed_range(uint64_t n, uint64_t from = 0) {
  std::vector<uint64_t> s(n);
  for (uint64_t i = 0; i < n; ++i) s[i] = from + i;
  return s;
}

fs::path scratch_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("mac_runner_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

TrajectoryLog sample_log(uint64_t seed = 4) {
  auto ps = randoms(4);
  auto ptrs = raw(ps);
  return run_episode(GameConfig{}, ScenarioSpec{}, ptrs, seed);
}

}  // namespace

// ---- policies ----

TEST_CASE("random policy is uniform over the 17 actions") {
  RandomPolicy p;
  Rng rng = Rng::from_seed(77);
  std::vector<int64_t> counts(kActionCount, 0);
  const std::vector<float> obs(10, 0.0f);
  for (int i = 0; i < 1000000; ++i) {
    const int a = p.act(obs, rng);
    REQUIRE(a >= 0);
    REQUIRE(a < kActionCount);
    ++counts[a];
  }
  CHECK(stats::chi2_sf(stats::chi2_uniform(counts), kActionCount - 1) > 0.01);
}

TEST_CASE("random policy is reproducible under a fixed rng") {
  RandomPolicy p;
  Rng a = Rng::from_seed(3), b = Rng::from_seed(3);
  const std::vector<float> obs(10, 0.0f);
  for (int i = 0; i < 100; ++i) CHECK(p.act(obs, a) == p.act(obs, b));
}

TEST_CASE("policy factory") {
  CHECK(make_policy("random")->name() == "random");
  CHECK(make_policy("noop")->name() == "noop");
  CHECK(make_policy("survivor")->name() == "survivor");
  CHECK_THROWS_AS(make_policy("genius"), std::invalid_argument);
  const auto f = policy_factory(std::vector<std::string>{"survivor", "random"});
  CHECK(f(0)->name() == "survivor");
  CHECK(f(1)->name() == "random");
}

TEST_CASE("survivor outlives random over 200 seeds") {
  GameConfig cfg;
  ScenarioSpec spec;
  spec.horizon = 1500;
  const auto seeds = seed_range(200);
  RunOptions light;
  light.record_steps = false;
  const auto random = run_batch(cfg, spec, policy_factory("random"), seeds, 1, light);
  const auto survivor = run_batch(cfg, spec, policy_factory("survivor"), seeds, 1, light);
  REQUIRE(random.failed == 0);
  REQUIRE(survivor.failed == 0);
  MESSAGE("mean episode length random=" << random.mean_steps << " survivor=" << survivor.mean_steps);
  CHECK(survivor.mean_steps > random.mean_steps);
}

// ---- scenarios ----

TEST_CASE("scenario names and json") {
  CHECK(name(ScenarioKind::half_expert) == "half_expert");
  CHECK(scenario_kind_from_name("solo") == ScenarioKind::solo);
  CHECK(scenario_kind_from_name("full") == ScenarioKind::full_expert);
  CHECK_FALSE(scenario_kind_from_name("party").has_value());
  ScenarioSpec s;
  s.kind = ScenarioKind::half_expert;
  s.half_k = 30;
  s.reward = {RewardKind::proximity, 0.5};
  s.horizon = 700;
  s.fixed_timestep = true;
  s.learner = 2;
  CHECK(scenario_from_json(scenario_to_json(s)) == s);
}

TEST_CASE("apply_scenario sets the visibility schedule") {
  GameConfig cfg;
  ScenarioSpec s;
  CHECK(expert_slots(s, 4) == std::vector<int>{1, 2, 3});
  s.kind = ScenarioKind::solo;
  auto c = apply_scenario(cfg, s);
  REQUIRE(c.expert_schedule.size() == 4);
  CHECK(c.expert_schedule[0] == VisibilityRule::always());
  CHECK(c.expert_schedule[1] == VisibilityRule::never());
  s.kind = ScenarioKind::half_expert;
  c = apply_scenario(cfg, s);
  CHECK(c.expert_schedule[3] == VisibilityRule::first_k(50));
  s.kind = ScenarioKind::full_expert;
  s.horizon = 123;
  s.fixed_timestep = true;
  c = apply_scenario(cfg, s);
  CHECK(c.expert_schedule[2] == VisibilityRule::always());
  CHECK(c.max_episode_steps == 123);
  CHECK(c.fixed_timestep_mode);
}

TEST_CASE("half_expert: expert visible at t=49 and zeroed at t=50") {
  GameConfig cfg = fixtures::still_config(20, 12, 2);
  cfg.max_episode_steps = 60;
  const WorldState w = fixtures::proximity_world();
  ScenarioSpec spec;
  spec.kind = ScenarioKind::half_expert;

  struct Watcher : Policy {
    std::vector<bool> expert_seen;
    ObsManifest m;
    std::string name() const override { return "watcher"; }
    void reset(const GameConfig& c, int) override { m = obs_manifest(c); }
    int act(std::span<const float> obs, Rng&) override {
      bool any = false;
      for (std::size_t i = 0; i < m.other_block_size; ++i) any |= obs[m.other_block_offset(0) + i] != 0.0f;
      expert_seen.push_back(any);
      return 0;
    }
  };
  Watcher learner;
  // The expert walks next to the learner and stays there.
  ScriptedPolicy expert(std::vector<Action>(9, Action::left));
  std::vector<Policy*> ps = {&learner, &expert};
  run_episode_from(cfg, spec, w, ps, 0);
  REQUIRE(learner.expert_seen.size() == 60);
  CHECK(learner.expert_seen[49]);
  CHECK_FALSE(learner.expert_seen[50]);
  for (std::size_t t = 50; t < 60; ++t) CHECK_FALSE(learner.expert_seen[t]);
}

TEST_CASE("expert slots must be frozen and receive no callbacks") {
  GameConfig cfg;
  ScenarioSpec spec;
  spec.horizon = 50;
  LearnerProbe learner;
  RandomPolicy e1, e2, e3;
  std::vector<Policy*> ps = {&learner, &e1, &e2, &e3};
  const auto log = run_episode(cfg, spec, ps, 3);
  CHECK(learner.callbacks == static_cast<int64_t>(log.step_count()));
  CHECK(log.learning_callbacks == std::vector<int64_t>{static_cast<int64_t>(log.step_count()), 0, 0, 0});

  LearnerProbe trainable_expert;
  std::vector<Policy*> bad = {&e1, &trainable_expert, &e2, &e3};
  CHECK_THROWS_AS(run_episode(cfg, spec, bad, 3), std::invalid_argument);
}

// ---- episodes ----

TEST_CASE("all-NOOP episode without mobs ends by starvation") {
  GameConfig cfg;
  cfg.zombie_cap = cfg.skeleton_cap = cfg.cow_cap = cfg.arrow_cap = 0;
  const int64_t expected = static_cast<int64_t>(cfg.intrinsic_decay_interval) * (2 * kMaxStat - 1);
  std::vector<std::unique_ptr<Policy>> ps;
  for (int i = 0; i < 4; ++i) ps.push_back(std::make_unique<NoopPolicy>());
  auto ptrs = raw(ps);
  const auto log = run_episode(cfg, ScenarioSpec{}, ptrs, 6);
  CHECK(static_cast<int64_t>(log.step_count()) == expected);
  CHECK(log.steps.back().done);
  int deaths = 0;
  for (const auto& rec : log.steps)
    for (const auto& e : rec.events) deaths += e.kind == EventKind::death;
  CHECK(deaths == 4);
}

TEST_CASE("fixed-timestep horizon gives exactly that many steps") {
  GameConfig cfg;
  ScenarioSpec spec;
  spec.fixed_timestep = true;
  spec.horizon = 500;
  auto ps = randoms(4);
  auto ptrs = raw(ps);
  const auto log = run_episode(cfg, spec, ptrs, 2);
  CHECK(log.step_count() == 500);
}

TEST_CASE("invalid actions become NOOP and are counted") {
  GameConfig cfg;
  ScenarioSpec spec;
  spec.horizon = 10;
  SloppyPolicy a, b, c, d;
  std::vector<Policy*> ps = {&a, &b, &c, &d};
  const auto log = run_episode(cfg, spec, ps, 1);
  CHECK(log.invalid_actions == 40);
  for (const auto& rec : log.steps) CHECK(rec.actions == std::vector<uint8_t>(4, 0));
}

TEST_CASE("policy count must match") {
  auto ps = randoms(3);
  auto ptrs = raw(ps);
  CHECK_THROWS_AS(run_episode(GameConfig{}, ScenarioSpec{}, ptrs, 1), std::invalid_argument);
}

// ---- batches ----

TEST_CASE("batch results do not depend on parallelism") {
  GameConfig cfg;
  const auto seeds = seed_range(16, 100);
  const auto one = run_batch(cfg, ScenarioSpec{}, policy_factory("random"), seeds, 1);
  const auto many = run_batch(cfg, ScenarioSpec{}, policy_factory("random"), seeds, 8);
  REQUIRE(one.episodes.size() == 16);
  REQUIRE(many.episodes.size() == 16);
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(one.episodes[i].seed == seeds[i]);
    CHECK(one.episodes[i].final_digest == many.episodes[i].final_digest);
    CHECK(*one.episodes[i].log == *many.episodes[i].log);
  }
  CHECK(one.mean_achievements == many.mean_achievements);
  CHECK(one.mean_steps == many.mean_steps);
}

TEST_CASE("batch aggregate is the mean of per-episode scores") {
  GameConfig cfg;
  RunOptions light;
  light.record_steps = false;
  const auto seeds = seed_range(100);
  const auto r = run_batch(cfg, ScenarioSpec{}, policy_factory("random"), seeds, 2, light);
  REQUIRE(r.episodes.size() == 100);
  CHECK(r.failed == 0);
  std::vector<double> sums(4, 0.0);
  double steps = 0;
  for (const auto& e : r.episodes) {
    REQUIRE(e.ok());
    for (int i = 0; i < 4; ++i) sums[i] += e.achievements[i];
    steps += e.steps;
  }
  for (int i = 0; i < 4; ++i) CHECK(r.mean_achievements[i] == doctest::Approx(sums[i] / 100));
  CHECK(r.mean_steps == doctest::Approx(steps / 100));
}

TEST_CASE("duplicate seeds are rejected") {
  const std::vector<uint64_t> seeds = {1, 2, 1};
  CHECK_THROWS_AS(run_batch(GameConfig{}, ScenarioSpec{}, policy_factory("random"), seeds, 1), std::invalid_argument);
}

TEST_CASE("a failing episode is recorded without aborting the batch") {
  GameConfig cfg;
  PolicyFactory factory = [](int agent) -> std::unique_ptr<Policy> {
    if (agent == 1) return std::make_unique<LearnerProbe>();
    return std::make_unique<RandomPolicy>();
  };
  const auto seeds = seed_range(3);
  const auto r = run_batch(cfg, ScenarioSpec{}, factory, seeds, 1);
  CHECK(r.failed == 3);
  for (const auto& e : r.episodes) CHECK_FALSE(e.error.empty());
}

// ---- logs ----

TEST_CASE("log write/read round trip") {
  const auto log = sample_log();
  const auto dir = scratch_dir("roundtrip");
  write_log(log, dir / "a.maclog");
  const auto back = read_log(dir / "a.maclog");
  CHECK(back == log);
  CHECK(back.header.notes.empty());
  CHECK(encode_log(back) == encode_log(log));
  fs::remove_all(dir);
}

TEST_CASE("truncated or corrupt logs fail the checksum") {
  const auto bytes = encode_log(sample_log());
  auto cut = bytes;
  cut.resize(cut.size() - 7);
  try {
    decode_log(cut);
    FAIL("expected LogError");
  } catch (const LogError& e) {
    CHECK(std::string(e.what()).find("checksum error") != std::string::npos);
  }
  auto flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x40;
  CHECK_THROWS_WITH_AS(decode_log(flipped), doctest::Contains("checksum error"), LogError);
  const std::vector<uint8_t> tiny = {1, 2, 3};
  CHECK_THROWS_WITH_AS(decode_log(tiny), doctest::Contains("checksum error"), LogError);
}

TEST_CASE("older minor format is migrated, newer is rejected") {
  auto ps = randoms(4);
  auto ptrs = raw(ps);
  RunOptions old;
  old.record_digests = false;
  const auto log = run_episode(GameConfig{}, ScenarioSpec{}, ptrs, 8, old);
  CHECK(log.header.format_version == "1.0");
  const auto back = decode_log(encode_log(log));
  CHECK(back.header.format_version == kLogFormatVersion);
  REQUIRE(back.header.notes.size() == 1);
  CHECK(back.header.notes[0].find("1.0") != std::string::npos);
  CHECK(replay(back).steps == static_cast<int64_t>(log.step_count()));

  auto newer = sample_log();
  newer.header.format_version = "1.2";
  CHECK_THROWS_AS(encode_log(newer), LogError);
  newer.header.format_version = "2.0";
  CHECK_THROWS_AS(encode_log(newer), LogError);
}

TEST_CASE("reader rejects newer versions written by someone else") {
  // Patch the version in the JSON header and recompute the checksum by hand.
  const auto bytes = encode_log(sample_log());
  const uint32_t header_len = bytes[8] | bytes[9] << 8 | bytes[10] << 16 | static_cast<uint32_t>(bytes[11]) << 24;
  std::string header(bytes.begin() + 12, bytes.begin() + 12 + header_len);
  const auto pos = header.find("\"1.1\"");
  REQUIRE(pos != std::string::npos);
  for (const char* v : {"\"1.7\"", "\"2.1\""}) {
    std::string h = header;
    h.replace(pos, 5, v);
    std::vector<uint8_t> patched(bytes.begin(), bytes.begin() + 12);
    patched.insert(patched.end(), h.begin(), h.end());
    patched.insert(patched.end(), bytes.begin() + 12 + header_len, bytes.end() - 16);
    const auto sum = hash_bytes(patched);
    ByteWriter w;
    w.u64(sum.hi);
    w.u64(sum.lo);
    patched.insert(patched.end(), w.data().begin(), w.data().end());
    CHECK_THROWS_WITH_AS(decode_log(patched), doctest::Contains("version error"), LogError);
  }
}

// ---- replay ----

TEST_CASE("replay of a fresh log has no divergence") {
  const auto log = sample_log(12);
  const auto report = replay(log);
  CHECK(report.steps == static_cast<int64_t>(log.step_count()));
  REQUIRE(report.digests.size() == log.step_count());
  for (std::size_t i = 0; i < log.step_count(); ++i) CHECK(report.digests[i] == *log.steps[i].digest);
}

TEST_CASE("a tampered action diverges at that step") {
  auto log = sample_log(13);
  REQUIRE(log.step_count() > 40);
  // Find a step whose action change actually alters the outcome.
  bool diverged = false;
  for (std::size_t t = 30; t < log.step_count() && !diverged; ++t) {
    auto tampered = log;
    auto& a = tampered.steps[t].actions[0];
    a = a == static_cast<uint8_t>(Action::left) ? static_cast<uint8_t>(Action::right)
                                                 : static_cast<uint8_t>(Action::left);
    try {
      replay(tampered);
    } catch (const DivergenceError& e) {
      diverged = true;
      CHECK(e.step() == static_cast<int64_t>(t) + 1);
      CHECK(std::string(e.what()).find(std::to_string(t + 1)) != std::string::npos);
    }
  }
  CHECK(diverged);
}

TEST_CASE("replay --gif writes one frame per step") {
  const auto log = sample_log(14);
  const auto dir = scratch_dir("gif");
  ReplayOptions opt;
  opt.gif = dir / "r.gif";
  opt.sprite_size = 2;
  const auto report = replay(log, opt);
  CHECK(report.frames == static_cast<int64_t>(log.step_count()));
  CHECK(fs::file_size(dir / "r.gif") > 100);
  fs::remove_all(dir);
}

TEST_CASE("logs of scripted fixtures carry their initial state") {
  const GameConfig cfg = fixtures::walkthrough_config();
  ScriptedPolicy p(fixtures::walkthrough_script());
  std::vector<Policy*> ps = {&p};
  const auto log = run_episode_from(cfg, ScenarioSpec{}, fixtures::walkthrough_world(), ps, 0);
  REQUIRE(log.header.initial_state.has_value());
  CHECK(log.final_achievements[0].size() == kAchievementCount);
  const auto back = decode_log(encode_log(log));
  CHECK(replay(back).final_state.players[0].achievements.size() == kAchievementCount);
}

// ---- batched env ----

TEST_CASE("batched env reset and shapes") {
  GameConfig cfg;
  BatchedEnv env(cfg, 1);
  std::vector<float> obs(env.obs_size() * 4);
  const std::vector<uint64_t> seeds = {5};
  env.reset(seeds, obs);
  CHECK(env.obs_size() == obs_manifest(cfg).total);
  std::vector<float> again(obs.size());
  env.reset(seeds, again);
  CHECK(obs == again);
  for (float x : obs) {
    REQUIRE(x >= 0.0f);
    REQUIRE(x <= 1.0f);
  }
  const std::vector<uint64_t> wrong = {1, 2};
  CHECK_THROWS(env.reset(wrong, obs));
}

TEST_CASE("batched env matches the native runner") {
  GameConfig cfg;
  const int k = 3;
  BatchedEnv env(cfg, k, false);
  const std::vector<uint64_t> seeds = {7, 8, 9};
  std::vector<float> obs(env.obs_size() * 4 * k);
  env.reset(seeds, obs);
  std::vector<WorldState> native;
  for (auto s : seeds) native.push_back(generate_world(cfg, s));
  Rng rng = Rng::from_seed(1);
  std::vector<int32_t> actions(4 * k);
  std::vector<double> rewards(4 * k);
  std::vector<uint8_t> dones(4 * k);
  for (int t = 0; t < 200; ++t) {
    for (auto& a : actions) a = static_cast<int32_t>(rng.uniform_int(kActionCount));
    env.step(actions, obs, rewards, dones);
    for (int e = 0; e < k; ++e) {
      if (native[e].terminated) continue;
      std::vector<Action> acts(4);
      for (int i = 0; i < 4; ++i) acts[i] = static_cast<Action>(actions[e * 4 + i]);
      const auto r = step(cfg, native[e], acts);
      for (int i = 0; i < 4; ++i) REQUIRE(rewards[e * 4 + i] == r.rewards[i]);
      REQUIRE(env.info().events[e] == r.events);
      REQUIRE(digest_state(env.state(e)) == digest_state(native[e]));
    }
  }
}

TEST_CASE("batched env auto-resets finished episodes") {
  GameConfig cfg;
  cfg.max_episode_steps = 5;
  BatchedEnv env(cfg, 2, true);
  const std::vector<uint64_t> seeds = {1, 2};
  std::vector<float> obs(env.obs_size() * 8);
  env.reset(seeds, obs);
  std::vector<int32_t> actions(8, 0);
  std::vector<double> rewards(8);
  std::vector<uint8_t> dones(8);
  for (int t = 0; t < 4; ++t) {
    env.step(actions, obs, rewards, dones);
    CHECK(dones[0] == 0);
  }
  env.step(actions, obs, rewards, dones);
  CHECK(dones == std::vector<uint8_t>(8, 1));
  CHECK(env.info().reset[0] == 1);
  CHECK(env.state(0).step == 0);
  CHECK(env.seed(0) == 1);
  // The returned observation is the reset one.
  std::vector<float> fresh(env.obs_size());
  encode_symbolic(cfg, obs_manifest(cfg), generate_world(cfg, auto_reset_seed(1, 1)), 0, fresh);
  CHECK(std::equal(fresh.begin(), fresh.end(), obs.begin()));
}

TEST_CASE("batched env flags out-of-range actions") {
  GameConfig cfg;
  BatchedEnv env(cfg, 1);
  const std::vector<uint64_t> seeds = {3};
  std::vector<float> obs(env.obs_size() * 4);
  env.reset(seeds, obs);
  std::vector<int32_t> actions = {0, 17, -1, 4};
  std::vector<double> rewards(4);
  std::vector<uint8_t> dones(4);
  env.step(actions, obs, rewards, dones);
  CHECK(env.info().invalid_actions[0] == 2);
}

// ---- bench ----

TEST_CASE("bench reports agent-steps as env-steps times agents") {
  BenchOptions opt;
  opt.duration_seconds = 0.2;
  opt.batched_instances = 2;
  opt.parallelism = 1;
  const auto r = bench(GameConfig{}, opt);
  CHECK(r.n_agents == 4);
  CHECK(r.single_agent_steps_per_sec == doctest::Approx(r.single_env_steps_per_sec * 4));
  CHECK(r.single_agent_steps_per_sec > 0);
  CHECK(r.logged_agent_steps_per_sec > 0);
  CHECK(r.batched_agent_steps_per_sec > 0);
  const auto j = r.to_json();
  CHECK(j.contains("phase_seconds"));
}
