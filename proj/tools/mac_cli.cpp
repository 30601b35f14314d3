// Command-line front end: run, metrics, replay, bench, map.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "mac/metrics.hpp"
#include "mac/runner.hpp"
#include "mac/worldgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliError : std::runtime_error {
  CliError(std::string kind, const std::string& message, json details = json::object())
      : std::runtime_error(message), kind(std::move(kind)), details(std::move(details)) {}
  std::string kind;
  json details;
};

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw CliError("io", "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw CliError("parse", path.string() + ": " + e.what());
  }
}

mac::GameConfig load_config(const std::string& path) {
  if (path.empty()) return mac::validate_config({});
  return mac::validate_config(mac::config_from_json(read_json_file(path)));
}

std::vector<uint64_t> parse_seeds(const std::string& text) {
  std::vector<uint64_t> seeds;
  std::stringstream ss(text);
  std::string part;
  try {
    while (std::getline(ss, part, ',')) {
      if (part.empty()) continue;
      const auto dash = part.find('-', 1);
      if (dash == std::string::npos) {
        seeds.push_back(std::stoull(part));
        continue;
      }
      const uint64_t lo = std::stoull(part.substr(0, dash));
      const uint64_t hi = std::stoull(part.substr(dash + 1));
      if (hi < lo) throw std::invalid_argument(part);
      for (uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    }
  } catch (const std::logic_error&) {
    throw CliError("usage", "bad --seeds value '" + text + "' (use e.g. 0-99 or 1,5,9)");
  }
  if (seeds.empty()) throw CliError("usage", "--seeds selects no seeds");
  return seeds;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep)) out.push_back(part);
  return out;
}

mac::RewardScenario parse_reward(const std::string& text) {
  const auto parts = split(text, ':');
  json j = {{"kind", parts.at(0)}};
  if (parts.size() > 1) j["beta"] = std::stod(parts[1]);
  return mac::config_from_json({{"reward_scenario", j}}).reward_scenario;
}

mac::ScenarioSpec parse_scenario(const std::string& text) {
  if (fs::exists(text)) return mac::scenario_from_json(read_json_file(text));
  const auto kind = mac::scenario_kind_from_name(text);
  if (!kind) throw CliError("usage", "unknown scenario '" + text + "' (solo, full_expert, half_expert or a JSON file)");
  mac::ScenarioSpec spec;
  spec.kind = *kind;
  return spec;
}

std::vector<fs::path> collect_logs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::set<fs::path> found;
      for (const auto& e : fs::recursive_directory_iterator(in)) {
        if (e.is_regular_file() && e.path().extension() == ".maclog") found.insert(e.path());
      }
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.emplace_back(in);
    }
  }
  if (out.empty()) throw CliError("usage", "no log files found");
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw CliError("io", "write failed: " + path.string());
}

struct RunArgs {
  std::string config, scenario = "full_expert", seeds = "0", policy = "random", out_dir = "runs", reward;
  int parallelism = 0;
  int64_t horizon = 0;
  bool fixed = false;
  int64_t half_k = 50;
};

int cmd_run(const RunArgs& a) {
  mac::GameConfig cfg = load_config(a.config);
  mac::ScenarioSpec spec = parse_scenario(a.scenario);
  spec.half_k = a.half_k;
  spec.reward = a.reward.empty() ? cfg.reward_scenario : parse_reward(a.reward);
  if (a.fixed) spec.fixed_timestep = true;
  if (a.horizon > 0) spec.horizon = a.horizon;
  const auto seeds = parse_seeds(a.seeds);
  const auto factory = mac::policy_factory(split(a.policy, ','));

  fs::create_directories(a.out_dir);
  const auto result = mac::run_batch(cfg, spec, factory, seeds, a.parallelism);
  const mac::GameConfig applied = mac::apply_scenario(cfg, spec);
  write_text(fs::path(a.out_dir) / "manifest.json", mac::obs_manifest(applied).to_json().dump(2) + "\n");
  write_text(fs::path(a.out_dir) / "config.json", mac::config_to_json(applied).dump(2) + "\n");

  json episodes = json::array();
  for (const auto& o : result.episodes) {
    json e = {{"seed", o.seed}};
    if (o.ok()) {
      const auto path = fs::path(a.out_dir) / ("episode_" + std::to_string(o.seed) + ".maclog");
      mac::write_log(*o.log, path);
      e["log"] = path.string();
      e["steps"] = o.steps;
      e["achievements"] = o.achievements;
      e["final_digest"] = o.final_digest.hex();
    } else {
      e["error"] = o.error;
    }
    episodes.push_back(e);
  }
  const json summary = {{"scenario", mac::scenario_to_json(spec)},
                        {"episodes", episodes},
                        {"failed", result.failed},
                        {"mean_achievements", result.mean_achievements},
                        {"mean_steps", result.mean_steps}};
  write_text(fs::path(a.out_dir) / "summary.json", summary.dump(2) + "\n");
  std::cout << json{{"episodes", result.episodes.size()},
                    {"failed", result.failed},
                    {"mean_achievements", result.mean_achievements},
                    {"mean_steps", result.mean_steps},
                    {"out_dir", a.out_dir}}
                   .dump()
            << "\n";
  return result.failed == 0 ? 0 : 4;
}

struct MetricsArgs {
  std::vector<std::string> logs;
  std::string report, format = "json", scores, score_kind = "achievements";
};

int cmd_metrics(MetricsArgs a) {
  if (a.report.empty()) a.report = a.scores.empty() ? "achievements" : "ct";
  auto emit = [&](const json& j, const std::string& csv) { std::cout << (a.format == "csv" ? csv : j.dump(2) + "\n"); };
  if (!a.scores.empty()) {
    if (a.report != "ct") throw CliError("usage", "--scores only applies to --report ct");
    const auto parts = split(a.scores, ',');
    if (parts.size() != 4 && parts.size() != 8) {
      throw CliError("usage", "--scores takes a_full,a_half,a_solo,e[,sd_full,sd_half,sd_solo,sd_e]");
    }
    mac::ScenarioScores s;
    std::vector<double> v;
    for (const auto& p : parts) v.push_back(std::stod(p));
    s.a_full = v[0];
    s.a_half = v[1];
    s.a_solo = v[2];
    s.e = v[3];
    if (v.size() == 8) {
      s.sd_full = v[4];
      s.sd_half = v[5];
      s.sd_solo = v[6];
      s.sd_e = v[7];
    }
    const auto ct = mac::cultural_transmission(s);
    emit(mac::ct_to_json(s, ct), mac::ct_to_csv(s, ct));
    return 0;
  }
  std::vector<mac::TrajectoryLog> logs;
  for (const auto& p : collect_logs(a.logs)) logs.push_back(mac::read_log(p));
  if (a.report == "ct") {
    const auto kind = a.score_kind == "rewards" ? mac::ScoreKind::rewards : mac::ScoreKind::achievements;
    const auto s = mac::scores_from_logs(logs, kind);
    const auto ct = mac::cultural_transmission(s);
    emit(mac::ct_to_json(s, ct), mac::ct_to_csv(s, ct));
  } else if (a.report == "proximity") {
    const auto r = mac::proximity_fraction(logs);
    emit(r.to_json(), r.to_csv());
  } else if (a.report == "tools") {
    const auto r = mac::tool_use_stats(logs);
    emit(r.to_json(), r.to_csv());
  } else {
    const auto r = mac::achievement_summary(logs);
    emit(r.to_json(), r.to_csv());
  }
  return 0;
}

int cmd_replay(const std::string& log_path, const std::string& gif, int sprite) {
  const auto log = mac::read_log(log_path);
  mac::ReplayOptions opts;
  if (!gif.empty()) opts.gif = gif;
  opts.sprite_size = sprite;
  const auto report = mac::replay(log, opts);
  json out = {{"log", log_path},
              {"steps", report.steps},
              {"frames", report.frames},
              {"divergences", 0},
              {"final_digest", mac::digest_state(report.final_state).hex()}};
  if (!log.header.notes.empty()) out["notes"] = log.header.notes;
  std::cout << out.dump() << "\n";
  return 0;
}

int cmd_bench(const std::string& config, const mac::BenchOptions& opts) {
  const auto report = mac::bench(load_config(config), opts);
  std::cout << report.to_json().dump(2) << "\n";
  return 0;
}

int cmd_map(const std::string& config, uint64_t seed, bool overlay) {
  std::cout << mac::dump_text_map(mac::generate_world(load_config(config), seed), overlay);
  return 0;
}

int fail(const std::string& kind, const std::string& message, json details = json::object()) {
  json err = {{"error", kind}, {"message", message}};
  for (auto& [k, v] : details.items()) err[k] = v;
  std::cerr << err.dump() << "\n";
  return kind == "usage" ? 2 : kind == "divergence" ? 3 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent Craftax engine and social-learning metrics"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run episodes and write trajectory logs");
  run_cmd->add_option("--config", run.config, "Config JSON (defaults if omitted)");
  run_cmd->add_option("--scenario", run.scenario, "solo | full_expert | half_expert | scenario JSON file");
  run_cmd->add_option("--seeds", run.seeds, "Seed list, e.g. 0-99 or 1,5,9");
  run_cmd->add_option("--policy", run.policy, "random | survivor | noop, or a comma list per slot");
  run_cmd->add_option("--out-dir", run.out_dir, "Output directory");
  run_cmd->add_option("--parallelism", run.parallelism, "Worker threads (0 = all cores)");
  run_cmd->add_option("--horizon", run.horizon, "Episode length cap");
  run_cmd->add_option("--half-k", run.half_k, "Steps the expert stays visible in half_expert");
  run_cmd->add_option("--reward", run.reward, "independent | shared | attack | proximity:BETA");
  run_cmd->add_flag("--fixed-timestep", run.fixed, "Run to the horizon even when everyone is dead");

  MetricsArgs metrics;
  auto* metrics_cmd = app.add_subcommand("metrics", "Compute reports over trajectory logs");
  metrics_cmd->add_option("--logs", metrics.logs, "Log files or directories");
  metrics_cmd->add_option("--report", metrics.report)->check(CLI::IsMember({"ct", "proximity", "tools", "achievements"}));
  metrics_cmd->add_option("--format", metrics.format)->check(CLI::IsMember({"csv", "json"}));
  metrics_cmd->add_option("--scores", metrics.scores, "CT from explicit a_full,a_half,a_solo,e[,sds]");
  metrics_cmd->add_option("--score-kind", metrics.score_kind)->check(CLI::IsMember({"achievements", "rewards"}));

  std::string log_path, gif;
  int sprite = 8;
  auto* replay_cmd = app.add_subcommand("replay", "Re-simulate a log and check it");
  replay_cmd->add_option("--log", log_path)->required();
  replay_cmd->add_option("--gif", gif, "Write an animated GIF, one frame per step");
  replay_cmd->add_option("--sprite", sprite, "Pixels per cell");

  std::string bench_config;
  mac::BenchOptions bench_opts;
  auto* bench_cmd = app.add_subcommand("bench", "Measure stepping throughput");
  bench_cmd->add_option("--config", bench_config);
  bench_cmd->add_option("--duration", bench_opts.duration_seconds, "Seconds per measurement");
  bench_cmd->add_option("--policy", bench_opts.policy);
  bench_cmd->add_option("--instances", bench_opts.batched_instances);
  bench_cmd->add_option("--threads", bench_opts.parallelism);

  std::string map_config;
  uint64_t map_seed = 0;
  bool overlay = false;
  auto* map_cmd = app.add_subcommand("map", "Print a generated map as text");
  map_cmd->add_option("--config", map_config);
  map_cmd->add_option("--seed", map_seed);
  map_cmd->add_flag("--overlay", overlay, "Draw players and mobs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*metrics_cmd) return cmd_metrics(metrics);
    if (*replay_cmd) return cmd_replay(log_path, gif, sprite);
    if (*bench_cmd) return cmd_bench(bench_config, bench_opts);
    if (*map_cmd) return cmd_map(map_config, map_seed, overlay);
  } catch (const CliError& e) {
    return fail(e.kind, e.what(), e.details);
  } catch (const mac::ConfigError& e) {
    json issues = json::array();
    for (const auto& i : e.issues()) issues.push_back({{"field", i.field}, {"message", i.message}});
    return fail("config", e.what(), {{"issues", issues}});
  } catch (const mac::DivergenceError& e) {
    return fail("divergence", e.what(), {{"step", e.step()}});
  } catch (const mac::LogError& e) {
    return fail("log", e.what());
  } catch (const mac::MetricsError& e) {
    return fail("metrics", e.what());
  } catch (const mac::GenerationError& e) {
    return fail("generation", e.what());
  } catch (const std::invalid_argument& e) {
    return fail("usage", e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return 0;
}
