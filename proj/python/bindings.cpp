#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mac/metrics.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

mac::GameConfig parse_config(const std::string& text) {
  return text.empty() ? mac::validate_config(mac::GameConfig{}) : mac::config_from_json(json::parse(text));
}

mac::ScenarioSpec parse_scenario(const std::string& text) {
  return text.empty() ? mac::ScenarioSpec{} : mac::scenario_from_json(json::parse(text));
}

std::vector<mac::TrajectoryLog> read_logs(const std::vector<std::string>& paths) {
  std::vector<mac::TrajectoryLog> logs;
  for (const auto& p : paths) logs.push_back(mac::read_log(p));
  return logs;
}

py::tuple event_tuple(const mac::StepEvent& e) {
  return py::make_tuple(static_cast<int>(e.kind), e.agent, e.other, e.cell.row, e.cell.col, e.a, e.b, e.amount);
}

class PyBatchedEnv {
 public:
  PyBatchedEnv(const std::string& config, int num_envs, bool auto_reset)
      : env_(parse_config(config), num_envs, auto_reset) {}

  py::array_t<float> reset(const std::vector<uint64_t>& seeds) {
    if (static_cast<int>(seeds.size()) != env_.num_envs()) {
      throw std::invalid_argument("reset needs one seed per environment");
    }
    py::array_t<float> obs({env_.num_envs(), env_.n_agents(), static_cast<int>(env_.obs_size())});
    env_.reset(seeds, std::span<float>(obs.mutable_data(), obs.size()));
    return obs;
  }

  py::tuple step(py::array_t<int32_t, py::array::c_style | py::array::forcecast> actions) {
    const int k = env_.num_envs(), n = env_.n_agents();
    if (actions.size() != static_cast<py::ssize_t>(k) * n) {
      throw std::invalid_argument("actions must have shape (num_envs, n_agents)");
    }
    py::array_t<float> obs({k, n, static_cast<int>(env_.obs_size())});
    py::array_t<double> rewards({k, n});
    py::array_t<bool> dones({k, n});
    {
      py::gil_scoped_release release;
      env_.step(std::span<const int32_t>(actions.data(), actions.size()),
                std::span<float>(obs.mutable_data(), obs.size()),
                std::span<double>(rewards.mutable_data(), rewards.size()),
                std::span<uint8_t>(reinterpret_cast<uint8_t*>(dones.mutable_data()), dones.size()));
    }
    const auto& info = env_.info();
    py::list events;
    for (const auto& per_env : info.events) {
      py::list l;
      for (const auto& e : per_env) l.append(event_tuple(e));
      events.append(l);
    }
    py::dict d;
    d["events"] = events;
    d["invalid_actions"] = info.invalid_actions;
    d["reset"] = std::vector<bool>(info.reset.begin(), info.reset.end());
    return py::make_tuple(obs, rewards, dones, d);
  }

  int num_envs() const { return env_.num_envs(); }
  int n_agents() const { return env_.n_agents(); }
  std::size_t obs_size() const { return env_.obs_size(); }
  std::string manifest() const { return env_.manifest().to_json().dump(); }
  std::string config() const { return mac::config_to_json(env_.config()).dump(); }
  uint64_t seed(int env) const { return env_.seed(env); }
  std::string digest(int env) const { return mac::digest_state(env_.state(env)).hex(); }

 private:
  mac::BatchedEnv env_;
};

std::string run_episode(const std::string& config, const std::string& scenario, const std::vector<std::string>& policies,
                        uint64_t seed, const std::string& log_path) {
  const mac::GameConfig cfg = parse_config(config);
  const auto factory = mac::policy_factory(policies);
  std::vector<std::unique_ptr<mac::Policy>> owned;
  std::vector<mac::Policy*> ps;
  for (int i = 0; i < cfg.n_agents; ++i) {
    owned.push_back(factory(i));
    ps.push_back(owned.back().get());
  }
  const auto log = mac::run_episode(cfg, parse_scenario(scenario), ps, seed);
  if (!log_path.empty()) mac::write_log(log, log_path);
  json achievements = json::array();
  for (const auto& a : log.final_achievements) achievements.push_back(a.size());
  return json{{"seed", seed}, {"steps", log.step_count()}, {"achievements", achievements},
              {"invalid_actions", log.invalid_actions}}
      .dump();
}

py::dict load_log(const std::string& path) {
  const auto log = mac::read_log(path);
  const auto t = static_cast<py::ssize_t>(log.step_count());
  const py::ssize_t n = log.header.n_agents;
  py::array_t<int32_t> actions({t, n});
  py::array_t<double> rewards({t, n});
  py::array_t<bool> dones(t);
  auto a = actions.mutable_unchecked<2>();
  auto r = rewards.mutable_unchecked<2>();
  auto d = dones.mutable_unchecked<1>();
  for (py::ssize_t i = 0; i < t; ++i) {
    for (py::ssize_t j = 0; j < n; ++j) {
      a(i, j) = log.steps[i].actions[j];
      r(i, j) = log.steps[i].rewards[j];
    }
    d(i) = log.steps[i].done;
  }
  json header = {{"format_version", log.header.format_version}, {"config", log.header.config},
                 {"seed", log.header.seed},                     {"n_agents", log.header.n_agents},
                 {"scenario", log.header.scenario},             {"expert_slots", log.header.expert_slots},
                 {"notes", log.header.notes}};
  py::dict out;
  out["header"] = header.dump();
  out["actions"] = actions;
  out["rewards"] = rewards;
  out["dones"] = dones;
  out["invalid_actions"] = log.invalid_actions;
  return out;
}

std::string replay(const std::string& path, const std::string& gif, int sprite) {
  const auto log = mac::read_log(path);
  mac::ReplayOptions opt;
  if (!gif.empty()) opt.gif = gif;
  opt.sprite_size = sprite;
  const auto rep = mac::replay(log, opt);
  return json{{"steps", rep.steps}, {"frames", rep.frames}, {"final_digest", mac::digest_state(rep.final_state).hex()}}
      .dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-agent Craftax engine";
  m.attr("NUM_ACTIONS") = mac::kActionCount;
  m.attr("MANIFEST_VERSION") = mac::kManifestVersion;
  m.attr("LOG_FORMAT_VERSION") = mac::kLogFormatVersion;

  py::register_exception<mac::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<mac::LogError>(m, "LogError", PyExc_IOError);
  py::register_exception<mac::MetricsError>(m, "MetricsError", PyExc_ValueError);
  py::register_exception<mac::DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);

  py::class_<PyBatchedEnv>(m, "BatchedEnv")
      .def(py::init<const std::string&, int, bool>(), py::arg("config") = "", py::arg("num_envs") = 1,
           py::arg("auto_reset") = true)
      .def("reset", &PyBatchedEnv::reset, py::arg("seeds"))
      .def("step", &PyBatchedEnv::step, py::arg("actions"))
      .def_property_readonly("num_envs", &PyBatchedEnv::num_envs)
      .def_property_readonly("n_agents", &PyBatchedEnv::n_agents)
      .def_property_readonly("obs_size", &PyBatchedEnv::obs_size)
      .def("manifest_json", &PyBatchedEnv::manifest)
      .def("config_json", &PyBatchedEnv::config)
      .def("seed", &PyBatchedEnv::seed, py::arg("env"))
      .def("state_digest", &PyBatchedEnv::digest, py::arg("env"));

  m.def(
      "manifest_json", [](const std::string& config) { return mac::obs_manifest(parse_config(config)).to_json().dump(); },
      py::arg("config") = "");
  m.def(
      "default_config_json", [] { return mac::config_to_json(mac::GameConfig{}).dump(); });
  m.def("run_episode", &run_episode, py::arg("config") = "", py::arg("scenario") = "",
        py::arg("policies") = std::vector<std::string>{"random"}, py::arg("seed") = 0, py::arg("log_path") = "");
  m.def("load_log", &load_log, py::arg("path"));
  m.def("replay", &replay, py::arg("path"), py::arg("gif") = "", py::arg("sprite") = 8);
  m.def(
      "cultural_transmission",
      [](double a_full, double a_half, double a_solo, double e, double sd_full, double sd_half, double sd_solo,
         double sd_e) {
        mac::ScenarioScores s;
        s.a_full = a_full;
        s.a_half = a_half;
        s.a_solo = a_solo;
        s.e = e;
        s.sd_full = sd_full;
        s.sd_half = sd_half;
        s.sd_solo = sd_solo;
        s.sd_e = sd_e;
        const auto ct = mac::cultural_transmission(s);
        return py::make_tuple(ct.value, ct.std);
      },
      py::arg("a_full"), py::arg("a_half"), py::arg("a_solo"), py::arg("e"), py::arg("sd_full") = 0.0,
      py::arg("sd_half") = 0.0, py::arg("sd_solo") = 0.0, py::arg("sd_e") = 0.0);
  m.def(
      "ct_from_logs_json",
      [](const std::vector<std::string>& paths, const std::string& kind) {
        const auto s = mac::scores_from_logs(read_logs(paths),
                                             kind == "rewards" ? mac::ScoreKind::rewards : mac::ScoreKind::achievements);
        return mac::ct_to_json(s, mac::cultural_transmission(s)).dump();
      },
      py::arg("paths"), py::arg("kind") = "achievements");
  m.def(
      "proximity_json", [](const std::vector<std::string>& paths) {
        return mac::proximity_fraction(read_logs(paths)).to_json().dump();
      },
      py::arg("paths"));
  m.def(
      "tool_use_json", [](const std::vector<std::string>& paths) {
        return mac::tool_use_stats(read_logs(paths)).to_json().dump();
      },
      py::arg("paths"));
  m.def(
      "achievements_json", [](const std::vector<std::string>& paths) {
        return mac::achievement_summary(read_logs(paths)).to_json().dump();
      },
      py::arg("paths"));
}
