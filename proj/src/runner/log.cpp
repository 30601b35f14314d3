#include <fstream>
#include <iterator>

#include "mac/runner.hpp"
#include "mac/worldgen.hpp"

namespace mac {

namespace {

constexpr char kMagic[8] = {'M', 'A', 'C', 'L', 'O', 'G', '\r', '\n'};
constexpr std::size_t kChecksumSize = 16;

std::string to_hex(std::span<const uint8_t> bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 15]);
  }
  return out;
}

std::vector<uint8_t> from_hex(const std::string& s) {
  if (s.size() % 2 != 0) throw LogError("initial_state: odd hex length");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    throw LogError("initial_state: bad hex digit");
  };
  std::vector<uint8_t> out(s.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<uint8_t>(nibble(s[2 * i]) << 4 | nibble(s[2 * i + 1]));
  return out;
}

StateDigest digest_from_hex(const std::string& s) {
  if (s.size() != 32) throw LogError("bad digest '" + s + "'");
  const auto bytes = from_hex(s);
  StateDigest d;
  for (int i = 0; i < 8; ++i) d.hi = d.hi << 8 | bytes[i];
  for (int i = 8; i < 16; ++i) d.lo = d.lo << 8 | bytes[i];
  return d;
}

struct Version {
  int major = 0;
  int minor = 0;
};

Version parse_version(const std::string& v) {
  const auto dot = v.find('.');
  try {
    if (dot == std::string::npos) throw std::invalid_argument(v);
    return {std::stoi(v.substr(0, dot)), std::stoi(v.substr(dot + 1))};
  } catch (const std::exception&) {
    throw LogError("unparseable format_version '" + v + "'");
  }
}

nlohmann::json header_json(const LogHeader& h) {
  nlohmann::json j = {
      {"format_version", h.format_version},
      {"config", h.config},
      {"config_digest", h.config_digest.hex()},
      {"seed", h.seed},
      {"n_agents", h.n_agents},
      {"manifest_version", h.manifest_version},
      {"scenario", h.scenario},
      {"expert_slots", h.expert_slots},
  };
  if (h.initial_state) j["initial_state"] = to_hex(*h.initial_state);
  return j;
}

LogHeader header_from_json(const nlohmann::json& j) {
  LogHeader h;
  try {
    h.format_version = j.at("format_version").get<std::string>();
    h.config = j.at("config");
    h.config_digest = digest_from_hex(j.at("config_digest").get<std::string>());
    h.seed = j.at("seed").get<uint64_t>();
    h.n_agents = j.at("n_agents").get<int>();
    h.manifest_version = j.at("manifest_version").get<std::string>();
    h.scenario = j.value("scenario", nlohmann::json::object());
    h.expert_slots = j.value("expert_slots", std::vector<int>{});
    if (j.contains("initial_state")) h.initial_state = from_hex(j["initial_state"].get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw LogError(std::string("malformed log header: ") + e.what());
  }
  return h;
}

void write_event(ByteWriter& w, const StepEvent& e) {
  w.u8(static_cast<uint8_t>(e.kind));
  w.i16(e.agent);
  w.i16(e.other);
  w.i32(e.cell.row);
  w.i32(e.cell.col);
  w.u8(e.a);
  w.u8(e.b);
  w.i16(e.amount);
}

StepEvent read_event(ByteReader& r) {
  StepEvent e;
  const uint8_t kind = r.u8();
  if (kind >= kEventKindCount) throw LogError("unknown event kind " + std::to_string(kind));
  e.kind = static_cast<EventKind>(kind);
  e.agent = r.i16();
  e.other = r.i16();
  e.cell.row = r.i32();
  e.cell.col = r.i32();
  e.a = r.u8();
  e.b = r.u8();
  e.amount = r.i16();
  return e;
}

}  // namespace

StateDigest config_digest(const GameConfig& cfg) {
  const std::string text = config_to_json(cfg).dump();
  return hash_bytes({reinterpret_cast<const uint8_t*>(text.data()), text.size()});
}

std::vector<uint8_t> encode_log(const TrajectoryLog& log) {
  const Version v = parse_version(log.header.format_version);
  if (v.major != 1 || v.minor > 1) throw LogError("cannot write format_version " + log.header.format_version);
  const bool digests = v.minor >= 1;
  const std::size_t n = static_cast<std::size_t>(log.header.n_agents);

  ByteWriter w;
  w.bytes({reinterpret_cast<const uint8_t*>(kMagic), sizeof kMagic});
  const std::string header = header_json(log.header).dump();
  w.u32(static_cast<uint32_t>(header.size()));
  w.bytes({reinterpret_cast<const uint8_t*>(header.data()), header.size()});
  w.u64(log.steps.size());

  ByteWriter rec;
  for (const auto& s : log.steps) {
    if (s.actions.size() != n || s.rewards.size() != n) throw LogError("step record width does not match n_agents");
    if (digests && !s.digest) throw LogError("format 1.1 requires per-step digests");
    rec.clear();
    rec.bytes(s.actions);
    for (double r : s.rewards) rec.f64(r);
    rec.u32(static_cast<uint32_t>(s.events.size()));
    for (const auto& e : s.events) write_event(rec, e);
    if (digests) {
      rec.u64(s.digest->hi);
      rec.u64(s.digest->lo);
    }
    rec.u8(s.done ? 1 : 0);
    w.u32(static_cast<uint32_t>(rec.data().size()));
    w.bytes(rec.data());
  }
  w.u32(static_cast<uint32_t>(log.final_achievements.size()));
  for (const auto& a : log.final_achievements) w.u32(a.bits());
  w.i64(log.invalid_actions);

  const StateDigest sum = hash_bytes(w.data());
  w.u64(sum.hi);
  w.u64(sum.lo);
  return std::move(w.data());
}

TrajectoryLog decode_log(std::span<const uint8_t> bytes) {
  if (bytes.size() < sizeof kMagic + 4 + kChecksumSize) throw LogError("checksum error: file truncated");
  if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) throw LogError("not a trajectory log (bad magic)");
  const auto body = bytes.first(bytes.size() - kChecksumSize);
  ByteReader tail(bytes.last(kChecksumSize));
  StateDigest stored;
  stored.hi = tail.u64();
  stored.lo = tail.u64();
  if (hash_bytes(body) != stored) throw LogError("checksum error: file corrupt or truncated");

  TrajectoryLog log;
  try {
    ByteReader r(body);
    r.bytes(sizeof kMagic);
    const uint32_t header_len = r.u32();
    const auto header_bytes = r.bytes(header_len);
    nlohmann::json hj;
    try {
      hj = nlohmann::json::parse(header_bytes.begin(), header_bytes.end());
    } catch (const nlohmann::json::exception& e) {
      throw LogError(std::string("malformed log header: ") + e.what());
    }
    log.header = header_from_json(hj);
    const Version v = parse_version(log.header.format_version);
    if (v.major != 1) throw LogError("version error: unsupported major format version " + log.header.format_version);
    if (v.minor > 1) {
      throw LogError("version error: format " + log.header.format_version + " is newer than this reader (" +
                     kLogFormatVersion + ")");
    }
    const bool digests = v.minor >= 1;
    if (!digests) {
      log.header.notes.push_back("migrated from format " + log.header.format_version +
                                 ": per-step digests absent, replay checks events and rewards only");
      log.header.format_version = kLogFormatVersion;
    }
    if (log.header.n_agents < 1) throw LogError("log header has n_agents < 1");
    const std::size_t n = static_cast<std::size_t>(log.header.n_agents);

    const uint64_t steps = r.u64();
    log.steps.reserve(static_cast<std::size_t>(std::min<uint64_t>(steps, 1u << 20)));
    for (uint64_t i = 0; i < steps; ++i) {
      const uint32_t len = r.u32();
      ByteReader rec(r.bytes(len));
      StepRecord s;
      const auto actions = rec.bytes(n);
      s.actions.assign(actions.begin(), actions.end());
      s.rewards.resize(n);
      for (auto& x : s.rewards) x = rec.f64();
      const uint32_t events = rec.u32();
      s.events.reserve(std::min<uint32_t>(events, 4096));
      for (uint32_t k = 0; k < events; ++k) s.events.push_back(read_event(rec));
      if (digests) {
        StateDigest d;
        d.hi = rec.u64();
        d.lo = rec.u64();
        s.digest = d;
      }
      s.done = rec.u8() != 0;
      if (rec.remaining() != 0) throw LogError("step record " + std::to_string(i + 1) + " has trailing bytes");
      log.steps.push_back(std::move(s));
    }
    const uint32_t finals = r.u32();
    for (uint32_t i = 0; i < finals; ++i) log.final_achievements.emplace_back(r.u32());
    log.invalid_actions = r.i64();
    if (r.remaining() != 0) throw LogError("trailing bytes after log body");
  } catch (const DecodeError& e) {
    throw LogError(std::string("malformed log body: ") + e.what());
  }
  return log;
}

void write_log(const TrajectoryLog& log, const std::filesystem::path& path) {
  const auto bytes = encode_log(log);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LogError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw LogError("write failed: " + path.string());
}

TrajectoryLog read_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LogError("cannot open " + path.string());
  const std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_log(bytes);
  } catch (const LogError& e) {
    throw LogError(path.string() + ": " + e.what());
  }
}

GameConfig log_config(const LogHeader& h) {
  GameConfig cfg = validate_config(config_from_json(h.config));
  if (config_digest(cfg) != h.config_digest) throw LogError("config digest mismatch in log header");
  if (cfg.n_agents != h.n_agents) throw LogError("log header n_agents disagrees with its config");
  return cfg;
}

WorldState log_initial_state(const LogHeader& h) {
  const GameConfig cfg = log_config(h);
  if (h.initial_state) {
    try {
      return deserialize_state(*h.initial_state, cfg.day_length);
    } catch (const DecodeError& e) {
      throw LogError(std::string("embedded initial state: ") + e.what());
    }
  }
  return generate_world(cfg, h.seed);
}

}  // namespace mac
