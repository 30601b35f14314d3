#include <array>
#include <cstdlib>
#include <stdexcept>

#include "mac/runner.hpp"

namespace mac {

int RandomPolicy::act(std::span<const float>, Rng& rng) { return static_cast<int>(rng.uniform_int(kActionCount)); }

int ScriptedPolicy::act(std::span<const float>, Rng&) {
  if (next_ >= script_.size()) return static_cast<int>(Action::noop);
  return static_cast<int>(script_[next_++]);
}

namespace {

constexpr std::array<Action, 4> kMoves = {Action::left, Action::right, Action::up, Action::down};

struct Target {
  int dr = 0;
  int dc = 0;
};

class ObsView {
 public:
  ObsView(std::span<const float> obs, const ObsManifest& m, int rows, int cols)
      : obs_(obs), m_(m), rows_(rows), cols_(cols) {}

  bool has(int channel, int dr, int dc) const {
    const int r = rows_ / 2 + dr;
    const int c = cols_ / 2 + dc;
    if (r < 0 || c < 0 || r >= rows_ || c >= cols_) return false;
    return obs_[m_.channel_offset(channel) + r * cols_ + c] > 0.5f;
  }
  bool has(BlockKind k, int dr, int dc) const { return has(static_cast<int>(k), dr, dc); }
  bool has(MobKind k, int dr, int dc) const { return has(kBlockKindCount + static_cast<int>(k), dr, dc); }

  bool open(int dr, int dc) const {
    const bool floor = has(BlockKind::grass, dr, dc) || has(BlockKind::sand, dr, dc) || has(BlockKind::path, dr, dc);
    if (!floor) return false;
    for (int k = 0; k <= kMobKindCount; ++k) {
      if (has(kBlockKindCount + k, dr, dc)) return false;
    }
    return true;
  }

  // Nearest cell (Manhattan) holding the channel, excluding the center.
  std::optional<Target> nearest(int channel) const {
    std::optional<Target> best;
    int best_d = 1 << 20;
    for (int dr = -rows_ / 2; dr <= rows_ / 2; ++dr) {
      for (int dc = -cols_ / 2; dc <= cols_ / 2; ++dc) {
        if ((dr == 0 && dc == 0) || !has(channel, dr, dc)) continue;
        const int d = std::abs(dr) + std::abs(dc);
        if (d < best_d) {
          best_d = d;
          best = Target{dr, dc};
        }
      }
    }
    return best;
  }

  float value(std::size_t offset) const { return obs_[offset]; }
  Direction facing() const {
    for (int d = 0; d < kDirectionCount; ++d) {
      if (obs_[m_.direction_offset + d] > 0.5f) return static_cast<Direction>(d);
    }
    return Direction::down;
  }

 private:
  std::span<const float> obs_;
  const ObsManifest& m_;
  int rows_;
  int cols_;
};

Action move_for(Direction d) { return kMoves[static_cast<int>(d)]; }

// Walk toward t; once adjacent, turn to face it and interact.
Action approach(const ObsView& v, Target t, Rng& rng) {
  if (std::abs(t.dr) + std::abs(t.dc) == 1) {
    const Direction want = t.dc < 0   ? Direction::left
                           : t.dc > 0 ? Direction::right
                           : t.dr < 0 ? Direction::up
                                      : Direction::down;
    return v.facing() == want ? Action::do_ : move_for(want);
  }
  std::array<Direction, 2> options{};
  int n = 0;
  if (t.dc != 0) options[n++] = t.dc < 0 ? Direction::left : Direction::right;
  if (t.dr != 0) options[n++] = t.dr < 0 ? Direction::up : Direction::down;
  if (n == 2 && std::abs(t.dr) > std::abs(t.dc)) std::swap(options[0], options[1]);
  for (int i = 0; i < n; ++i) {
    const Cell o = offset(options[i]);
    if (v.open(o.row, o.col)) return move_for(options[i]);
  }
  return kMoves[rng.uniform_int(4)];
}

}  // namespace

void SurvivorPolicy::reset(const GameConfig& cfg, int) {
  manifest_ = obs_manifest(cfg);
  view_rows_ = cfg.view_rows;
  view_cols_ = cfg.view_cols;
}

int SurvivorPolicy::act(std::span<const float> obs, Rng& rng) {
  if (obs.size() != manifest_.total) throw std::invalid_argument("survivor policy: observation size mismatch");
  const ObsView v(obs, manifest_, view_rows_, view_cols_);
  const float food = v.value(manifest_.intrinsics_offset + 1);
  const float drink = v.value(manifest_.intrinsics_offset + 2);
  const float energy = v.value(manifest_.intrinsics_offset + 3);
  const float wood = v.value(manifest_.inventory_offset + static_cast<int>(Item::wood));

  // Flee hostiles within two cells.
  for (MobKind hostile : {MobKind::zombie, MobKind::skeleton, MobKind::arrow}) {
    for (int dr = -2; dr <= 2; ++dr) {
      for (int dc = -2; dc <= 2; ++dc) {
        if (std::abs(dr) + std::abs(dc) > 2 || !v.has(hostile, dr, dc)) continue;
        if (std::abs(dr) + std::abs(dc) == 1 && hostile == MobKind::zombie) {
          return static_cast<int>(approach(v, {dr, dc}, rng));
        }
        const Direction away = std::abs(dc) >= std::abs(dr) ? (dc > 0 ? Direction::left : Direction::right)
                                                            : (dr > 0 ? Direction::up : Direction::down);
        const Cell o = offset(away);
        if (v.open(o.row, o.col)) return static_cast<int>(move_for(away));
      }
    }
  }

  if (drink <= 0.55f) {
    if (auto t = v.nearest(static_cast<int>(BlockKind::water))) return static_cast<int>(approach(v, *t, rng));
  }
  if (food <= 0.55f) {
    if (auto t = v.nearest(kBlockKindCount + static_cast<int>(MobKind::cow))) {
      return static_cast<int>(approach(v, *t, rng));
    }
    if (auto t = v.nearest(static_cast<int>(BlockKind::plant_ripe))) return static_cast<int>(approach(v, *t, rng));
  }
  if (energy <= 0.25f) return static_cast<int>(Action::sleep);
  if (wood < 0.45f) {
    if (auto t = v.nearest(static_cast<int>(BlockKind::tree))) return static_cast<int>(approach(v, *t, rng));
  }
  if (rng.bernoulli(0.25)) return static_cast<int>(Action::noop);
  const Direction d = static_cast<Direction>(rng.uniform_int(4));
  const Cell o = offset(d);
  return static_cast<int>(v.open(o.row, o.col) ? move_for(d) : Action::noop);
}

std::unique_ptr<Policy> make_policy(const std::string& name) {
  if (name == "random") return std::make_unique<RandomPolicy>();
  if (name == "noop") return std::make_unique<NoopPolicy>();
  if (name == "survivor") return std::make_unique<SurvivorPolicy>();
  throw std::invalid_argument("unknown policy '" + name + "' (expected random, noop or survivor)");
}

PolicyFactory policy_factory(const std::string& name) {
  make_policy(name);  // validate eagerly
  return [name](int) { return make_policy(name); };
}

PolicyFactory policy_factory(const std::vector<std::string>& names) {
  if (names.empty()) throw std::invalid_argument("no policy names given");
  for (const auto& n : names) make_policy(n);
  return [names](int agent) {
    return make_policy(names.size() == 1 ? names.front() : names.at(static_cast<std::size_t>(agent)));
  };
}

}  // namespace mac
