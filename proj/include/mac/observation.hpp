#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mac/config.hpp"
#include "mac/types.hpp"

namespace mac {

inline constexpr const char* kManifestVersion = "mac-symbolic-1";
// Block kinds, then zombie, skeleton, cow, arrow, other player.
inline constexpr int kMapChannels = kBlockKindCount + kMobKindCount + 1;
inline constexpr int kIntrinsicCount = 4;

// Layout of the flat symbolic observation. Map grids are channel-major
// ([channel][row][col]); per-other-player blocks follow in agent-id order
// with the observer skipped.
struct ObsManifest {
  std::string version = kManifestVersion;
  int view_rows = 7;
  int view_cols = 9;
  int n_agents = 1;
  std::size_t grid_size = 63;
  std::size_t map_offset = 0;
  std::size_t inventory_offset = 0;
  std::size_t intrinsics_offset = 0;
  std::size_t direction_offset = 0;
  std::size_t light_offset = 0;
  std::size_t sleeping_offset = 0;
  std::size_t alive_offset = 0;
  std::size_t others_offset = 0;
  // Within one other-player block.
  std::size_t other_position_offset = 0;
  std::size_t other_inventory_offset = 0;
  std::size_t other_intrinsics_offset = 0;
  std::size_t other_direction_offset = 0;
  std::size_t other_block_size = 0;
  std::size_t total = 0;

  std::size_t channel_offset(int channel) const { return map_offset + channel * grid_size; }
  std::size_t other_block_offset(int slot) const { return others_offset + slot * other_block_size; }
  nlohmann::json to_json() const;
};

ObsManifest obs_manifest(const GameConfig& cfg);

// Slot of target's block in observer's vector.
constexpr int other_slot(int observer, int target) { return target < observer ? target : target - 1; }

bool in_view(const GameConfig& cfg, Cell observer, Cell target);
bool is_visible(const GameConfig& cfg, const WorldState& s, int observer, int target);
// Alive targets inside observer's window that the visibility schedule permits.
std::vector<int> visible_players(const GameConfig& cfg, const WorldState& s, int observer);
int count_visible_players(const GameConfig& cfg, const WorldState& s, int observer);

// Writes exactly manifest.total floats into out.
void encode_symbolic(const GameConfig& cfg, const ObsManifest& manifest, const WorldState& s, int observer,
                     std::span<float> out);
std::vector<float> encode_symbolic(const GameConfig& cfg, const WorldState& s, int observer);

struct Image {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> rgb;

  friend bool operator==(const Image&, const Image&) = default;
};

// Whole map, one sprite_size square per cell. Dead players are not drawn.
Image render_frame(const WorldState& s, int sprite_size = 8);
// The observer's window only; out-of-bounds cells render as darkness.
Image render_view(const GameConfig& cfg, const WorldState& s, int observer, int sprite_size = 8);

void write_ppm(const std::filesystem::path& path, const Image& image);
// Streams an animated GIF frame by frame; every frame must match the first.
class GifWriter {
 public:
  GifWriter(const std::filesystem::path& path, int width, int height, int delay_centiseconds = 10);
  ~GifWriter();
  GifWriter(const GifWriter&) = delete;
  GifWriter& operator=(const GifWriter&) = delete;

  void add(const Image& frame);
  // Writes the trailer; further frames are rejected.
  void finish();
  int64_t frames() const { return frames_; }

 private:
  std::unique_ptr<std::ofstream> out_;
  std::filesystem::path path_;
  int width_;
  int height_;
  int delay_;
  int64_t frames_ = 0;
  std::vector<uint8_t> indices_;
};

void write_gif(const std::filesystem::path& path, std::span<const Image> frames, int delay_centiseconds = 10);

}  // namespace mac
