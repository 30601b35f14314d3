#include <algorithm>
#include <array>
#include <fstream>
#include <stdexcept>

#include "mac/observation.hpp"

namespace mac {

namespace {

struct Rgb {
  uint8_t r, g, b;
};

// Every color the renderer can produce; the GIF writer uses this as its palette.
constexpr std::array<Rgb, 32> kPalette = {{
    {90, 170, 60},    // grass
    {220, 200, 140},  // sand
    {50, 100, 200},   // water
    {30, 90, 30},     // tree
    {120, 120, 120},  // stone
    {170, 150, 120},  // path
    {40, 40, 40},     // coal
    {200, 140, 100},  // iron
    {150, 230, 240},  // diamond
    {230, 80, 20},    // lava
    {140, 90, 40},    // table
    {90, 60, 60},     // furnace
    {120, 200, 80},   // sapling
    {200, 40, 120},   // ripe plant
    {100, 100, 110},  // placed stone
    {0, 0, 0},        // darkness
    {40, 120, 40},    // zombie
    {230, 230, 230},  // skeleton
    {130, 80, 50},    // cow
    {250, 250, 120},  // arrow
    {255, 255, 255},  // facing marker
    {230, 50, 50},    // players from here on
    {50, 90, 230},
    {240, 200, 30},
    {180, 60, 220},
    {30, 200, 200},
    {250, 130, 30},
    {250, 120, 180},
    {100, 60, 20},
    {60, 60, 60},
    {160, 160, 160},
    {255, 0, 255},
}};
constexpr int kMobColor = kBlockKindCount;
constexpr int kMarkerColor = kBlockKindCount + kMobKindCount;
constexpr int kPlayerColor = kMarkerColor + 1;
constexpr int kPlayerColors = static_cast<int>(kPalette.size()) - kPlayerColor;

class Canvas {
 public:
  Canvas(int cols, int rows, int sprite) : sprite_(sprite) {
    if (sprite < 2) throw std::invalid_argument("sprite size must be at least 2");
    img_.width = cols * sprite;
    img_.height = rows * sprite;
    img_.rgb.assign(static_cast<std::size_t>(img_.width) * img_.height * 3, 0);
  }

  void fill(int x0, int y0, int w, int h, int color) {
    const Rgb c = kPalette[color];
    for (int y = y0; y < y0 + h; ++y) {
      uint8_t* px = img_.rgb.data() + (static_cast<std::size_t>(y) * img_.width + x0) * 3;
      for (int x = 0; x < w; ++x, px += 3) {
        px[0] = c.r;
        px[1] = c.g;
        px[2] = c.b;
      }
    }
  }

  void cell(int col, int row, int color) { fill(col * sprite_, row * sprite_, sprite_, sprite_, color); }

  // Inset square with a marker on the facing edge.
  void token(int col, int row, int color, Direction facing) {
    const int inset = sprite_ / 4;
    const int x0 = col * sprite_ + inset;
    const int y0 = row * sprite_ + inset;
    const int size = sprite_ - 2 * inset;
    fill(x0, y0, size, size, color);
    const int m = std::max(1, size / 3);
    const int mid = (size - m) / 2;
    switch (facing) {
      case Direction::left: fill(x0, y0 + mid, m, m, kMarkerColor); break;
      case Direction::right: fill(x0 + size - m, y0 + mid, m, m, kMarkerColor); break;
      case Direction::up: fill(x0 + mid, y0, m, m, kMarkerColor); break;
      case Direction::down: fill(x0 + mid, y0 + size - m, m, m, kMarkerColor); break;
    }
  }

  Image take() { return std::move(img_); }

 private:
  int sprite_;
  Image img_;
};

void draw_window(Canvas& canvas, const WorldState& s, Cell origin, int cols, int rows) {
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) canvas.cell(c, r, static_cast<int>(s.tile({origin.row + r, origin.col + c})));
  }
  auto inside = [&](Cell p) {
    return p.row >= origin.row && p.col >= origin.col && p.row < origin.row + rows && p.col < origin.col + cols;
  };
  for (const auto& m : s.mobs) {
    if (!inside(m.pos)) continue;
    canvas.token(m.pos.col - origin.col, m.pos.row - origin.row, kMobColor + static_cast<int>(m.kind), m.facing);
  }
  for (std::size_t i = 0; i < s.players.size(); ++i) {
    const auto& p = s.players[i];
    if (!p.alive || !inside(p.pos)) continue;
    canvas.token(p.pos.col - origin.col, p.pos.row - origin.row, kPlayerColor + static_cast<int>(i % kPlayerColors),
                 p.facing);
  }
}

}  // namespace

Image render_frame(const WorldState& s, int sprite_size) {
  Canvas canvas(s.width, s.height, sprite_size);
  draw_window(canvas, s, {0, 0}, s.width, s.height);
  return canvas.take();
}

Image render_view(const GameConfig& cfg, const WorldState& s, int observer, int sprite_size) {
  Canvas canvas(cfg.view_cols, cfg.view_rows, sprite_size);
  const Cell pos = s.players[observer].pos;
  draw_window(canvas, s, {pos.row - cfg.view_rows / 2, pos.col - cfg.view_cols / 2}, cfg.view_cols, cfg.view_rows);
  return canvas.take();
}

void write_ppm(const std::filesystem::path& path, const Image& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.rgb.data()), static_cast<std::streamsize>(image.rgb.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

namespace {

uint8_t palette_index(const uint8_t* px) {
  int best = 0;
  int best_distance = 1 << 30;
  for (int i = 0; i < static_cast<int>(kPalette.size()); ++i) {
    const int dr = px[0] - kPalette[i].r;
    const int dg = px[1] - kPalette[i].g;
    const int db = px[2] - kPalette[i].b;
    const int d = dr * dr + dg * dg + db * db;
    if (d == 0) return static_cast<uint8_t>(i);
    if (d < best_distance) {
      best_distance = d;
      best = i;
    }
  }
  return static_cast<uint8_t>(best);
}

class BitPacker {
 public:
  explicit BitPacker(std::vector<uint8_t>& out) : out_(out) {}
  void put(uint32_t code, int width) {
    acc_ |= code << bits_;
    bits_ += width;
    while (bits_ >= 8) {
      out_.push_back(static_cast<uint8_t>(acc_ & 0xff));
      acc_ >>= 8;
      bits_ -= 8;
    }
  }
  void flush() {
    if (bits_ > 0) out_.push_back(static_cast<uint8_t>(acc_ & 0xff));
    acc_ = 0;
    bits_ = 0;
  }

 private:
  std::vector<uint8_t>& out_;
  uint32_t acc_ = 0;
  int bits_ = 0;
};

// Literal-only LZW stream: a clear code before the table would widen codes
// keeps every code at 9 bits. Larger files, trivially correct decoding.
std::vector<uint8_t> lzw_literals(const std::vector<uint8_t>& indices) {
  constexpr uint32_t kClear = 256;
  constexpr uint32_t kEnd = 257;
  constexpr int kWidth = 9;
  constexpr int kRun = 250;
  std::vector<uint8_t> out;
  BitPacker bits(out);
  int since_clear = kRun;
  for (uint8_t v : indices) {
    if (since_clear == kRun) {
      bits.put(kClear, kWidth);
      since_clear = 0;
    }
    bits.put(v, kWidth);
    ++since_clear;
  }
  bits.put(kEnd, kWidth);
  bits.flush();
  return out;
}

void u16le(std::ofstream& out, int v) {
  out.put(static_cast<char>(v & 0xff));
  out.put(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

GifWriter::GifWriter(const std::filesystem::path& path, int width, int height, int delay_centiseconds)
    : out_(std::make_unique<std::ofstream>(path, std::ios::binary)),
      path_(path),
      width_(width),
      height_(height),
      delay_(delay_centiseconds) {
  if (width <= 0 || height <= 0 || width > 0xffff || height > 0xffff) {
    throw std::invalid_argument("GIF dimensions out of range");
  }
  std::ofstream& out = *out_;
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out.write("GIF89a", 6);
  u16le(out, width);
  u16le(out, height);
  out.put(static_cast<char>(0xf7));  // global table, 8 bits per channel, 256 entries
  out.put(0);
  out.put(0);
  for (int i = 0; i < 256; ++i) {
    const Rgb c = i < static_cast<int>(kPalette.size()) ? kPalette[i] : Rgb{0, 0, 0};
    out.put(static_cast<char>(c.r));
    out.put(static_cast<char>(c.g));
    out.put(static_cast<char>(c.b));
  }
  // Loop forever.
  const char loop[] = {'\x21', '\xff', '\x0b', 'N', 'E', 'T', 'S', 'C', 'A', 'P', 'E', '2', '.', '0',
                       '\x03', '\x01', '\x00', '\x00', '\x00'};
  out.write(loop, sizeof loop);
}

GifWriter::~GifWriter() {
  try {
    finish();
  } catch (...) {
  }
}

void GifWriter::add(const Image& f) {
  if (!out_) throw std::logic_error("GIF already finished");
  if (f.width != width_ || f.height != height_) throw std::invalid_argument("GIF frames must share dimensions");
  std::ofstream& out = *out_;
  out.put('\x21');
  out.put('\xf9');
  out.put(4);
  out.put(0);
  u16le(out, delay_);
  out.put(0);
  out.put(0);

  out.put('\x2c');
  u16le(out, 0);
  u16le(out, 0);
  u16le(out, width_);
  u16le(out, height_);
  out.put(0);

  indices_.resize(static_cast<std::size_t>(width_) * height_);
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    const uint8_t* px = f.rgb.data() + 3 * i;
    // Sprites are flat runs of one color, so the previous pixel is usually a hit.
    indices_[i] = i > 0 && std::equal(px, px + 3, px - 3) ? indices_[i - 1] : palette_index(px);
  }
  const auto data = lzw_literals(indices_);
  out.put(8);
  for (std::size_t pos = 0; pos < data.size(); pos += 255) {
    const auto n = std::min<std::size_t>(255, data.size() - pos);
    out.put(static_cast<char>(n));
    out.write(reinterpret_cast<const char*>(data.data() + pos), static_cast<std::streamsize>(n));
  }
  out.put(0);
  if (!out) throw std::runtime_error("write failed: " + path_.string());
  ++frames_;
}

void GifWriter::finish() {
  if (!out_) return;
  out_->put('\x3b');
  out_->close();
  const bool ok = static_cast<bool>(*out_);
  out_.reset();
  if (!ok) throw std::runtime_error("write failed: " + path_.string());
}

void write_gif(const std::filesystem::path& path, std::span<const Image> frames, int delay_centiseconds) {
  if (frames.empty()) throw std::invalid_argument("write_gif needs at least one frame");
  GifWriter gif(path, frames.front().width, frames.front().height, delay_centiseconds);
  for (const auto& f : frames) gif.add(f);
  gif.finish();
}

}  // namespace mac
