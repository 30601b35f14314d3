#include "mac/digest.hpp"

#include <bit>
#include <cstdio>
#include <cstring>

namespace mac {

namespace {

constexpr uint64_t kPrime1 = 0x9e3779b185ebca87ull;
constexpr uint64_t kPrime2 = 0xc2b2ae3d27d4eb4full;
constexpr uint64_t kPrime3 = 0x165667b19e3779f9ull;
constexpr uint64_t kStateVersion = 1;

constexpr uint64_t fmix(uint64_t k) {
  k ^= k >> 33;
  k *= 0xff51afd7ed558ccdull;
  k ^= k >> 33;
  k *= 0xc4ceb9fe1a85ec53ull;
  k ^= k >> 33;
  return k;
}

}  // namespace

std::string StateDigest::hex() const {
  char buf[33];
  std::snprintf(buf, sizeof(buf), "%016llx%016llx", static_cast<unsigned long long>(hi),
                static_cast<unsigned long long>(lo));
  return buf;
}

void Hasher128::absorb(uint64_t w) {
  a_ = std::rotl(a_ ^ (w * kPrime1), 31) * kPrime2;
  b_ = std::rotl(b_ + (w * kPrime3), 27) * kPrime1 + a_;
}

void Hasher128::update(std::span<const uint8_t> bytes) {
  length_ += bytes.size();
  std::size_t i = 0;
  while (pending_bytes_ != 0 && i < bytes.size()) {
    pending_ |= static_cast<uint64_t>(bytes[i++]) << (8 * pending_bytes_);
    if (++pending_bytes_ == 8) {
      absorb(pending_);
      pending_ = 0;
      pending_bytes_ = 0;
    }
  }
  for (; i + 8 <= bytes.size(); i += 8) {
    uint64_t w = 0;
    for (int b = 0; b < 8; ++b) w |= static_cast<uint64_t>(bytes[i + b]) << (8 * b);
    absorb(w);
  }
  for (; i < bytes.size(); ++i) {
    pending_ |= static_cast<uint64_t>(bytes[i]) << (8 * pending_bytes_);
    ++pending_bytes_;
  }
}

StateDigest Hasher128::finish() const {
  Hasher128 h = *this;
  if (h.pending_bytes_ != 0) h.absorb(h.pending_ ^ (0x80ull << (8 * (h.pending_bytes_ % 8))));
  h.absorb(h.length_);
  const uint64_t x = fmix(h.a_ ^ std::rotl(h.b_, 17));
  const uint64_t y = fmix(h.b_ + x);
  return {fmix(x ^ kPrime3), y};
}

StateDigest hash_bytes(std::span<const uint8_t> bytes) {
  Hasher128 h;
  h.update(bytes);
  return h.finish();
}

void ByteWriter::u16(uint16_t v) {
  buf_.push_back(static_cast<uint8_t>(v));
  buf_.push_back(static_cast<uint8_t>(v >> 8));
}

void ByteWriter::u32(uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void ByteWriter::f64(double v) { u64(std::bit_cast<uint64_t>(v)); }

void ByteReader::need(std::size_t n) const {
  if (remaining() < n) throw DecodeError("unexpected end of data");
}

uint8_t ByteReader::u8() {
  need(1);
  return data_[pos_++];
}

uint16_t ByteReader::u16() {
  need(2);
  const uint16_t v = static_cast<uint16_t>(data_[pos_] | (data_[pos_ + 1] << 8));
  pos_ += 2;
  return v;
}

uint32_t ByteReader::u32() {
  need(4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(data_[pos_ + i]) << (8 * i);
  pos_ += 4;
  return v;
}

uint64_t ByteReader::u64() {
  need(8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(data_[pos_ + i]) << (8 * i);
  pos_ += 8;
  return v;
}

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

std::span<const uint8_t> ByteReader::bytes(std::size_t n) {
  need(n);
  auto s = data_.subspan(pos_, n);
  pos_ += n;
  return s;
}

namespace {

void write_player(const PlayerState& p, ByteWriter& out) {
  out.i32(p.pos.row);
  out.i32(p.pos.col);
  out.u8(static_cast<uint8_t>(p.facing));
  for (auto v : p.inventory) out.u8(v);
  out.u8(p.health_halves);
  out.u8(p.food);
  out.u8(p.drink);
  out.u8(p.energy);
  out.u8(p.alive);
  out.u8(p.sleeping);
  out.u32(p.achievements.bits());
  out.u16(p.regen_progress);
}

PlayerState read_player(ByteReader& in) {
  PlayerState p;
  p.pos.row = in.i32();
  p.pos.col = in.i32();
  p.facing = static_cast<Direction>(in.u8());
  for (auto& v : p.inventory) v = in.u8();
  p.health_halves = in.u8();
  p.food = in.u8();
  p.drink = in.u8();
  p.energy = in.u8();
  p.alive = in.u8() != 0;
  p.sleeping = in.u8() != 0;
  p.achievements = AchievementSet(in.u32());
  p.regen_progress = in.u16();
  return p;
}

}  // namespace

void serialize_state(const WorldState& s, ByteWriter& out) {
  out.u64(kStateVersion);
  out.i32(s.width);
  out.i32(s.height);
  out.i64(s.step);
  out.u8(s.terminated);
  out.u64(s.rng.key());
  out.u64(s.rng.counter());
  for (auto t : s.tiles) out.u8(static_cast<uint8_t>(t));
  for (auto p : s.placer) out.i16(p);
  for (auto a : s.plant_age) out.u16(a);
  out.u32(static_cast<uint32_t>(s.players.size()));
  for (const auto& p : s.players) write_player(p, out);
  out.u32(static_cast<uint32_t>(s.mobs.size()));
  for (const auto& m : s.mobs) {
    out.u8(static_cast<uint8_t>(m.kind));
    out.i32(m.pos.row);
    out.i32(m.pos.col);
    out.i16(m.health);
    out.u8(static_cast<uint8_t>(m.facing));
    out.i16(m.cooldown);
  }
}

std::vector<uint8_t> serialize_state(const WorldState& s) {
  ByteWriter w;
  serialize_state(s, w);
  return std::move(w.data());
}

WorldState deserialize_state(std::span<const uint8_t> bytes, int day_length) {
  ByteReader in(bytes);
  if (in.u64() != kStateVersion) throw DecodeError("unsupported state encoding version");
  const int width = in.i32();
  const int height = in.i32();
  if (width <= 0 || height <= 0 || width > 4096 || height > 4096) throw DecodeError("bad map dimensions");
  WorldState s(width, height);
  s.step = in.i64();
  s.terminated = in.u8() != 0;
  const uint64_t key = in.u64();
  const uint64_t counter = in.u64();
  s.rng = Rng::from_raw(key, counter);
  for (auto& t : s.tiles) {
    const uint8_t v = in.u8();
    if (v >= kBlockKindCount) throw DecodeError("bad block kind");
    t = static_cast<BlockKind>(v);
  }
  for (auto& p : s.placer) p = in.i16();
  for (auto& a : s.plant_age) a = in.u16();
  const uint32_t n_players = in.u32();
  if (n_players > 64) throw DecodeError("bad player count");
  for (uint32_t i = 0; i < n_players; ++i) s.players.push_back(read_player(in));
  const uint32_t n_mobs = in.u32();
  if (n_mobs > in.remaining()) throw DecodeError("bad mob count");
  for (uint32_t i = 0; i < n_mobs; ++i) {
    MobState m;
    const uint8_t kind = in.u8();
    if (kind >= kMobKindCount) throw DecodeError("bad mob kind");
    m.kind = static_cast<MobKind>(kind);
    m.pos.row = in.i32();
    m.pos.col = in.i32();
    m.health = in.i16();
    m.facing = static_cast<Direction>(in.u8());
    m.cooldown = in.i16();
    s.mobs.push_back(m);
  }
  if (in.remaining() != 0) throw DecodeError("trailing bytes after state");
  s.light_level = daylight(s.step, day_length);
  return s;
}

StateDigest digest_state(const WorldState& s) {
  thread_local ByteWriter buf;
  buf.clear();
  serialize_state(s, buf);
  return hash_bytes(buf.data());
}

StateDigest digest_player(const PlayerState& p) {
  ByteWriter w;
  write_player(p, w);
  return hash_bytes(w.data());
}

}  // namespace mac
