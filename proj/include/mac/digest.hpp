#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mac/types.hpp"

namespace mac {

struct StateDigest {
  uint64_t hi = 0;
  uint64_t lo = 0;

  std::string hex() const;
  friend constexpr bool operator==(const StateDigest&, const StateDigest&) = default;
};

// Streaming 128-bit non-cryptographic hash over little-endian words.
class Hasher128 {
 public:
  void update(std::span<const uint8_t> bytes);
  void update(std::string_view s) { update({reinterpret_cast<const uint8_t*>(s.data()), s.size()}); }
  StateDigest finish() const;

 private:
  void absorb(uint64_t word);

  uint64_t a_ = 0x243f6a8885a308d3ull;
  uint64_t b_ = 0x13198a2e03707344ull;
  uint64_t length_ = 0;
  uint64_t pending_ = 0;
  int pending_bytes_ = 0;
};

StateDigest hash_bytes(std::span<const uint8_t> bytes);

class ByteWriter {
 public:
  void u8(uint8_t v) { buf_.push_back(v); }
  void u16(uint16_t v);
  void u32(uint32_t v);
  void u64(uint64_t v);
  void i16(int16_t v) { u16(static_cast<uint16_t>(v)); }
  void i32(int32_t v) { u32(static_cast<uint32_t>(v)); }
  void i64(int64_t v) { u64(static_cast<uint64_t>(v)); }
  void f64(double v);
  void bytes(std::span<const uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }

  const std::vector<uint8_t>& data() const { return buf_; }
  std::vector<uint8_t>& data() { return buf_; }
  void clear() { buf_.clear(); }

 private:
  std::vector<uint8_t> buf_;
};

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

  uint8_t u8();
  uint16_t u16();
  uint32_t u32();
  uint64_t u64();
  int16_t i16() { return static_cast<int16_t>(u16()); }
  int32_t i32() { return static_cast<int32_t>(u32()); }
  int64_t i64() { return static_cast<int64_t>(u64()); }
  double f64();
  std::span<const uint8_t> bytes(std::size_t n);

  std::size_t remaining() const { return data_.size() - pos_; }
  std::size_t position() const { return pos_; }

 private:
  void need(std::size_t n) const;
  std::span<const uint8_t> data_;
  std::size_t pos_ = 0;
};

// Canonical state encoding. Field order:
//   version, width, height, step, terminated, rng key, rng counter,
//   tiles (row-major), placer (row-major), plant_age (row-major),
//   players (pos, facing, inventory[12], health_halves, food, drink, energy,
//            alive, sleeping, achievements, regen_progress),
//   mobs (kind, pos, health, facing, cooldown).
// light_level is omitted; it is a function of step.
void serialize_state(const WorldState& s, ByteWriter& out);
std::vector<uint8_t> serialize_state(const WorldState& s);
// Requires the day length to recompute light_level.
WorldState deserialize_state(std::span<const uint8_t> bytes, int day_length);

StateDigest digest_state(const WorldState& s);
// Digest of a single player's fields, used for frozen-state checks.
StateDigest digest_player(const PlayerState& p);

}  // namespace mac
