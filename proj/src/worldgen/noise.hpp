#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <utility>

#include "mac/rng.hpp"

namespace mac::detail {

// 2D gradient noise with hashed lattice gradients, roughly in [-1, 1].
class GradientNoise {
 public:
  explicit GradientNoise(uint64_t seed) : seed_(seed) {}

  double at(double x, double y, uint64_t layer) const {
    const double fx = std::floor(x);
    const double fy = std::floor(y);
    const auto ix = static_cast<int64_t>(fx);
    const auto iy = static_cast<int64_t>(fy);
    const double tx = x - fx;
    const double ty = y - fy;
    const double n00 = corner(ix, iy, layer, tx, ty);
    const double n10 = corner(ix + 1, iy, layer, tx - 1, ty);
    const double n01 = corner(ix, iy + 1, layer, tx, ty - 1);
    const double n11 = corner(ix + 1, iy + 1, layer, tx - 1, ty - 1);
    const double u = fade(tx);
    const double v = fade(ty);
    const double a = n00 + u * (n10 - n00);
    const double b = n01 + u * (n11 - n01);
    return 1.41421356 * (a + v * (b - a));
  }

  // Weighted octave sum; each term samples at (x / size, y / size).
  double octaves(double x, double y, uint64_t layer, std::initializer_list<std::pair<double, double>> sizes,
                 bool normalize = true) const {
    double value = 0.0;
    double total = 0.0;
    uint64_t sub = 0;
    for (const auto& [size, weight] : sizes) {
      value += weight * at(x / size, y / size, layer * 16 + sub++);
      total += weight;
    }
    return normalize ? value / total : value;
  }

 private:
  static double fade(double t) { return t * t * t * (t * (t * 6 - 15) + 10); }

  double corner(int64_t ix, int64_t iy, uint64_t layer, double dx, double dy) const {
    const uint64_t h = Rng::mix(seed_ ^ Rng::mix(static_cast<uint64_t>(ix) * 0x9e3779b97f4a7c15ull ^
                                                 static_cast<uint64_t>(iy) * 0xc2b2ae3d27d4eb4full ^ layer));
    const double angle = static_cast<double>(h >> 11) * 0x1.0p-53 * 6.283185307179586;
    return std::cos(angle) * dx + std::sin(angle) * dy;
  }

  uint64_t seed_;
};

}  // namespace mac::detail
