#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace bugworld {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr bool operator==(const Vec3&) const = default;

  double length() const { return std::sqrt(x * x + y * y + z * z); }
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

// Only defined for nonzero vectors.
inline Vec3 normalize(const Vec3& v) { return v * (1.0 / v.length()); }

struct RGB8 {
  uint8_t r = 0;
  uint8_t g = 0;
  uint8_t b = 0;
  constexpr bool operator==(const RGB8&) const = default;
};

inline constexpr double kPi = 3.14159265358979323846;
inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// First-person view angles. Yaw wraps into [0,360); pitch clamps to [-89,89].
struct Orientation {
  double yaw = 0.0;
  double pitch = 0.0;

  static constexpr double kMaxPitch = 89.0;

  void set_yaw(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w < 0.0) w += 360.0;
    if (w >= 360.0) w = 0.0;
    yaw = w;
  }
  void set_pitch(double deg) { pitch = std::fmax(-kMaxPitch, std::fmin(kMaxPitch, deg)); }

  bool operator==(const Orientation&) const = default;
};

struct AABB {
  Vec3 min;
  Vec3 max;

  bool contains(const Vec3& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z &&
           p.z <= max.z;
  }
  // Euclidean distance from p to the box (0 inside).
  double distance(const Vec3& p) const {
    const double dx = std::fmax(std::fmax(min.x - p.x, 0.0), p.x - max.x);
    const double dy = std::fmax(std::fmax(min.y - p.y, 0.0), p.y - max.y);
    const double dz = std::fmax(std::fmax(min.z - p.z, 0.0), p.z - max.z);
    return std::sqrt(dx * dx + dy * dy + dz * dz);
  }
};

/// Row-major RGB8 image; used for frames, masks and textures alike.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<RGB8> pixels;

  Image() = default;
  Image(int w, int h, RGB8 fill = {}) : width(w), height(h), pixels(size_t(w) * size_t(h), fill) {}

  RGB8& at(int x, int y) { return pixels[size_t(y) * size_t(width) + size_t(x)]; }
  const RGB8& at(int x, int y) const { return pixels[size_t(y) * size_t(width) + size_t(x)]; }

  std::span<const uint8_t> bytes() const {
    return {reinterpret_cast<const uint8_t*>(pixels.data()), pixels.size() * 3};
  }
  bool operator==(const Image&) const = default;
};

static_assert(sizeof(RGB8) == 3, "RGB8 must be tightly packed");

}  // namespace bugworld
