// Shared scene and environment helpers for the test binaries.
#pragma once

#include <cmath>
#include <optional>

#include "core/bugs.hpp"
#include "core/env.hpp"
#include "core/raster.hpp"
#include "core/scene.hpp"
#include "core/world.hpp"

namespace bugworld::testing {

inline SceneObject box_object(int64_t id, Vec3 center, Vec3 size, RGB8 color = {200, 60, 60}) {
  SceneObject o;
  o.id = id;
  o.kind = ObjectKind::kProp;
  o.primitive = {"box", {{"sx", size.x}, {"sy", size.y}, {"sz", size.z}}};
  o.mesh = build_primitive(o.primitive);
  o.material.color = color;
  o.transform.translation = center;
  return o;
}

// Vertical quad facing -Z (towards a camera at the origin looking down +Z).
inline SceneObject facing_quad(int64_t id, double z, double half, RGB8 color) {
  SceneObject o;
  o.id = id;
  o.kind = ObjectKind::kProp;
  o.primitive = {"quad", {}};
  o.mesh.vertices = {{-half, -half, z}, {half, -half, z}, {half, half, z}, {-half, half, z}};
  o.mesh.uvs = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  // Counter-clockwise seen from -Z.
  o.mesh.triangles = {{0, 2, 1}, {0, 3, 2}};
  o.material.color = color;
  return o;
}

inline Camera camera_at(Vec3 p, double yaw, double pitch) {
  Camera c;
  c.position = p;
  c.orientation.set_yaw(yaw);
  c.orientation.set_pitch(pitch);
  return c;
}

// Yaw/pitch that point the camera from `eye` at `target`.
inline Orientation look_at(Vec3 eye, Vec3 target) {
  const Vec3 d = target - eye;
  Orientation o;
  o.set_yaw(rad2deg(std::atan2(d.x, d.z)));
  o.set_pitch(rad2deg(std::atan2(d.y, std::sqrt(d.x * d.x + d.z * d.z))));
  return o;
}

// Slab-method ray/AABB intersection; returns the entry distance.
inline std::optional<double> ray_box(Vec3 o, Vec3 d, const AABB& b) {
  double t0 = -1e300, t1 = 1e300;
  const double os[3] = {o.x, o.y, o.z}, ds[3] = {d.x, d.y, d.z};
  const double lo[3] = {b.min.x, b.min.y, b.min.z}, hi[3] = {b.max.x, b.max.y, b.max.z};
  for (int a = 0; a < 3; ++a) {
    if (ds[a] == 0.0) {
      if (os[a] < lo[a] || os[a] > hi[a]) return std::nullopt;
      continue;
    }
    double ta = (lo[a] - os[a]) / ds[a], tb = (hi[a] - os[a]) / ds[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (t0 > t1 || t1 < 0) return std::nullopt;
  return t0;
}

inline size_t count_color(const Image& img, RGB8 c) {
  size_t n = 0;
  for (const RGB8& p : img.pixels) n += p == c;
  return n;
}

inline size_t count_non_black(const Image& img) { return img.pixels.size() - count_color(img, {0, 0, 0}); }

inline double yaw_to(const Vec3& from, const Vec3& to) { return rad2deg(std::atan2(to.x - from.x, to.z - from.z)); }

}  // namespace bugworld::testing
