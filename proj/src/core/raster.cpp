#include "raster.hpp"

#include <algorithm>

namespace bugworld {

CameraBasis camera_basis(const Orientation& o) {
  const double yaw = deg2rad(o.yaw), pitch = deg2rad(o.pitch);
  const Vec3 forward{std::sin(yaw) * std::cos(pitch), std::sin(pitch), std::cos(yaw) * std::cos(pitch)};
  const Vec3 right{-std::cos(yaw), 0.0, std::sin(yaw)};
  return {forward, right, cross(right, forward)};
}

Vec3 world_to_view(const Camera& cam, const CameraBasis& basis, const Vec3& p) {
  const Vec3 d = p - cam.position;
  return {dot(d, basis.right), dot(d, basis.up), -dot(d, basis.forward)};
}

namespace {

ProjectedVertex project_view(const Vec3& v, int width, int height) {
  const double aspect = double(width) / double(height);
  const double x_ndc = v.x / -v.z;
  const double y_ndc = v.y / -v.z * aspect;
  return {(x_ndc + 1.0) / 2.0 * width, (1.0 - (y_ndc + 1.0) / 2.0) * height, -v.z};
}

}  // namespace

std::optional<ProjectedVertex> project_vertex(const Camera& cam, const Vec3& world_point, int width,
                                              int height) {
  const Vec3 v = world_to_view(cam, camera_basis(cam.orientation), world_point);
  if (v.z >= -cam.near_plane) return std::nullopt;
  return project_view(v, width, height);
}

Vec3 pixel_ray(const Camera& /*cam*/, const CameraBasis& basis, int width, int height, int px, int py) {
  const double x_ndc = (px + 0.5) / width * 2.0 - 1.0;
  const double y_ndc = 1.0 - (py + 0.5) / height * 2.0;
  const double vx = x_ndc;
  const double vy = y_ndc * double(height) / double(width);
  return basis.forward + basis.right * vx + basis.up * vy;
}

RGB8 sample_texture(const Texture& tex, double u, double v) {
  const double uf = u - std::floor(u);
  const double vf = v - std::floor(v);
  const int x = std::min(tex.width - 1, int(std::floor(uf * tex.width)));
  const int y = std::min(tex.height - 1, int(std::floor(vf * tex.height)));
  return tex.at(x, y);
}

RGB8 sample_skybox(const Skybox& sky, const Vec3& dir) {
  auto half = [](uint8_t c) { return uint8_t((c + 1) / 2); };
  if (dir.y < 0.0) return {half(sky.horizon.r), half(sky.horizon.g), half(sky.horizon.b)};
  const double t = dir.y / dir.length();
  auto lerp = [t](uint8_t a, uint8_t b) { return uint8_t(std::floor(a + (double(b) - a) * t + 0.5)); };
  return {lerp(sky.horizon.r, sky.zenith.r), lerp(sky.horizon.g, sky.zenith.g),
          lerp(sky.horizon.b, sky.zenith.b)};
}

int clip_near(const std::array<ViewVertex, 3>& tri, double near_plane,
              std::array<std::array<ViewVertex, 3>, 2>& out) {
  const double limit = -near_plane;
  ViewVertex poly[4];
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    const ViewVertex& a = tri[i];
    const ViewVertex& b = tri[(i + 1) % 3];
    const bool a_in = a.p.z <= limit;
    const bool b_in = b.p.z <= limit;
    if (a_in) poly[n++] = a;
    if (a_in != b_in) {
      const double t = (limit - a.p.z) / (b.p.z - a.p.z);
      ViewVertex c;
      c.p = a.p + (b.p - a.p) * t;
      c.p.z = limit;
      c.uv = {a.uv.u + (b.uv.u - a.uv.u) * t, a.uv.v + (b.uv.v - a.uv.v) * t};
      poly[n++] = c;
    }
  }
  if (n < 3) return 0;
  out[0] = {poly[0], poly[1], poly[2]};
  if (n == 3) return 1;
  out[1] = {poly[0], poly[2], poly[3]};
  return 2;
}

namespace {

// Calls emit(screen_triangle, object) for every near-clipped triangle of every
// object, in draw order.
template <class Emit>
void for_each_screen_triangle(const Scene& scene, const Camera& cam, int width, int height, Emit&& emit) {
  const CameraBasis basis = camera_basis(cam.orientation);
  std::vector<Vec3> view;
  std::array<std::array<ViewVertex, 3>, 2> clipped;
  for (const SceneObject& obj : scene.objects()) {
    view.resize(obj.mesh.vertices.size());
    for (size_t i = 0; i < view.size(); ++i)
      view[i] = world_to_view(cam, basis, transform_point(obj.transform, obj.mesh.vertices[i]));
    for (const auto& t : obj.mesh.triangles) {
      const Vec3& a = view[t[0]];
      const Vec3& b = view[t[1]];
      const Vec3& c = view[t[2]];
      if (a.z > -cam.near_plane && b.z > -cam.near_plane && c.z > -cam.near_plane) continue;
      const std::array<ViewVertex, 3> tri{ViewVertex{a, obj.mesh.uvs[t[0]]}, ViewVertex{b, obj.mesh.uvs[t[1]]},
                                          ViewVertex{c, obj.mesh.uvs[t[2]]}};
      const int n = clip_near(tri, cam.near_plane, clipped);
      for (int k = 0; k < n; ++k) {
        std::array<ScreenVertex, 3> sv;
        for (int j = 0; j < 3; ++j) {
          const ProjectedVertex pv = project_view(clipped[k][j].p, width, height);
          sv[j] = {pv.pixel_x, pv.pixel_y, pv.view_depth, clipped[k][j].uv};
        }
        emit(sv, obj);
      }
    }
  }
}

}  // namespace

RenderOutput render(const Scene& scene, const Camera& cam, const RasterOverrides& overrides,
                    uint64_t frame_index, int width, int height) {
  RenderOutput out;
  out.frame = Image(width, height);
  out.depth = {width, height, std::vector<double>(size_t(width) * height, kInfiniteDepth)};
  out.meta.width = width;
  out.meta.height = height;
  out.meta.object_id.assign(size_t(width) * height, kNoObject);
  out.meta.tie_id.assign(size_t(width) * height, kNoObject);

  const CameraBasis basis = camera_basis(cam.orientation);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      out.frame.at(x, y) = sample_skybox(scene.skybox, pixel_ray(cam, basis, width, height, x, y));

  const double far_plane = std::min(overrides.effective_far, cam.far_plane);
  for_each_screen_triangle(scene, cam, width, height, [&](const std::array<ScreenVertex, 3>& sv,
                                                          const SceneObject& obj) {
    rasterize_triangle(sv, width, height, true, [&](int px, int py, double depth, UV uv, bool) {
      if (!(depth > cam.near_plane) || depth > far_plane) return;
      const size_t i = size_t(py) * width + px;
      double& cur = out.depth.depth[i];
      if (depth < cur || (depth == cur && tie_goes_to_new(overrides.depth_tie, px, py, frame_index))) {
        out.meta.tie_id[i] = depth == cur ? out.meta.object_id[i] : kNoObject;
        cur = depth;
        out.meta.object_id[i] = obj.id;
        out.frame.pixels[i] =
            obj.material.texture ? sample_texture(*obj.material.texture, uv.u, uv.v) : obj.material.color;
      } else if (depth == cur) {
        out.meta.tie_id[i] = obj.id;
      }
    });
  });

  if (overrides.mask_backfaces) {
    std::vector<double> nc_depth(size_t(width) * height, kInfiniteDepth);
    out.meta.back_facing.assign(size_t(width) * height, 0);
    for_each_screen_triangle(scene, cam, width, height, [&](const std::array<ScreenVertex, 3>& sv,
                                                            const SceneObject&) {
      rasterize_triangle(sv, width, height, false, [&](int px, int py, double depth, UV, bool back) {
        if (!(depth > cam.near_plane) || depth > far_plane) return;
        const size_t i = size_t(py) * width + px;
        if (depth < nc_depth[i] ||
            (depth == nc_depth[i] && tie_goes_to_new(overrides.depth_tie, px, py, frame_index))) {
          nc_depth[i] = depth;
          out.meta.back_facing[i] = back ? 1 : 0;
        }
      });
    });
  }
  return out;
}

std::vector<uint8_t> render_coverage(const Scene& scene, const Camera& cam, double far_plane, int width,
                                     int height) {
  std::vector<uint8_t> covered(size_t(width) * height, 0);
  for_each_screen_triangle(scene, cam, width, height, [&](const std::array<ScreenVertex, 3>& sv,
                                                          const SceneObject&) {
    rasterize_triangle(sv, width, height, true, [&](int px, int py, double depth, UV, bool) {
      if (!(depth > cam.near_plane) || depth > far_plane) return;
      covered[size_t(py) * width + px] = 1;
    });
  });
  return covered;
}

Image render_mask(const Scene& scene, const Camera& cam, const MaskRules& rules, const FragmentMeta& meta,
                  const DepthBuffer& depth, const RasterOverrides& overrides, uint64_t /*frame_index*/) {
  const int width = meta.width, height = meta.height;
  Image mask(width, height, tag_color(kNoBug));
  const size_t n = size_t(width) * height;

  auto tag_of = [&](int64_t id) -> std::optional<TagId> {
    if (id == kNoObject) return std::nullopt;
    const SceneObject* o = scene.find(id);
    return o ? o->bug_tag : std::nullopt;
  };

  // (1) tagged objects, including an equal-depth partner of the winner
  for (size_t i = 0; i < n; ++i) {
    if (meta.is_skybox(i)) continue;
    if (auto t = tag_of(meta.object_id[i])) {
      mask.pixels[i] = tag_color(*t);
    } else if (auto tt = tag_of(meta.tie_id[i])) {
      mask.pixels[i] = tag_color(*tt);
    }
  }

  // (2) back-facing winners
  if (overrides.mask_backfaces && !meta.back_facing.empty()) {
    const RGB8 c = tag_color(*overrides.mask_backfaces);
    for (size_t i = 0; i < n; ++i)
      if (meta.back_facing[i]) mask.pixels[i] = c;
  }

  // (3) skybox below the horizon
  if (rules.boundary_hole) {
    const RGB8 c = tag_color(*rules.boundary_hole);
    const CameraBasis basis = camera_basis(cam.orientation);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        const size_t i = size_t(y) * width + x;
        if (meta.is_skybox(i) && pixel_ray(cam, basis, width, height, x, y).y < 0.0) mask.pixels[i] = c;
      }
  }

  // (4) geometry lost to a shortened far plane
  if (rules.far_differential) {
    const RGB8 c = tag_color(rules.far_differential->tag);
    const std::vector<uint8_t> nominal =
        render_coverage(scene, cam, rules.far_differential->nominal_far, width, height);
    for (size_t i = 0; i < n; ++i)
      if (depth.depth[i] == kInfiniteDepth && nominal[i]) mask.pixels[i] = c;
  }
  return mask;
}

}  // namespace bugworld
