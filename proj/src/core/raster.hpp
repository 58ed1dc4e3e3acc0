#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "scene.hpp"
#include "types.hpp"

namespace bugworld {

/// First-person camera. Horizontal FOV is fixed at 90 degrees.
struct Camera {
  Vec3 position;
  Orientation orientation;
  double near_plane = 0.1;
  double far_plane = 100.0;
};

struct CameraBasis {
  Vec3 forward;
  Vec3 right;
  Vec3 up;
};

CameraBasis camera_basis(const Orientation& o);

/// View space: +X right, +Y up, camera looks down -Z.
Vec3 world_to_view(const Camera& cam, const CameraBasis& basis, const Vec3& p);

struct ProjectedVertex {
  double pixel_x = 0.0;
  double pixel_y = 0.0;
  double view_depth = 0.0;
};

/// nullopt means BEHIND (view z >= -near).
std::optional<ProjectedVertex> project_vertex(const Camera& cam, const Vec3& world_point, int width,
                                              int height);

/// World-space direction of the ray through the center of pixel (px, py).
Vec3 pixel_ray(const Camera& cam, const CameraBasis& basis, int width, int height, int px, int py);

RGB8 sample_texture(const Texture& tex, double u, double v);
RGB8 sample_skybox(const Skybox& sky, const Vec3& dir);

enum class DepthTie { kStable, kParityFlip };

struct RasterOverrides {
  double effective_far = 100.0;
  DepthTie depth_tie = DepthTie::kStable;
  // When set, an extra no-cull pass records back-facing winners for the mask.
  std::optional<TagId> mask_backfaces;
};

/// Equal-depth resolution: STABLE keeps the incumbent; PARITY_FLIP lets the
/// newcomer win on pixels where (x + y + frame) is odd.
inline bool tie_goes_to_new(DepthTie tie, int px, int py, uint64_t frame_index) {
  return tie == DepthTie::kParityFlip && ((uint64_t(px) + uint64_t(py) + frame_index) & 1u);
}

inline constexpr double kInfiniteDepth = std::numeric_limits<double>::infinity();
inline constexpr int64_t kNoObject = -1;

struct DepthBuffer {
  int width = 0;
  int height = 0;
  std::vector<double> depth;
};

/// Per-pixel bookkeeping from the player-view pass.
struct FragmentMeta {
  int width = 0;
  int height = 0;
  std::vector<int64_t> object_id;  // kNoObject for skybox
  std::vector<int64_t> tie_id;     // other object at exactly the winning depth
  std::vector<uint8_t> back_facing;  // no-cull pass winner facing; empty if not run

  bool is_skybox(size_t i) const { return object_id[i] == kNoObject; }
};

struct RenderOutput {
  Image frame;
  DepthBuffer depth;
  FragmentMeta meta;
};

/// Vertex in pixel space with the attributes needed for perspective-correct
/// interpolation.
struct ScreenVertex {
  double x = 0.0;
  double y = 0.0;
  double depth = 1.0;
  UV uv;
};

inline constexpr int kSubpixelBits = 8;

/// Edge-function rasterization with a top-left fill rule on a fixed-point
/// grid. Calls frag(px, py, depth, uv, back_facing) for every covered pixel
/// center. Returns false when the triangle was culled or degenerate.
template <class Fragment>
bool rasterize_triangle(std::array<ScreenVertex, 3> v, int width, int height, bool cull_back,
                        Fragment&& frag) {
  constexpr double kScale = double(1 << kSubpixelBits);
  constexpr int64_t kHalf = int64_t(1) << (kSubpixelBits - 1);
  int64_t X[3], Y[3];
  for (int i = 0; i < 3; ++i) {
    X[i] = std::llround(v[i].x * kScale);
    Y[i] = std::llround(v[i].y * kScale);
  }
  int64_t area = (X[1] - X[0]) * (Y[2] - Y[0]) - (Y[1] - Y[0]) * (X[2] - X[0]);
  if (area == 0) return false;
  // Counter-clockwise in view space turns clockwise once pixel y points down.
  const bool back = area > 0;
  if (back && cull_back) return false;
  if (area < 0) {
    std::swap(v[1], v[2]);
    std::swap(X[1], X[2]);
    std::swap(Y[1], Y[2]);
    area = -area;
  }

  const int64_t min_x = std::min({X[0], X[1], X[2]}), max_x = std::max({X[0], X[1], X[2]});
  const int64_t min_y = std::min({Y[0], Y[1], Y[2]}), max_y = std::max({Y[0], Y[1], Y[2]});
  auto first_pixel = [](int64_t lo) {
    // smallest p with p*S + half >= lo
    const int64_t n = lo - kHalf;
    return n <= 0 ? -((-n) >> kSubpixelBits) : ((n + (int64_t(1) << kSubpixelBits) - 1) >> kSubpixelBits);
  };
  auto last_pixel = [](int64_t hi) {
    const int64_t n = hi - kHalf;
    return n >= 0 ? (n >> kSubpixelBits) : -(((-n) + (int64_t(1) << kSubpixelBits) - 1) >> kSubpixelBits);
  };
  const int64_t x0 = std::max<int64_t>(0, first_pixel(min_x));
  const int64_t x1 = std::min<int64_t>(width - 1, last_pixel(max_x));
  const int64_t y0 = std::max<int64_t>(0, first_pixel(min_y));
  const int64_t y1 = std::min<int64_t>(height - 1, last_pixel(max_y));
  if (x0 > x1 || y0 > y1) return true;

  // Edge i is opposite vertex i.
  int64_t A[3], B[3], bias[3];
  const int ea[3] = {1, 2, 0}, eb[3] = {2, 0, 1};
  for (int i = 0; i < 3; ++i) {
    const int a = ea[i], b = eb[i];
    const int64_t dx = X[b] - X[a], dy = Y[b] - Y[a];
    A[i] = -dy;
    B[i] = dx;
    const bool top_left = dy < 0 || (dy == 0 && dx > 0);
    bias[i] = top_left ? 0 : -1;
  }
  auto edge_at = [&](int i, int64_t px, int64_t py) {
    const int a = ea[i];
    return A[i] * (px - X[a]) + B[i] * (py - Y[a]);
  };

  double inv_z[3], u_z[3], v_z[3];
  for (int i = 0; i < 3; ++i) {
    inv_z[i] = 1.0 / v[i].depth;
    u_z[i] = v[i].uv.u * inv_z[i];
    v_z[i] = v[i].uv.v * inv_z[i];
  }
  const double inv_area = 1.0 / double(area);
  const int64_t step = int64_t(1) << kSubpixelBits;

  for (int64_t py = y0; py <= y1; ++py) {
    const int64_t cy = py * step + kHalf;
    const int64_t cx0 = x0 * step + kHalf;
    int64_t w[3];
    for (int i = 0; i < 3; ++i) w[i] = edge_at(i, cx0, cy);
    for (int64_t px = x0; px <= x1; ++px) {
      if ((w[0] + bias[0]) >= 0 && (w[1] + bias[1]) >= 0 && (w[2] + bias[2]) >= 0) {
        const double l0 = double(w[0]) * inv_area;
        const double l1 = double(w[1]) * inv_area;
        const double l2 = double(w[2]) * inv_area;
        const double iz = l0 * inv_z[0] + l1 * inv_z[1] + l2 * inv_z[2];
        const double depth = 1.0 / iz;
        const UV uv{(l0 * u_z[0] + l1 * u_z[1] + l2 * u_z[2]) * depth,
                    (l0 * v_z[0] + l1 * v_z[1] + l2 * v_z[2]) * depth};
        frag(int(px), int(py), depth, uv, back);
      }
      for (int i = 0; i < 3; ++i) w[i] += A[i] * step;
    }
  }
  return true;
}

/// View-space triangle clipped against z = -near; yields 0, 1 or 2 triangles.
struct ViewVertex {
  Vec3 p;
  UV uv;
};
int clip_near(const std::array<ViewVertex, 3>& tri, double near_plane,
              std::array<std::array<ViewVertex, 3>, 2>& out);

/// Player-view pass. Objects drawn in ascending id order, backfaces culled.
RenderOutput render(const Scene& scene, const Camera& cam, const RasterOverrides& overrides,
                    uint64_t frame_index, int width, int height);

/// Geometry coverage (no color) under a given far plane, culling backfaces.
std::vector<uint8_t> render_coverage(const Scene& scene, const Camera& cam, double far_plane, int width,
                                     int height);

/// Which mask rules beyond tagged objects are active this frame.
struct MaskRules {
  std::optional<TagId> boundary_hole;  // skybox below the horizon
  struct FarDifferential {
    double nominal_far = 100.0;
    TagId tag = kNoBug;
  };
  std::optional<FarDifferential> far_differential;
};

/// Geometry-derived mask: tagged objects, back-facing winners, skybox below
/// horizon, far-plane differential, in that order. Post-phase rules are
/// applied separately.
Image render_mask(const Scene& scene, const Camera& cam, const MaskRules& rules, const FragmentMeta& meta,
                  const DepthBuffer& depth, const RasterOverrides& overrides, uint64_t frame_index);

}  // namespace bugworld
