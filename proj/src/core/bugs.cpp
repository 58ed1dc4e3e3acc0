#include "bugs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"
#include "rng.hpp"

namespace bugworld {

std::string phase_names(uint8_t phases) {
  std::string out;
  auto add = [&](uint8_t bit, const char* name) {
    if (!(phases & bit)) return;
    if (!out.empty()) out += '+';
    out += name;
  };
  add(kPhaseScene, "SCENE");
  add(kPhaseRaster, "RASTER");
  add(kPhasePost, "POST");
  add(kPhaseLogical, "LOGICAL");
  return out;
}

BugCatalog::BugCatalog(TagRegistry& registry) {
  constexpr double kNoTarget = -1.0;
  auto reg = [&](std::string name, uint8_t phases, BugParams defaults) {
    const TagId tag = registry.add(name);
    specs_.push_back({std::move(name), tag, phases, std::move(defaults)});
  };
  reg("texture_missing", kPhaseScene, {{"target", kNoTarget}});
  reg("texture_corruption", kPhaseScene, {{"target", kNoTarget}});
  reg("z_fighting", kPhaseScene | kPhaseRaster, {{"target", kNoTarget}});
  reg("z_clipping", kPhaseRaster, {{"far", 15.0}});
  reg("geometry_corruption", kPhaseScene, {{"target", kNoTarget}, {"amplitude", 0.3}});
  reg("screen_tear", kPhasePost, {});
  reg("camera_clipping", kPhaseRaster | kPhaseLogical, {{"penetration", 0.1}});
  reg("black_screen", kPhasePost, {});
  reg("boundary_hole", kPhaseScene | kPhaseLogical, {{"target", kNoTarget}});
  reg("geometry_clipping", kPhaseScene, {{"target", kNoTarget}, {"offset_fraction", 0.5}});
  reg("freeze", kPhasePost, {});
  reg("flicker", kPhasePost, {{"probability", 0.5}});
  reg("stuck", kPhaseLogical, {{"window", 90.0}, {"eps", 0.05}});
  reg("out_of_bounds", kPhaseLogical, {{"kill_height", -5.0}});
  reg("invalid_information_access", kPhaseRaster | kPhaseLogical, {{"penetration", 0.1}});
  reg("invalid_action", kPhaseLogical, {});
  reg("crash", kPhaseLogical, {{"x", 0.0}, {"z", 0.0}, {"radius", 1.0}});
}

BugParams BugCatalog::effective(size_t i) const {
  BugParams p = specs_[i].defaults;
  for (const auto& [k, v] : level_params_[i]) p[k] = v;
  for (const auto& [k, v] : user_params_[i]) p[k] = v;
  return p;
}

std::vector<BugInfo> BugCatalog::list() const {
  std::vector<BugInfo> out;
  for (size_t i = 0; i < specs_.size(); ++i)
    out.push_back({specs_[i].name, specs_[i].tag, specs_[i].phases, effective(i), enabled_[i]});
  return out;
}

BugId BugCatalog::id(std::string_view name) const {
  for (size_t i = 0; i < specs_.size(); ++i)
    if (specs_[i].name == name) return BugId(i);
  throw Error(ErrorCode::kUnknownBug, "unknown bug '" + std::string(name) + "'");
}

void BugCatalog::set(std::string_view name, bool enabled, const BugParams& params) {
  const auto i = size_t(id(name));
  for (const auto& [k, v] : params) {
    if (!specs_[i].defaults.contains(k))
      throw Error(ErrorCode::kBadArgument, "bug '" + specs_[i].name + "' has no parameter '" + k + "'");
    if (!std::isfinite(v)) throw Error(ErrorCode::kBadArgument, "parameter '" + k + "' must be finite");
  }
  for (const auto& [k, v] : params) user_params_[i][k] = v;
  enabled_[i] = enabled;
}

double BugCatalog::param(BugId id, const std::string& key) const { return effective(size_t(id)).at(key); }

std::vector<std::string> BugCatalog::active_names() const {
  std::vector<std::string> out;
  for (size_t i = 0; i < specs_.size(); ++i)
    if (enabled_[i]) out.push_back(specs_[i].name);
  return out;
}

void BugCatalog::set_level_defaults(const BugDefaults& defaults) {
  level_params_ = {};
  for (const auto& [name, params] : defaults) level_params_[size_t(id(name))] = params;
}

uint64_t bug_stream_seed(uint64_t episode_seed, std::string_view name) {
  return mix_seed(episode_seed, fnv1a64(name));
}

// ---------------------------------------------------------------------------
// Scene phase

namespace {

SceneObject& require_target(Scene& scene, const BugCatalog& catalog, BugId bug) {
  const double t = catalog.param(bug, "target");
  SceneObject* obj = t >= 0 ? scene.find(int64_t(t)) : nullptr;
  if (!obj)
    throw Error(ErrorCode::kTargetNotFound,
                catalog.spec(bug).name + ": target " + std::to_string(int64_t(t)) + " not in scene");
  return *obj;
}

void shuffle_texels(Texture& tex, Rng& rng) {
  for (size_t i = tex.pixels.size(); i > 1; --i) {
    const size_t j = size_t(rng.below(i));
    std::swap(tex.pixels[i - 1], tex.pixels[j]);
  }
}

// Displaces each distinct vertex position by one offset so the mesh stays closed.
void corrupt_mesh(SceneObject& obj, double amplitude, Rng& rng) {
  std::vector<std::pair<Vec3, Vec3>> offsets;
  const double local = amplitude / obj.transform.scale;
  for (Vec3& v : obj.mesh.vertices) {
    auto it = std::find_if(offsets.begin(), offsets.end(), [&](const auto& e) { return e.first == v; });
    if (it == offsets.end()) {
      const Vec3 d{rng.uniform(-local, local), rng.uniform(-local, local), rng.uniform(-local, local)};
      offsets.emplace_back(v, d);
      it = offsets.end() - 1;
    }
    v = v + it->second;
  }
}

void push_into_nearest_wall(Scene& scene, SceneObject& prop, double fraction) {
  const AABB pb = prop.world_aabb();
  const SceneObject* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const SceneObject& o : scene.objects()) {
    if (o.kind != ObjectKind::kWall) continue;
    const AABB wb = o.world_aabb();
    if (wb.max.y <= pb.min.y || wb.min.y >= pb.max.y) continue;
    const double gx = std::max(0.0, std::max(wb.min.x - pb.max.x, pb.min.x - wb.max.x));
    const double gz = std::max(0.0, std::max(wb.min.z - pb.max.z, pb.min.z - wb.max.z));
    const double d = std::hypot(gx, gz);
    if (d < best_d) {
      best_d = d;
      best = &o;
    }
  }
  if (!best) return;
  const AABB wb = best->world_aabb();
  const double gx = std::max(wb.min.x - pb.max.x, pb.min.x - wb.max.x);
  const double gz = std::max(wb.min.z - pb.max.z, pb.min.z - wb.max.z);
  if (gx >= gz) {
    const double sign = (wb.min.x + wb.max.x) > (pb.min.x + pb.max.x) ? 1.0 : -1.0;
    prop.transform.translation.x += sign * (std::max(gx, 0.0) + fraction * (pb.max.x - pb.min.x));
  } else {
    const double sign = (wb.min.z + wb.max.z) > (pb.min.z + pb.max.z) ? 1.0 : -1.0;
    prop.transform.translation.z += sign * (std::max(gz, 0.0) + fraction * (pb.max.z - pb.min.z));
  }
}

}  // namespace

std::vector<UndoRecord> apply_scene_phase(Scene& scene, const BugCatalog& catalog, uint64_t episode_seed) {
  std::vector<UndoRecord> undo;
  auto modify = [&](BugId bug) -> SceneObject& {
    SceneObject& obj = require_target(scene, catalog, bug);
    undo.push_back({UndoRecord::Kind::kRestore, obj, obj.id});
    obj.bug_tag = catalog.tag(bug);
    return obj;
  };
  try {
    for (int i = 0; i < kBugCount; ++i) {
      const auto bug = BugId(i);
      if (!catalog.enabled(bug) || !(catalog.spec(bug).phases & kPhaseScene)) continue;
      Rng rng(bug_stream_seed(episode_seed, catalog.spec(bug).name));
      switch (bug) {
        case BugId::kTextureMissing: {
          SceneObject& obj = modify(bug);
          obj.material.texture.reset();
          obj.material.color = kMissingTextureColor;
          break;
        }
        case BugId::kTextureCorruption: {
          SceneObject& obj = modify(bug);
          if (obj.material.texture) shuffle_texels(*obj.material.texture, rng);
          break;
        }
        case BugId::kZFighting: {
          SceneObject dup = require_target(scene, catalog, bug);
          dup.id = dup.id + kOverlayIdOffset;
          dup.kind = ObjectKind::kOverlay;
          dup.material.texture.reset();
          dup.material.color = kZFightColor;
          dup.bug_tag = catalog.tag(bug);
          const int64_t dup_id = dup.id;
          scene.insert(std::move(dup));
          undo.push_back({UndoRecord::Kind::kRemove, {}, dup_id});
          break;
        }
        case BugId::kGeometryCorruption: {
          SceneObject& obj = modify(bug);
          corrupt_mesh(obj, catalog.param(bug, "amplitude"), rng);
          break;
        }
        case BugId::kBoundaryHole: {
          const SceneObject& obj = require_target(scene, catalog, bug);
          auto removed = scene.erase(obj.id);
          undo.push_back({UndoRecord::Kind::kReinsert, std::move(*removed), removed->id});
          break;
        }
        case BugId::kGeometryClipping: {
          SceneObject& obj = modify(bug);
          push_into_nearest_wall(scene, obj, catalog.param(bug, "offset_fraction"));
          break;
        }
        default: break;
      }
    }
  } catch (...) {
    undo_scene_phase(scene, undo);
    throw;
  }
  return undo;
}

void undo_scene_phase(Scene& scene, std::vector<UndoRecord>& records) {
  for (auto it = records.rbegin(); it != records.rend(); ++it) {
    switch (it->kind) {
      case UndoRecord::Kind::kRestore: *scene.find(it->saved.id) = std::move(it->saved); break;
      case UndoRecord::Kind::kRemove: scene.erase(it->id); break;
      case UndoRecord::Kind::kReinsert: scene.insert(std::move(it->saved)); break;
    }
  }
  records.clear();
}

// ---------------------------------------------------------------------------
// Raster phase

RasterSetup raster_setup(const BugCatalog& catalog, double nominal_far) {
  RasterSetup s;
  s.overrides.effective_far = nominal_far;
  if (catalog.enabled(BugId::kZFighting)) s.overrides.depth_tie = DepthTie::kParityFlip;
  if (catalog.enabled(BugId::kZClipping)) {
    s.overrides.effective_far = std::min(nominal_far, catalog.param(BugId::kZClipping, "far"));
    s.rules.far_differential = MaskRules::FarDifferential{nominal_far, catalog.tag(BugId::kZClipping)};
  }
  if (catalog.enabled(BugId::kCameraClipping)) s.overrides.mask_backfaces = catalog.tag(BugId::kCameraClipping);
  if (catalog.enabled(BugId::kInvalidInformationAccess))
    s.overrides.mask_backfaces = catalog.tag(BugId::kInvalidInformationAccess);
  if (catalog.enabled(BugId::kBoundaryHole)) s.rules.boundary_hole = catalog.tag(BugId::kBoundaryHole);
  return s;
}

PhysicsParams physics_params(const BugCatalog& catalog) {
  PhysicsParams p;
  p.allow_air_jump = catalog.enabled(BugId::kInvalidAction);
  if (catalog.enabled(BugId::kCameraClipping)) {
    p.wall_clip = true;
    p.clip_penetration = catalog.param(BugId::kCameraClipping, "penetration");
  }
  if (catalog.enabled(BugId::kInvalidInformationAccess)) {
    p.wall_clip = true;
    p.clip_penetration = catalog.param(BugId::kInvalidInformationAccess, "penetration");
  }
  return p;
}

// ---------------------------------------------------------------------------
// Post phase

void paint_full_frame(Image& mask, TagId tag) { std::fill(mask.pixels.begin(), mask.pixels.end(), tag_color(tag)); }

void apply_post_phase(Image& frame, Image& mask, PostHistory& history, const BugCatalog& catalog,
                      uint64_t episode_seed, uint64_t frame_index) {
  const Image raw = frame;
  auto frame_rng = [&](BugId bug) {
    return Rng(mix_seed(bug_stream_seed(episode_seed, catalog.spec(bug).name), frame_index));
  };

  if (catalog.enabled(BugId::kFreeze)) {
    if (!history.frozen) history.frozen = history.last_output ? *history.last_output : frame;
    frame = *history.frozen;
    paint_full_frame(mask, catalog.tag(BugId::kFreeze));
  } else {
    history.frozen.reset();
  }

  if (catalog.enabled(BugId::kScreenTear) && history.previous_render &&
      history.previous_render->width == frame.width && history.previous_render->height == frame.height) {
    Rng rng = frame_rng(BugId::kScreenTear);
    const int h = frame.height;
    const int row = int(rng.range(h / 4, 3 * h / 4));
    const RGB8 c = tag_color(catalog.tag(BugId::kScreenTear));
    for (int y = row; y < h; ++y)
      for (int x = 0; x < frame.width; ++x) {
        frame.at(x, y) = history.previous_render->at(x, y);
        mask.at(x, y) = c;
      }
  }

  if (catalog.enabled(BugId::kFlicker)) {
    Rng rng = frame_rng(BugId::kFlicker);
    if (rng.chance(catalog.param(BugId::kFlicker, "probability"))) {
      std::fill(frame.pixels.begin(), frame.pixels.end(), RGB8{0, 0, 0});
      paint_full_frame(mask, catalog.tag(BugId::kFlicker));
    }
  }

  if (catalog.enabled(BugId::kBlackScreen)) {
    std::fill(frame.pixels.begin(), frame.pixels.end(), RGB8{0, 0, 0});
    paint_full_frame(mask, catalog.tag(BugId::kBlackScreen));
  }

  history.previous_render = raw;
  history.last_output = frame;
}

// ---------------------------------------------------------------------------
// Logical labels

LogicalResult logical_labels(const AgentBody& body, const PositionHistory& history, const AABB& level_bounds,
                             bool air_jump_applied, const BugCatalog& catalog) {
  LogicalResult r;
  const auto window = size_t(catalog.param(BugId::kStuck, "window"));
  r.flags.stuck = stuck_detect(history, window, catalog.param(BugId::kStuck, "eps"));
  const Vec3& p = body.position;
  r.flags.out_of_bounds = p.y < catalog.param(BugId::kOutOfBounds, "kill_height") || p.x < level_bounds.min.x ||
                          p.x > level_bounds.max.x || p.z < level_bounds.min.z || p.z > level_bounds.max.z;
  r.flags.invalid_action_applied = air_jump_applied;
  if (catalog.enabled(BugId::kCrash)) {
    const double dx = p.x - catalog.param(BugId::kCrash, "x");
    const double dz = p.z - catalog.param(BugId::kCrash, "z");
    r.flags.crash = std::hypot(dx, dz) <= catalog.param(BugId::kCrash, "radius");
  }
  if (r.flags.stuck && catalog.enabled(BugId::kStuck)) r.full_frame_tags.push_back(catalog.tag(BugId::kStuck));
  if (r.flags.out_of_bounds && catalog.enabled(BugId::kOutOfBounds))
    r.full_frame_tags.push_back(catalog.tag(BugId::kOutOfBounds));
  if (r.flags.invalid_action_applied && catalog.enabled(BugId::kInvalidAction))
    r.full_frame_tags.push_back(catalog.tag(BugId::kInvalidAction));
  return r;
}

}  // namespace bugworld
