#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "types.hpp"

namespace bugworld {

using TagId = uint32_t;
inline constexpr TagId kNoBug = 0;

/// Mask color for a tag: black for kNoBug, otherwise a golden-angle hue
/// walk at full saturation and value.
RGB8 tag_color(TagId tag);

/// Maps tags to names and mask colors. Append-only; tag 0 is always NO_BUG.
class TagRegistry {
 public:
  TagRegistry();

  TagId add(const std::string& name);
  const std::string& name(TagId tag) const { return names_.at(tag); }
  RGB8 color(TagId tag) const { return tag_color(tag); }
  size_t size() const { return names_.size(); }
  bool is_palette_color(RGB8 c) const;

 private:
  std::vector<std::string> names_;
};

struct UV {
  double u = 0.0;
  double v = 0.0;
  bool operator==(const UV&) const = default;
};

/// Triangle mesh with counter-clockwise front faces.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<UV> uvs;
  std::vector<std::array<uint32_t, 3>> triangles;

  bool operator==(const TriMesh&) const = default;
};

using Texture = Image;

struct Material {
  std::optional<Texture> texture;
  RGB8 color{200, 200, 200};  // used when there is no texture

  bool operator==(const Material&) const = default;
};

/// Uniform scale, then yaw about +Y, then translation.
struct Transform {
  Vec3 translation;
  double yaw = 0.0;  // degrees
  double scale = 1.0;

  bool operator==(const Transform&) const = default;
};

Vec3 transform_point(const Transform& t, const Vec3& p);
Vec3 inverse_transform_point(const Transform& t, const Vec3& p);

/// Componentwise bounds of the transformed vertices. Throws on empty meshes.
AABB mesh_aabb(const TriMesh& mesh, const Transform& t);

enum class ObjectKind { kFloor, kWall, kProp, kOverlay };

/// Named mesh generator, kept so that scenes serialize compactly.
struct Primitive {
  std::string name;  // "box" | "floor_quad"
  std::map<std::string, double> params;

  bool operator==(const Primitive&) const = default;
};

TriMesh make_box(double sx, double sy, double sz);
TriMesh make_floor_quad(double sx, double sz);
TriMesh build_primitive(const Primitive& p);

struct SceneObject {
  int64_t id = 0;
  ObjectKind kind = ObjectKind::kProp;
  Primitive primitive;
  TriMesh mesh;
  Material material;
  Transform transform;
  std::optional<TagId> bug_tag;

  AABB world_aabb() const { return mesh_aabb(mesh, transform); }
  bool operator==(const SceneObject&) const = default;
};

struct Skybox {
  RGB8 horizon{170, 200, 230};
  RGB8 zenith{40, 90, 180};
  bool operator==(const Skybox&) const = default;
};

/// Objects kept sorted by id; draw order is ascending id.
class Scene {
 public:
  std::vector<SceneObject>& objects() { return objects_; }
  const std::vector<SceneObject>& objects() const { return objects_; }

  SceneObject* find(int64_t id);
  const SceneObject* find(int64_t id) const;
  // Throws std::invalid_argument on duplicate id or scale <= 0.
  void insert(SceneObject obj);
  std::optional<SceneObject> erase(int64_t id);

  Skybox skybox;
  double floor_height = 0.0;

  bool operator==(const Scene&) const = default;

 private:
  std::vector<SceneObject> objects_;
};

/// Versioned scene document. Geometry is referenced by primitive, so a
/// corrupted mesh serializes as its primitive.
nlohmann::json scene_to_json(const Scene& scene);
Scene scene_from_json(const nlohmann::json& doc);

inline constexpr int kSceneFormatVersion = 1;

}  // namespace bugworld
