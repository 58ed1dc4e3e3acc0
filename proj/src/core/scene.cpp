#include "scene.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "error.hpp"

namespace bugworld {

RGB8 tag_color(TagId tag) {
  if (tag == kNoBug) return {0, 0, 0};
  const double hue = std::fmod(double(tag - 1) * 137.508, 360.0);
  const double hp = hue / 60.0;
  const double x = 1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0);
  double r = 0, g = 0, b = 0;
  switch (int(hp)) {
    case 0: r = 1; g = x; break;
    case 1: r = x; g = 1; break;
    case 2: g = 1; b = x; break;
    case 3: g = x; b = 1; break;
    case 4: r = x; b = 1; break;
    default: r = 1; b = x; break;
  }
  auto q = [](double c) { return uint8_t(std::floor(c * 255.0 + 0.5)); };
  return {q(r), q(g), q(b)};
}

TagRegistry::TagRegistry() : names_{"none"} {
  // The palette must stay injective well past the catalog size.
  std::vector<uint32_t> seen;
  for (TagId t = 0; t <= 64; ++t) {
    const RGB8 c = tag_color(t);
    seen.push_back(uint32_t(c.r) << 16 | uint32_t(c.g) << 8 | c.b);
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw std::logic_error("tag palette is not injective");
}

TagId TagRegistry::add(const std::string& name) {
  names_.push_back(name);
  return TagId(names_.size() - 1);
}

bool TagRegistry::is_palette_color(RGB8 c) const {
  for (TagId t = 0; t < names_.size(); ++t)
    if (tag_color(t) == c) return true;
  return false;
}

Vec3 transform_point(const Transform& t, const Vec3& p) {
  const double a = deg2rad(t.yaw);
  const double c = std::cos(a), s = std::sin(a);
  const Vec3 q = p * t.scale;
  return Vec3{q.x * c + q.z * s, q.y, -q.x * s + q.z * c} + t.translation;
}

Vec3 inverse_transform_point(const Transform& t, const Vec3& p) {
  const double a = deg2rad(t.yaw);
  const double c = std::cos(a), s = std::sin(a);
  const Vec3 q = p - t.translation;
  const Vec3 r{q.x * c - q.z * s, q.y, q.x * s + q.z * c};
  return r * (1.0 / t.scale);
}

AABB mesh_aabb(const TriMesh& mesh, const Transform& t) {
  if (mesh.vertices.empty()) throw Error(ErrorCode::kBadArgument, "mesh_aabb: empty mesh");
  AABB box{transform_point(t, mesh.vertices.front()), transform_point(t, mesh.vertices.front())};
  for (const Vec3& v : mesh.vertices) {
    const Vec3 w = transform_point(t, v);
    box.min = {std::min(box.min.x, w.x), std::min(box.min.y, w.y), std::min(box.min.z, w.z)};
    box.max = {std::max(box.max.x, w.x), std::max(box.max.y, w.y), std::max(box.max.z, w.z)};
  }
  return box;
}

namespace {

void add_face(TriMesh& m, Vec3 center, Vec3 u, Vec3 v) {
  const auto base = uint32_t(m.vertices.size());
  m.vertices.push_back(center - u - v);
  m.vertices.push_back(center + u - v);
  m.vertices.push_back(center + u + v);
  m.vertices.push_back(center - u + v);
  m.uvs.push_back({0, 1});
  m.uvs.push_back({1, 1});
  m.uvs.push_back({1, 0});
  m.uvs.push_back({0, 0});
  m.triangles.push_back({base, base + 1, base + 2});
  m.triangles.push_back({base, base + 2, base + 3});
}

}  // namespace

TriMesh make_box(double sx, double sy, double sz) {
  const double hx = sx / 2, hy = sy / 2, hz = sz / 2;
  TriMesh m;
  add_face(m, {hx, 0, 0}, {0, 0, -hz}, {0, hy, 0});
  add_face(m, {-hx, 0, 0}, {0, 0, hz}, {0, hy, 0});
  add_face(m, {0, hy, 0}, {hx, 0, 0}, {0, 0, -hz});
  add_face(m, {0, -hy, 0}, {hx, 0, 0}, {0, 0, hz});
  add_face(m, {0, 0, hz}, {hx, 0, 0}, {0, hy, 0});
  add_face(m, {0, 0, -hz}, {-hx, 0, 0}, {0, hy, 0});
  return m;
}

TriMesh make_floor_quad(double sx, double sz) {
  TriMesh m;
  add_face(m, {0, 0, 0}, {sx / 2, 0, 0}, {0, 0, -sz / 2});
  return m;
}

TriMesh build_primitive(const Primitive& p) {
  auto param = [&](const char* key) {
    auto it = p.params.find(key);
    if (it == p.params.end())
      throw Error(ErrorCode::kBadArgument, "primitive '" + p.name + "' missing param " + key);
    return it->second;
  };
  if (p.name == "box") return make_box(param("sx"), param("sy"), param("sz"));
  if (p.name == "floor_quad") return make_floor_quad(param("sx"), param("sz"));
  throw Error(ErrorCode::kBadArgument, "unknown primitive '" + p.name + "'");
}

SceneObject* Scene::find(int64_t id) {
  auto it = std::lower_bound(objects_.begin(), objects_.end(), id,
                             [](const SceneObject& o, int64_t v) { return o.id < v; });
  return (it != objects_.end() && it->id == id) ? &*it : nullptr;
}

const SceneObject* Scene::find(int64_t id) const {
  return const_cast<Scene*>(this)->find(id);
}

void Scene::insert(SceneObject obj) {
  if (!(obj.transform.scale > 0.0))
    throw std::invalid_argument("scene object scale must be positive");
  auto it = std::lower_bound(objects_.begin(), objects_.end(), obj.id,
                             [](const SceneObject& o, int64_t v) { return o.id < v; });
  if (it != objects_.end() && it->id == obj.id)
    throw std::invalid_argument("duplicate scene object id " + std::to_string(obj.id));
  objects_.insert(it, std::move(obj));
}

std::optional<SceneObject> Scene::erase(int64_t id) {
  auto it = std::lower_bound(objects_.begin(), objects_.end(), id,
                             [](const SceneObject& o, int64_t v) { return o.id < v; });
  if (it == objects_.end() || it->id != id) return std::nullopt;
  SceneObject out = std::move(*it);
  objects_.erase(it);
  return out;
}

namespace {

using nlohmann::json;

json rgb_json(RGB8 c) { return json::array({c.r, c.g, c.b}); }
RGB8 rgb_from(const json& j) { return {j.at(0).get<uint8_t>(), j.at(1).get<uint8_t>(), j.at(2).get<uint8_t>()}; }

const char* kind_name(ObjectKind k) {
  switch (k) {
    case ObjectKind::kFloor: return "floor";
    case ObjectKind::kWall: return "wall";
    case ObjectKind::kProp: return "prop";
    case ObjectKind::kOverlay: return "overlay";
  }
  return "prop";
}

ObjectKind kind_from(const std::string& s) {
  if (s == "floor") return ObjectKind::kFloor;
  if (s == "wall") return ObjectKind::kWall;
  if (s == "overlay") return ObjectKind::kOverlay;
  if (s == "prop") return ObjectKind::kProp;
  throw Error(ErrorCode::kBadArgument, "unknown object kind '" + s + "'");
}

}  // namespace

nlohmann::json scene_to_json(const Scene& scene) {
  json objs = json::array();
  for (const SceneObject& o : scene.objects()) {
    json mat = {{"color", rgb_json(o.material.color)}};
    if (o.material.texture) {
      const Texture& t = *o.material.texture;
      std::vector<uint8_t> texels(t.bytes().begin(), t.bytes().end());
      mat["texture"] = {{"width", t.width}, {"height", t.height}, {"texels", texels}};
    }
    json obj = {
        {"id", o.id},
        {"kind", kind_name(o.kind)},
        {"mesh", {{"primitive", o.primitive.name}, {"params", o.primitive.params}}},
        {"material", mat},
        {"transform",
         {{"translation", {o.transform.translation.x, o.transform.translation.y, o.transform.translation.z}},
          {"yaw", o.transform.yaw},
          {"scale", o.transform.scale}}},
        {"bug_tag", o.bug_tag ? json(*o.bug_tag) : json(nullptr)},
    };
    objs.push_back(std::move(obj));
  }
  return {
      {"version", kSceneFormatVersion},
      {"skybox", {{"horizon", rgb_json(scene.skybox.horizon)}, {"zenith", rgb_json(scene.skybox.zenith)}}},
      {"floor_height", scene.floor_height},
      {"objects", objs},
  };
}

Scene scene_from_json(const nlohmann::json& doc) {
  if (doc.at("version").get<int>() != kSceneFormatVersion)
    throw Error(ErrorCode::kBadArgument, "unsupported scene version");
  Scene scene;
  scene.skybox.horizon = rgb_from(doc.at("skybox").at("horizon"));
  scene.skybox.zenith = rgb_from(doc.at("skybox").at("zenith"));
  scene.floor_height = doc.at("floor_height").get<double>();
  for (const json& j : doc.at("objects")) {
    SceneObject o;
    o.id = j.at("id").get<int64_t>();
    o.kind = kind_from(j.at("kind").get<std::string>());
    o.primitive.name = j.at("mesh").at("primitive").get<std::string>();
    o.primitive.params = j.at("mesh").at("params").get<std::map<std::string, double>>();
    o.mesh = build_primitive(o.primitive);
    const json& mat = j.at("material");
    o.material.color = rgb_from(mat.at("color"));
    if (mat.contains("texture")) {
      const json& t = mat.at("texture");
      Texture tex(t.at("width").get<int>(), t.at("height").get<int>());
      auto texels = t.at("texels").get<std::vector<uint8_t>>();
      if (texels.size() != tex.pixels.size() * 3)
        throw Error(ErrorCode::kBadArgument, "texture texel count mismatch");
      for (size_t i = 0; i < tex.pixels.size(); ++i)
        tex.pixels[i] = {texels[3 * i], texels[3 * i + 1], texels[3 * i + 2]};
      o.material.texture = std::move(tex);
    }
    const json& tr = j.at("transform");
    o.transform.translation = {tr.at("translation").at(0).get<double>(), tr.at("translation").at(1).get<double>(),
                               tr.at("translation").at(2).get<double>()};
    o.transform.yaw = tr.at("yaw").get<double>();
    o.transform.scale = tr.at("scale").get<double>();
    if (!j.at("bug_tag").is_null()) o.bug_tag = j.at("bug_tag").get<TagId>();
    scene.insert(std::move(o));
  }
  return scene;
}

}  // namespace bugworld
