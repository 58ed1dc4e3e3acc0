#include "world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <tuple>

#include "error.hpp"

namespace bugworld {

std::string_view action_name(Action a) {
  switch (a) {
    case Action::kNoop: return "NOOP";
    case Action::kForward: return "FORWARD";
    case Action::kBack: return "BACK";
    case Action::kStrafeLeft: return "STRAFE_LEFT";
    case Action::kStrafeRight: return "STRAFE_RIGHT";
    case Action::kTurnLeft: return "TURN_LEFT";
    case Action::kTurnRight: return "TURN_RIGHT";
    case Action::kLookUp: return "LOOK_UP";
    case Action::kLookDown: return "LOOK_DOWN";
    case Action::kJump: return "JUMP";
    case Action::kInteract: return "INTERACT";
  }
  return "?";
}

bool is_movement_action(Action a) {
  return a == Action::kForward || a == Action::kBack || a == Action::kStrafeLeft ||
         a == Action::kStrafeRight || a == Action::kJump;
}

// ---------------------------------------------------------------------------
// Grid

LevelGrid::LevelGrid(int width, int height)
    : width_(width),
      height_(height),
      flags_(size_t(width) * size_t(height), kNorth | kEast | kSouth | kWest),
      floor_y_(size_t(width) * size_t(height), 0.0) {
  if (width < 1 || height < 1) throw Error(ErrorCode::kBadArgument, "grid dimensions must be >= 1");
}

Cell neighbor(Cell c, WallFlag side) {
  switch (side) {
    case kNorth: return {c.x, c.y + 1};
    case kEast: return {c.x + 1, c.y};
    case kSouth: return {c.x, c.y - 1};
    case kWest: return {c.x - 1, c.y};
  }
  return c;
}

WallFlag opposite(WallFlag side) {
  switch (side) {
    case kNorth: return kSouth;
    case kEast: return kWest;
    case kSouth: return kNorth;
    case kWest: return kEast;
  }
  return side;
}

void LevelGrid::open(Cell c, WallFlag side) {
  const Cell n = neighbor(c, side);
  if (!in_range(c) || !in_range(n)) throw Error(ErrorCode::kBadArgument, "cannot open a boundary wall");
  flags_[index(c)] &= uint8_t(~side);
  flags_[index(n)] &= uint8_t(~opposite(side));
}

bool LevelGrid::passable(Cell a, Cell b) const {
  if (!in_range(a) || !in_range(b)) return false;
  for (WallFlag s : {kNorth, kEast, kSouth, kWest})
    if (neighbor(a, s) == b) return !has_wall(a, s);
  return false;
}

Cell LevelGrid::cell_at(const Vec3& p) const {
  return {int(std::floor(p.x / kCellSize)), int(std::floor(p.z / kCellSize))};
}

size_t LevelGrid::open_interior_edges() const {
  size_t n = 0;
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x) {
      if (x + 1 < width_ && !has_wall({x, y}, kEast)) ++n;
      if (y + 1 < height_ && !has_wall({x, y}, kNorth)) ++n;
    }
  return n;
}

LevelGrid maze_generate(uint64_t seed, int width, int height) {
  LevelGrid grid(width, height);
  Rng rng(seed);
  std::vector<uint8_t> visited(size_t(width) * size_t(height), 0);
  auto idx = [width](Cell c) { return size_t(c.y) * size_t(width) + size_t(c.x); };
  std::vector<Cell> stack{{0, 0}};
  visited[0] = 1;
  while (!stack.empty()) {
    const Cell c = stack.back();
    WallFlag options[4];
    int k = 0;
    for (WallFlag s : {kNorth, kEast, kSouth, kWest}) {
      const Cell n = neighbor(c, s);
      if (grid.in_range(n) && !visited[idx(n)]) options[k++] = s;
    }
    if (k == 0) {
      stack.pop_back();
      continue;
    }
    const WallFlag s = options[rng.below(uint64_t(k))];
    const Cell n = neighbor(c, s);
    grid.open(c, s);
    visited[idx(n)] = 1;
    stack.push_back(n);
  }
  grid.spawn = {0, 0};
  grid.goal = Cell{width - 1, height - 1};
  return grid;
}

LevelGrid open_room(int width, int height) {
  LevelGrid grid(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      if (x + 1 < width) grid.open({x, y}, kEast);
      if (y + 1 < height) grid.open({x, y}, kNorth);
    }
  return grid;
}

namespace {

int64_t cell_block(const LevelGrid& g, Cell c) { return 1 + (int64_t(c.y) * g.width() + c.x) * 16; }

int side_slot(WallFlag side) {
  switch (side) {
    case kSouth: return 0;
    case kWest: return 1;
    case kNorth: return 2;
    case kEast: return 3;
  }
  return 0;
}

}  // namespace

int64_t floor_id(const LevelGrid& g, Cell c) { return cell_block(g, c); }

int64_t wall_id(const LevelGrid& g, Cell c, WallFlag side) { return cell_block(g, c) + 1 + side_slot(side); }

int64_t pit_wall_id(const LevelGrid& g, Cell c, WallFlag side) { return cell_block(g, c) + 5 + side_slot(side); }

int64_t post_id(const LevelGrid& g, int i, int j) {
  const int cx = std::min(i, g.width() - 1), cy = std::min(j, g.height() - 1);
  const int slot = (i == g.width() ? 2 : 0) + (j == g.height() ? 1 : 0);  // SW corner, NW, SE, NE
  return cell_block(g, {cx, cy}) + 9 + slot;
}

// ---------------------------------------------------------------------------
// Textures

Texture floor_texture() {
  Texture t(8, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x)
      t.at(x, y) = ((x / 2 + y / 2) % 2) ? RGB8{118, 112, 104} : RGB8{146, 140, 128};
  return t;
}

Texture wall_texture() {
  Texture t(16, 16);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) {
      const int row = y / 4;
      const int offset = (row % 2) * 4;
      const bool mortar = (y % 4 == 3) || ((x + offset) % 8 == 7);
      const uint8_t shade = uint8_t(136 + ((x + offset) / 8 + row) % 2 * 18);
      t.at(x, y) = mortar ? RGB8{196, 190, 176} : RGB8{shade, 72, 52};
    }
  return t;
}

Texture crate_texture() {
  Texture t(8, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      const bool border = x == 0 || y == 0 || x == 7 || y == 7;
      const bool brace = x == y || x == 7 - y;
      t.at(x, y) = border ? RGB8{92, 60, 28} : brace ? RGB8{128, 88, 40} : RGB8{184, 134, 70};
    }
  return t;
}

Texture stone_texture() {
  Texture t(8, 8);
  Rng rng(0x5707e);
  for (RGB8& p : t.pixels) {
    const auto v = uint8_t(100 + rng.below(40));
    p = {v, v, uint8_t(v + 8)};
  }
  return t;
}

// ---------------------------------------------------------------------------
// Level geometry

namespace {

SceneObject make_wall_object(int64_t id, Vec3 center, double sx, double sy, double sz) {
  SceneObject o;
  o.id = id;
  o.kind = ObjectKind::kWall;
  o.primitive = {"box", {{"sx", sx}, {"sy", sy}, {"sz", sz}}};
  o.mesh = build_primitive(o.primitive);
  o.material.texture = wall_texture();
  o.transform.translation = center;
  return o;
}

}  // namespace

Scene build_level(const LevelGrid& g) {
  constexpr double S = LevelGrid::kCellSize, H = LevelGrid::kWallHeight, T = LevelGrid::kWallThickness;
  constexpr double L = S - T;  // wall segment between two posts
  Scene scene;
  for (int y = 0; y < g.height(); ++y)
    for (int x = 0; x < g.width(); ++x) {
      const Cell c{x, y};
      SceneObject floor;
      floor.id = floor_id(g, c);
      floor.kind = ObjectKind::kFloor;
      floor.primitive = {"floor_quad", {{"sx", S}, {"sz", S}}};
      floor.mesh = build_primitive(floor.primitive);
      floor.material.texture = floor_texture();
      floor.transform.translation = g.cell_center(c, g.floor_y(c));
      scene.insert(std::move(floor));

      const double x0 = x * S, z0 = y * S;
      if (g.has_wall(c, kSouth))
        scene.insert(make_wall_object(wall_id(g, c, kSouth), {x0 + S / 2, H / 2, z0}, L, H, T));
      if (g.has_wall(c, kWest))
        scene.insert(make_wall_object(wall_id(g, c, kWest), {x0, H / 2, z0 + S / 2}, T, H, L));
      if (y == g.height() - 1 && g.has_wall(c, kNorth))
        scene.insert(make_wall_object(wall_id(g, c, kNorth), {x0 + S / 2, H / 2, z0 + S}, L, H, T));
      if (x == g.width() - 1 && g.has_wall(c, kEast))
        scene.insert(make_wall_object(wall_id(g, c, kEast), {x0 + S, H / 2, z0 + S / 2}, T, H, L));

      // Sunken cells are lined inside their own footprint down to the floor,
      // so no face is coplanar with the neighboring floors.
      const double fy = g.floor_y(c);
      if (fy < 0.0) {
        const double h = -fy, cy = fy + h / 2;
        scene.insert(make_wall_object(pit_wall_id(g, c, kSouth), {x0 + S / 2, cy, z0 + T / 2}, S, h, T));
        scene.insert(make_wall_object(pit_wall_id(g, c, kWest), {x0 + T / 2, cy, z0 + S / 2}, T, h, S - 2 * T));
        scene.insert(make_wall_object(pit_wall_id(g, c, kNorth), {x0 + S / 2, cy, z0 + S - T / 2}, S, h, T));
        scene.insert(make_wall_object(pit_wall_id(g, c, kEast), {x0 + S - T / 2, cy, z0 + S / 2}, T, h, S - 2 * T));
      }
    }

  // A post at every grid vertex that a wall touches.
  auto wall_at = [&](int cx, int cy, WallFlag side) {
    return g.in_range({cx, cy}) && g.has_wall({cx, cy}, side);
  };
  for (int j = 0; j <= g.height(); ++j)
    for (int i = 0; i <= g.width(); ++i) {
      const bool touched = wall_at(i - 1, j, kSouth) || wall_at(i, j, kSouth) || wall_at(i - 1, j - 1, kNorth) ||
                           wall_at(i, j - 1, kNorth) || wall_at(i, j - 1, kWest) || wall_at(i, j, kWest) ||
                           wall_at(i - 1, j - 1, kEast) || wall_at(i - 1, j, kEast);
      if (touched) scene.insert(make_wall_object(post_id(g, i, j), {i * S, H / 2, j * S}, T, H, T));
    }
  return scene;
}

// ---------------------------------------------------------------------------
// Navigation

NavGrid::NavGrid(const LevelGrid& grid, std::vector<Cell> blocked)
    : grid_(grid), blocked_(size_t(grid.width()) * size_t(grid.height()), 0) {
  for (Cell c : blocked)
    if (grid.in_range(c)) blocked_[size_t(c.y) * size_t(grid.width()) + size_t(c.x)] = 1;
  for (int y = 0; y < grid.height(); ++y)
    for (int x = 0; x < grid.width(); ++x)
      if (walkable({x, y})) cells_.push_back({x, y});
}

bool NavGrid::walkable(Cell c) const {
  return grid_.in_range(c) && !blocked_[size_t(c.y) * size_t(grid_.width()) + size_t(c.x)];
}

std::vector<Cell> NavGrid::neighbors(Cell c) const {
  std::vector<Cell> out;
  for (WallFlag s : {kSouth, kWest, kEast, kNorth}) {  // ascending (y, x)
    const Cell n = neighbor(c, s);
    if (walkable(n) && !grid_.has_wall(c, s)) out.push_back(n);
  }
  return out;
}

std::optional<std::vector<Cell>> astar(const NavGrid& nav, Cell start, Cell goal) {
  const LevelGrid& g = nav.grid();
  if (!g.in_range(start) || !g.in_range(goal))
    throw Error(ErrorCode::kBadArgument, "astar: cell out of range");
  if (start == goal) return std::vector<Cell>{start};
  const size_t n = size_t(g.width()) * size_t(g.height());
  auto idx = [&](Cell c) { return size_t(c.y) * size_t(g.width()) + size_t(c.x); };
  auto h = [&](Cell c) { return std::abs(c.x - goal.x) + std::abs(c.y - goal.y); };
  constexpr int kInf = std::numeric_limits<int>::max();
  std::vector<int> cost(n, kInf);
  std::vector<Cell> parent(n, Cell{-1, -1});
  std::vector<uint8_t> closed(n, 0);
  // (f, h, y, x): ties prefer nodes nearer the goal, then smaller (y, x)
  std::set<std::tuple<int, int, int, int>> open;
  cost[idx(start)] = 0;
  open.insert({h(start), h(start), start.y, start.x});
  while (!open.empty()) {
    const auto [f, hh, cy, cx] = *open.begin();
    open.erase(open.begin());
    const Cell c{cx, cy};
    if (closed[idx(c)]) continue;
    closed[idx(c)] = 1;
    if (c == goal) break;
    for (Cell nb : nav.neighbors(c)) {
      const int ng = cost[idx(c)] + 1;
      if (ng < cost[idx(nb)]) {
        if (cost[idx(nb)] != kInf) open.erase({cost[idx(nb)] + h(nb), h(nb), nb.y, nb.x});
        cost[idx(nb)] = ng;
        parent[idx(nb)] = c;
        open.insert({ng + h(nb), h(nb), nb.y, nb.x});
      }
    }
  }
  if (cost[idx(goal)] == kInf) return std::nullopt;
  std::vector<Cell> path;
  for (Cell c = goal; !(c == start); c = parent[idx(c)]) path.push_back(c);
  path.push_back(start);
  std::reverse(path.begin(), path.end());
  return path;
}

// ---------------------------------------------------------------------------
// Physics

Colliders colliders_from_scene(const Scene& scene) {
  Colliders col;
  for (const SceneObject& o : scene.objects()) {
    if (o.kind == ObjectKind::kOverlay) continue;
    const AABB box = o.world_aabb();
    if (o.kind == ObjectKind::kFloor) {
      col.supports.push_back(box);
      continue;
    }
    col.obstacles.push_back({box, o.kind == ObjectKind::kWall});
    AABB top = box;
    top.min.y = box.max.y;
    col.supports.push_back(top);
  }
  return col;
}

namespace {

constexpr double kEps = 1e-9;
constexpr double kClipRadius = 1e-3;

struct Shape {
  AABB box;
  double radius;
};

Shape collision_shape(const Obstacle& o, const PhysicsParams& p) {
  if (!(p.wall_clip && o.is_wall)) return {o.box, AgentBody::kRadius};
  AABB b = o.box;
  auto shrink = [&](double& lo, double& hi) {
    const double mid = (lo + hi) / 2;
    lo = std::min(mid, lo + p.clip_penetration);
    hi = std::max(mid, hi - p.clip_penetration);
  };
  shrink(b.min.x, b.max.x);
  shrink(b.min.z, b.max.z);
  return {b, kClipRadius};
}

bool vertical_overlap(const AgentBody& body, const AABB& box) {
  return body.position.y - AgentBody::kRadius < box.max.y - kEps &&
         body.position.y + AgentBody::kRadius > box.min.y + kEps;
}

// axis 0 = x, 2 = z
void sweep_axis(AgentBody& body, double delta, int axis, const Colliders& col, const PhysicsParams& p) {
  if (delta == 0.0) return;
  double& pos = axis == 0 ? body.position.x : body.position.z;
  const double other = axis == 0 ? body.position.z : body.position.x;
  double target = pos + delta;
  for (const Obstacle& o : col.obstacles) {
    if (!vertical_overlap(body, o.box)) continue;
    const Shape s = collision_shape(o, p);
    const double lo = axis == 0 ? s.box.min.x : s.box.min.z;
    const double hi = axis == 0 ? s.box.max.x : s.box.max.z;
    const double olo = axis == 0 ? s.box.min.z : s.box.min.x;
    const double ohi = axis == 0 ? s.box.max.z : s.box.max.x;
    const double d_other = std::max({olo - other, 0.0, other - ohi});
    if (d_other >= s.radius) continue;
    const double half = std::sqrt(s.radius * s.radius - d_other * d_other);
    const double mid = (lo + hi) / 2;
    if (delta > 0 && pos < mid) {
      target = std::min(target, std::max(pos, lo - half));
    } else if (delta < 0 && pos > mid) {
      target = std::max(target, std::min(pos, hi + half));
    }
  }
  pos = target;
}

double ground_under(const Colliders& col, double x, double z, double max_top) {
  double best = -std::numeric_limits<double>::infinity();
  for (const AABB& s : col.supports) {
    if (x < s.min.x || x > s.max.x || z < s.min.z || z > s.max.z) continue;
    if (s.max.y <= max_top && s.max.y > best) best = s.max.y;
  }
  return best;
}

void depenetrate(AgentBody& body, const Colliders& col, const PhysicsParams& p) {
  for (int iter = 0; iter < 4; ++iter) {
    bool moved = false;
    for (const Obstacle& o : col.obstacles) {
      if (!vertical_overlap(body, o.box)) continue;
      const Shape s = collision_shape(o, p);
      const double cx = std::clamp(body.position.x, s.box.min.x, s.box.max.x);
      const double cz = std::clamp(body.position.z, s.box.min.z, s.box.max.z);
      const double dx = body.position.x - cx, dz = body.position.z - cz;
      const double d = std::sqrt(dx * dx + dz * dz);
      if (d >= s.radius - kEps) continue;
      if (d > 1e-12) {
        body.position.x = cx + dx / d * s.radius;
        body.position.z = cz + dz / d * s.radius;
      } else {
        const double to_min_x = body.position.x - s.box.min.x, to_max_x = s.box.max.x - body.position.x;
        const double to_min_z = body.position.z - s.box.min.z, to_max_z = s.box.max.z - body.position.z;
        const double m = std::min({to_min_x, to_max_x, to_min_z, to_max_z});
        if (m == to_min_x) body.position.x = s.box.min.x - s.radius;
        else if (m == to_max_x) body.position.x = s.box.max.x + s.radius;
        else if (m == to_min_z) body.position.z = s.box.min.z - s.radius;
        else body.position.z = s.box.max.z + s.radius;
      }
      moved = true;
    }
    if (!moved) break;
  }
}

}  // namespace

PhysicsEvents step_physics(AgentBody& body, Action action, const Colliders& col, const PhysicsParams& p) {
  PhysicsEvents ev;
  Orientation& o = body.orientation;
  switch (action) {
    case Action::kTurnLeft: o.set_yaw(o.yaw + p.turn_step); break;
    case Action::kTurnRight: o.set_yaw(o.yaw - p.turn_step); break;
    case Action::kLookUp: o.set_pitch(o.pitch + p.turn_step); break;
    case Action::kLookDown: o.set_pitch(o.pitch - p.turn_step); break;
    case Action::kJump:
      if (body.grounded) {
        body.vertical_velocity = p.jump_speed;
        body.grounded = false;
      } else if (p.allow_air_jump) {
        body.vertical_velocity = p.jump_speed;
        ev.air_jump_applied = true;
      }
      break;
    default: break;
  }

  const double yaw = deg2rad(o.yaw);
  const Vec3 forward{std::sin(yaw), 0.0, std::cos(yaw)};
  const Vec3 right{-std::cos(yaw), 0.0, std::sin(yaw)};
  Vec3 dir;
  switch (action) {
    case Action::kForward: dir = forward; break;
    case Action::kBack: dir = forward * -1.0; break;
    case Action::kStrafeRight: dir = right; break;
    case Action::kStrafeLeft: dir = right * -1.0; break;
    default: break;
  }
  const Vec3 delta = dir * (p.move_speed * p.dt);
  sweep_axis(body, delta.x, 0, col, p);
  sweep_axis(body, delta.z, 2, col, p);

  const double bottom = body.position.y - AgentBody::kRadius;
  if (body.grounded) {
    const double g = ground_under(col, body.position.x, body.position.z, bottom + kEps);
    if (g < bottom - kEps) body.grounded = false;
  }
  if (!body.grounded) {
    const double prev_bottom = body.position.y - AgentBody::kRadius;
    body.position.y += body.vertical_velocity * p.dt - 0.5 * p.gravity * p.dt * p.dt;
    body.vertical_velocity -= p.gravity * p.dt;
    const double g = ground_under(col, body.position.x, body.position.z, prev_bottom + kEps);
    if (body.position.y - AgentBody::kRadius <= g) {
      body.position.y = g + AgentBody::kRadius;
      body.vertical_velocity = 0.0;
      body.grounded = true;
    }
  }
  depenetrate(body, col, p);
  return ev;
}

bool stuck_detect(const PositionHistory& history, size_t window, double eps) {
  const auto& e = history.entries();
  if (window == 0 || e.size() < window) return false;
  const size_t first = e.size() - window;
  size_t moves = 0;
  for (size_t i = first; i < e.size(); ++i)
    if (is_movement_action(e[i].action)) ++moves;
  if (2 * moves < window) return false;
  double max_d2 = 0.0;
  for (size_t i = first; i < e.size(); ++i)
    for (size_t j = i + 1; j < e.size(); ++j) {
      const double dx = e[i].position.x - e[j].position.x;
      const double dz = e[i].position.z - e[j].position.z;
      max_d2 = std::max(max_d2, dx * dx + dz * dz);
    }
  return max_d2 < eps * eps;
}

// ---------------------------------------------------------------------------
// Navigation agent

double heading_error(const AgentBody& body, const Vec3& target) {
  const double desired = rad2deg(std::atan2(target.x - body.position.x, target.z - body.position.z));
  double err = std::fmod(desired - body.orientation.yaw, 360.0);
  if (err <= -180.0) err += 360.0;
  if (err > 180.0) err -= 360.0;
  return err;
}

NavAgent::NavAgent(uint64_t seed) : rng_(seed) { until_look_ = int(rng_.range(40, 80)); }

void NavAgent::schedule_look_around() {
  look_remaining_ = kLookAroundLength;
  until_look_ = int(rng_.range(40, 80));
}

Action NavAgent::act(const AgentBody& body, const NavGrid& nav) {
  static constexpr Action kLookSequence[kLookAroundLength] = {
      Action::kLookUp,    Action::kLookUp,     Action::kTurnLeft,  Action::kTurnLeft, Action::kTurnLeft,
      Action::kTurnRight, Action::kTurnRight, Action::kTurnRight, Action::kLookDown, Action::kLookDown};
  if (look_remaining_ > 0) return kLookSequence[kLookAroundLength - look_remaining_--];
  if (--until_look_ <= 0) {
    schedule_look_around();
    return kLookSequence[kLookAroundLength - look_remaining_--];
  }

  const LevelGrid& g = nav.grid();
  // Goals equal to the current cell are consumed at once; replan a few times.
  for (int attempt = 0; attempt < 8; ++attempt) {
    if (next_ >= path_.size()) {
      path_.clear();
      next_ = 0;
      const Cell here = g.cell_at(body.position);
      const auto& cells = nav.walkable_cells();
      if (cells.empty() || !g.in_range(here)) return Action::kNoop;
      const Cell goal = cells[rng_.below(cells.size())];
      auto route = astar(nav, here, goal);
      if (!route) return Action::kNoop;
      path_ = std::move(*route);
    }
    const Vec3 wp = g.cell_center(path_[next_], body.position.y);
    const double dx = wp.x - body.position.x, dz = wp.z - body.position.z;
    if (std::sqrt(dx * dx + dz * dz) < kArrivalRadius) {
      ++next_;
      continue;
    }
    const double err = heading_error(body, wp);
    if (std::fabs(err) > kHeadingTolerance) return err > 0 ? Action::kTurnLeft : Action::kTurnRight;
    return Action::kForward;
  }
  return Action::kNoop;
}

// ---------------------------------------------------------------------------
// Built-in environments

namespace {

SceneObject make_prop(int64_t id, Vec3 center, Vec3 size, Texture tex, double yaw = 0.0) {
  SceneObject o;
  o.id = id;
  o.kind = ObjectKind::kProp;
  o.primitive = {"box", {{"sx", size.x}, {"sy", size.y}, {"sz", size.z}}};
  o.mesh = build_primitive(o.primitive);
  o.material.texture = std::move(tex);
  o.transform.translation = center;
  o.transform.yaw = yaw;
  return o;
}

AgentBody spawn_body(const LevelGrid& g, Cell c, double yaw) {
  AgentBody b;
  b.position = g.cell_center(c, g.floor_y(c) + AgentBody::kRadius);
  b.orientation.set_yaw(yaw);
  return b;
}

AABB grid_bounds(const LevelGrid& g) {
  return {{0.0, -1e9, 0.0}, {g.width() * LevelGrid::kCellSize, 1e9, g.height() * LevelGrid::kCellSize}};
}

Level static_room() {
  Level lv;
  lv.env_id = "StaticRoom-v0";
  lv.grid = open_room(3, 3);
  lv.grid.spawn = {1, 0};
  lv.scene = build_level(lv.grid);
  lv.scene.insert(make_prop(kPropIdBase + 1, {1.8, 0.4, 4.4}, {0.8, 0.8, 0.8}, crate_texture()));
  lv.scene.insert(make_prop(kPropIdBase + 2, {4.2, 0.5, 4.0}, {1.0, 1.0, 1.0}, crate_texture(), 20.0));
  lv.scene.insert(make_prop(kPropIdBase + 3, {1.0, 0.9, 2.4}, {0.6, 1.8, 0.6}, stone_texture()));
  lv.scene.insert(make_prop(kPropIdBase + 4, {3.0, 1.2, 5.75}, {1.4, 1.0, 0.3}, stone_texture()));
  lv.scene.insert(make_prop(kPropIdBase + 5, {5.2, 0.35, 2.2}, {0.7, 0.7, 0.7}, crate_texture()));
  lv.nav = NavGrid(lv.grid);
  lv.spawn = spawn_body(lv.grid, lv.grid.spawn, 0.0);
  lv.bounds = grid_bounds(lv.grid);
  lv.bug_defaults = {
      {"texture_missing", {{"target", double(kPropIdBase + 1)}}},
      {"texture_corruption", {{"target", double(kPropIdBase + 2)}}},
      {"geometry_corruption", {{"target", double(kPropIdBase + 3)}}},
      {"z_fighting", {{"target", double(kPropIdBase + 4)}}},
      {"geometry_clipping", {{"target", double(kPropIdBase + 5)}}},
      {"boundary_hole", {{"target", double(floor_id(lv.grid, {1, 1}))}}},
  };
  return lv;
}

Level maze(const EnvConfig& cfg, uint64_t seed) {
  Level lv;
  lv.env_id = "Maze-v0";
  lv.grid = maze_generate(seed, cfg.maze_width, cfg.maze_height);
  const Cell s = lv.grid.spawn;
  lv.scene = build_level(lv.grid);
  // Face the first open passage out of the spawn cell.
  double yaw = 0.0;
  if (lv.grid.has_wall(s, kNorth) && !lv.grid.has_wall(s, kEast)) yaw = 90.0;
  // Small crates tucked into spawn-cell corners, clear of the walking lines.
  const Vec3 c = lv.grid.cell_center(s);
  lv.scene.insert(make_prop(kPropIdBase + 1, {c.x - 0.7, 0.2, c.z - 0.7}, {0.4, 0.4, 0.4}, crate_texture()));
  lv.scene.insert(make_prop(kPropIdBase + 2, {c.x + 0.7, 0.2, c.z - 0.7}, {0.4, 0.4, 0.4}, crate_texture()));
  lv.scene.insert(make_prop(kPropIdBase + 3, {c.x - 0.7, 0.2, c.z + 0.7}, {0.4, 0.4, 0.4}, crate_texture()));
  lv.nav = NavGrid(lv.grid);
  lv.spawn = spawn_body(lv.grid, s, yaw);
  lv.bounds = grid_bounds(lv.grid);
  const Cell ahead = neighbor(s, yaw == 0.0 ? kNorth : kEast);
  lv.bug_defaults = {
      {"texture_missing", {{"target", double(wall_id(lv.grid, s, kSouth))}}},
      {"texture_corruption", {{"target", double(wall_id(lv.grid, s, kWest))}}},
      {"geometry_corruption", {{"target", double(kPropIdBase + 2)}}},
      {"z_fighting", {{"target", double(kPropIdBase + 1)}}},
      {"geometry_clipping", {{"target", double(kPropIdBase + 3)}}},
      {"boundary_hole", {{"target", double(floor_id(lv.grid, lv.grid.in_range(ahead) ? ahead : s))}}},
  };
  return lv;
}

Level getting_stuck() {
  Level lv;
  lv.env_id = "GettingStuck-v0";
  lv.grid = open_room(10, 4);
  lv.grid.spawn = {1, 1};
  lv.grid.shaft = Cell{5, 1};
  lv.grid.set_floor_y(*lv.grid.shaft, -3.0);
  lv.scene = build_level(lv.grid);
  lv.scene.insert(make_prop(kPropIdBase + 1, {5.0, 0.4, 6.6}, {0.8, 0.8, 0.8}, crate_texture()));
  lv.scene.insert(make_prop(kPropIdBase + 2, {7.0, 0.5, 1.0}, {1.0, 1.0, 1.0}, crate_texture()));
  lv.scene.insert(make_prop(kPropIdBase + 3, {15.0, 0.9, 5.0}, {0.6, 1.8, 0.6}, stone_texture()));
  lv.scene.insert(make_prop(kPropIdBase + 4, {8.0, 1.0, 7.75}, {1.6, 1.0, 0.3}, stone_texture()));
  lv.scene.insert(make_prop(kPropIdBase + 5, {3.0, 0.35, 7.2}, {0.7, 0.7, 0.7}, crate_texture()));
  lv.nav = NavGrid(lv.grid, {*lv.grid.shaft});
  lv.spawn = spawn_body(lv.grid, lv.grid.spawn, 90.0);
  lv.bounds = grid_bounds(lv.grid);
  lv.bug_defaults = {
      {"texture_missing", {{"target", double(kPropIdBase + 1)}}},
      {"texture_corruption", {{"target", double(kPropIdBase + 2)}}},
      {"geometry_corruption", {{"target", double(kPropIdBase + 3)}}},
      {"z_fighting", {{"target", double(kPropIdBase + 4)}}},
      {"geometry_clipping", {{"target", double(kPropIdBase + 5)}}},
      {"boundary_hole", {{"target", double(floor_id(lv.grid, {3, 1}))}}},
  };
  return lv;
}

}  // namespace

const std::vector<std::string>& environment_ids() {
  static const std::vector<std::string> ids{"StaticRoom-v0", "Maze-v0", "GettingStuck-v0"};
  return ids;
}

bool is_environment(std::string_view env_id) {
  const auto& ids = environment_ids();
  return std::find(ids.begin(), ids.end(), env_id) != ids.end();
}

Level build_environment(std::string_view env_id, const EnvConfig& config, uint64_t seed) {
  Level lv;
  if (env_id == "StaticRoom-v0") lv = static_room();
  else if (env_id == "Maze-v0") lv = maze(config, seed);
  else if (env_id == "GettingStuck-v0") lv = getting_stuck();
  else throw Error(ErrorCode::kUnknownEnv, "unknown environment '" + std::string(env_id) + "'");
  const Vec3 spawn = lv.spawn.position;
  lv.bug_defaults["crash"] = {{"x", spawn.x}, {"z", spawn.z}, {"radius", 1.0}};
  return lv;
}

}  // namespace bugworld
