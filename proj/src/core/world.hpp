#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rng.hpp"
#include "scene.hpp"
#include "types.hpp"

namespace bugworld {

// Integer codes are part of the wire and dataset contract.
enum class Action : int {
  kNoop = 0,
  kForward = 1,
  kBack = 2,
  kStrafeLeft = 3,
  kStrafeRight = 4,
  kTurnLeft = 5,
  kTurnRight = 6,
  kLookUp = 7,
  kLookDown = 8,
  kJump = 9,
  kInteract = 10,
};
inline constexpr int kActionCount = 11;

std::string_view action_name(Action a);
bool is_movement_action(Action a);

struct Cell {
  int x = 0;
  int y = 0;
  bool operator==(const Cell&) const = default;
  auto operator<=>(const Cell& o) const {
    if (auto c = y <=> o.y; c != 0) return c;
    return x <=> o.x;
  }
};

enum WallFlag : uint8_t { kNorth = 1, kEast = 2, kSouth = 4, kWest = 8 };

/// Cell grid in the XZ plane. Cell (x, y) spans world x in [2x, 2x+2] and
/// z in [2y, 2y+2]. North is +Z, east is +X.
class LevelGrid {
 public:
  static constexpr double kCellSize = 2.0;
  static constexpr double kWallHeight = 2.0;
  static constexpr double kWallThickness = 0.2;

  LevelGrid() = default;
  // All walls closed.
  LevelGrid(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  bool in_range(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }

  bool has_wall(Cell c, WallFlag side) const { return flags_[index(c)] & side; }
  uint8_t flags(Cell c) const { return flags_[index(c)]; }
  // Opens the wall on both sides. Boundary walls cannot be opened.
  void open(Cell c, WallFlag side);
  bool passable(Cell a, Cell b) const;

  double floor_y(Cell c) const { return floor_y_[index(c)]; }
  void set_floor_y(Cell c, double y) { floor_y_[index(c)] = y; }

  Vec3 cell_center(Cell c, double y = 0.0) const {
    return {(c.x + 0.5) * kCellSize, y, (c.y + 0.5) * kCellSize};
  }
  Cell cell_at(const Vec3& p) const;

  size_t open_interior_edges() const;

  Cell spawn;
  std::optional<Cell> shaft;
  std::optional<Cell> goal;

  bool operator==(const LevelGrid&) const = default;

 private:
  size_t index(Cell c) const { return size_t(c.y) * size_t(width_) + size_t(c.x); }

  int width_ = 0;
  int height_ = 0;
  std::vector<uint8_t> flags_;
  std::vector<double> floor_y_;
};

Cell neighbor(Cell c, WallFlag side);
WallFlag opposite(WallFlag side);

/// Perfect maze by randomized depth-first search with an explicit stack.
LevelGrid maze_generate(uint64_t seed, int width, int height);

/// Room with every interior wall open.
LevelGrid open_room(int width, int height);

// Deterministic object ids derived from cell coordinates.
int64_t floor_id(const LevelGrid& g, Cell c);
int64_t wall_id(const LevelGrid& g, Cell c, WallFlag side);
int64_t pit_wall_id(const LevelGrid& g, Cell c, WallFlag side);
// Corner post at grid vertex (i, j), 0 <= i <= width, 0 <= j <= height.
int64_t post_id(const LevelGrid& g, int i, int j);
inline constexpr int64_t kPropIdBase = 10'000'000;

Texture floor_texture();
Texture wall_texture();
Texture crate_texture();
Texture stone_texture();

/// Floors, walls (each shared wall emitted once) between corner posts, pit
/// walls for sunken cells, and the skybox. Walls are 1.8 u segments and
/// posts 0.2 u square, so no two visible faces are coplanar.
Scene build_level(const LevelGrid& grid);

/// 4-connected walkable-cell graph.
class NavGrid {
 public:
  NavGrid() = default;
  NavGrid(const LevelGrid& grid, std::vector<Cell> blocked = {});

  bool walkable(Cell c) const;
  // Neighbors in ascending (y, x) order.
  std::vector<Cell> neighbors(Cell c) const;
  const std::vector<Cell>& walkable_cells() const { return cells_; }
  const LevelGrid& grid() const { return grid_; }

 private:
  LevelGrid grid_;
  std::vector<uint8_t> blocked_;
  std::vector<Cell> cells_;
};

/// Unit-cost A* with Manhattan heuristic. nullopt means UNREACHABLE.
std::optional<std::vector<Cell>> astar(const NavGrid& nav, Cell start, Cell goal);

struct AgentBody {
  static constexpr double kRadius = 0.5;
  static constexpr double kEyeOffset = 0.4;

  Vec3 position;  // sphere center
  Orientation orientation;
  double vertical_velocity = 0.0;
  bool grounded = true;

  Vec3 eye() const { return position + Vec3{0, kEyeOffset, 0}; }
};

struct Obstacle {
  AABB box;
  bool is_wall = false;
};

/// Collision view of a scene: solid boxes, and surfaces the agent can stand on.
struct Colliders {
  std::vector<Obstacle> obstacles;
  std::vector<AABB> supports;
};

Colliders colliders_from_scene(const Scene& scene);

struct PhysicsParams {
  double dt = 1.0 / 30.0;
  double move_speed = 3.0;
  double turn_step = 6.0;
  double jump_speed = 5.0;
  double gravity = 9.81;
  bool allow_air_jump = false;
  // Camera-clipping fault: walls collide as their mid-plane against a point.
  bool wall_clip = false;
  double clip_penetration = 0.1;
};

struct PhysicsEvents {
  bool air_jump_applied = false;
};

/// One fixed-timestep update. Horizontal motion is swept per axis against
/// obstacles (sliding); vertical motion integrates constant acceleration
/// exactly over the step.
PhysicsEvents step_physics(AgentBody& body, Action action, const Colliders& colliders,
                           const PhysicsParams& params);

struct HistoryEntry {
  Vec3 position;
  Action action = Action::kNoop;
};

class PositionHistory {
 public:
  static constexpr size_t kCapacity = 120;

  void push(const HistoryEntry& e) {
    entries_.push_back(e);
    if (entries_.size() > kCapacity) entries_.pop_front();
  }
  void clear() { entries_.clear(); }
  size_t size() const { return entries_.size(); }
  const std::deque<HistoryEntry>& entries() const { return entries_; }

 private:
  std::deque<HistoryEntry> entries_;
};

/// True when the last `window` steps moved less than eps horizontally while at
/// least half of them were movement attempts.
bool stuck_detect(const PositionHistory& history, size_t window = 90, double eps = 0.05);

/// Waypoint-following wanderer with periodic look-arounds.
class NavAgent {
 public:
  static constexpr double kArrivalRadius = 0.3;
  static constexpr double kHeadingTolerance = 6.0;
  static constexpr int kLookAroundLength = 10;

  explicit NavAgent(uint64_t seed = 0);

  Action act(const AgentBody& body, const NavGrid& nav);

  const std::vector<Cell>& path() const { return path_; }
  size_t next_waypoint() const { return next_; }

 private:
  void schedule_look_around();

  Rng rng_;
  std::vector<Cell> path_;
  size_t next_ = 0;
  int until_look_ = 0;
  int look_remaining_ = 0;
};

/// Signed heading error in degrees, in (-180, 180], from the body's yaw to the
/// direction of `target`.
double heading_error(const AgentBody& body, const Vec3& target);

// ---------------------------------------------------------------------------
// Built-in environments

struct EnvConfig {
  int width = 128;
  int height = 128;
  uint64_t seed = 0;
  int maze_width = 8;
  int maze_height = 8;
  uint64_t step_limit = 10000;
  std::vector<Action> allowed_actions;  // empty = all
};

/// Per-bug parameter defaults a level supplies (targets, trigger regions).
using BugDefaults = std::map<std::string, std::map<std::string, double>>;

struct Level {
  std::string env_id;
  LevelGrid grid;
  Scene scene;
  NavGrid nav;
  AgentBody spawn;
  AABB bounds;
  BugDefaults bug_defaults;
};

const std::vector<std::string>& environment_ids();
bool is_environment(std::string_view env_id);

/// Throws Error(kUnknownEnv) for unknown ids.
Level build_environment(std::string_view env_id, const EnvConfig& config, uint64_t seed);

}  // namespace bugworld
