#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>

#include "core/error.hpp"
#include "core/world.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"

using namespace bugworld;
using namespace bugworld::testing;

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(size_t(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) { return parent[size_t(a)] == a ? a : parent[size_t(a)] = find(parent[size_t(a)]); }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[size_t(a)] = b;
    return true;
  }
};

// Returns false if the open edges contain a cycle or leave cells disconnected.
bool is_spanning_tree(const LevelGrid& g) {
  UnionFind uf(g.width() * g.height());
  auto id = [&](int x, int y) { return y * g.width() + x; };
  for (int y = 0; y < g.height(); ++y)
    for (int x = 0; x < g.width(); ++x) {
      if (x + 1 < g.width() && !g.has_wall({x, y}, kEast) && !uf.unite(id(x, y), id(x + 1, y))) return false;
      if (y + 1 < g.height() && !g.has_wall({x, y}, kNorth) && !uf.unite(id(x, y), id(x, y + 1))) return false;
    }
  for (int i = 0; i < g.width() * g.height(); ++i)
    if (uf.find(i) != uf.find(0)) return false;
  return true;
}

std::vector<int> bfs_distances(const LevelGrid& g, Cell from) {
  std::vector<int> dist(size_t(g.width() * g.height()), -1);
  auto idx = [&](Cell c) { return size_t(c.y * g.width() + c.x); };
  std::queue<Cell> q;
  q.push(from);
  dist[idx(from)] = 0;
  while (!q.empty()) {
    const Cell c = q.front();
    q.pop();
    for (WallFlag s : {kNorth, kEast, kSouth, kWest}) {
      const Cell n = neighbor(c, s);
      if (g.passable(c, n) && dist[idx(n)] < 0) {
        dist[idx(n)] = dist[idx(c)] + 1;
        q.push(n);
      }
    }
  }
  return dist;
}

// Closed wall segments as (vertex, vertex) pairs on the grid lattice.
std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>> closed_segments(const LevelGrid& g) {
  std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>> out;
  for (int j = 0; j <= g.height(); ++j)
    for (int i = 0; i < g.width(); ++i) {
      const bool closed = j < g.height() ? g.has_wall({i, j}, kSouth) : g.has_wall({i, j - 1}, kNorth);
      if (closed) out.push_back({{i, j}, {i + 1, j}});
    }
  for (int i = 0; i <= g.width(); ++i)
    for (int j = 0; j < g.height(); ++j) {
      const bool closed = i < g.width() ? g.has_wall({i, j}, kWest) : g.has_wall({i - 1, j}, kEast);
      if (closed) out.push_back({{i, j}, {i, j + 1}});
    }
  return out;
}

struct LevelCounts {
  size_t floors = 0, walls = 0, posts = 0, other = 0;
};

LevelCounts count_level(const LevelGrid& g, const Scene& s) {
  std::set<int64_t> floor_ids, wall_ids, post_ids;
  for (int y = 0; y < g.height(); ++y)
    for (int x = 0; x < g.width(); ++x) {
      floor_ids.insert(floor_id(g, {x, y}));
      for (WallFlag f : {kNorth, kEast, kSouth, kWest}) wall_ids.insert(wall_id(g, {x, y}, f));
    }
  for (int j = 0; j <= g.height(); ++j)
    for (int i = 0; i <= g.width(); ++i) post_ids.insert(post_id(g, i, j));
  LevelCounts c;
  for (const SceneObject& o : s.objects()) {
    if (floor_ids.contains(o.id)) ++c.floors;
    else if (wall_ids.contains(o.id)) ++c.walls;
    else if (post_ids.contains(o.id)) ++c.posts;
    else ++c.other;
  }
  return c;
}

Colliders single_wall(AABB box) {
  Colliders c;
  c.obstacles.push_back({box, true});
  c.supports.push_back({{-100, -1, -100}, {100, 0, 100}});
  return c;
}

AgentBody body_at(Vec3 p, double yaw = 0) {
  AgentBody b;
  b.position = p;
  b.orientation.set_yaw(yaw);
  return b;
}

}  // namespace

TEST_CASE("action codes are stable") {
  CHECK(int(Action::kNoop) == 0);
  CHECK(int(Action::kForward) == 1);
  CHECK(int(Action::kJump) == 9);
  CHECK(int(Action::kInteract) == 10);
  CHECK(action_name(Action::kStrafeLeft) == "STRAFE_LEFT");
  CHECK(is_movement_action(Action::kJump));
  CHECK_FALSE(is_movement_action(Action::kTurnLeft));
  CHECK_FALSE(is_movement_action(Action::kInteract));
}

TEST_CASE("orientation wraps yaw and clamps pitch") {
  Orientation o;
  o.set_yaw(-6);
  CHECK(o.yaw == doctest::Approx(354));
  o.set_yaw(720);
  CHECK(o.yaw == 0);
  o.set_pitch(120);
  CHECK(o.pitch == 89);
  o.set_pitch(-95);
  CHECK(o.pitch == -89);
}

TEST_CASE("maze_generate examples") {
  const LevelGrid one = maze_generate(5, 1, 1);
  CHECK(one.open_interior_edges() == 0);
  CHECK(one.flags({0, 0}) == (kNorth | kEast | kSouth | kWest));

  const LevelGrid g = maze_generate(0, 4, 4);
  CHECK(g.open_interior_edges() == 15);
  CHECK(is_spanning_tree(g));
  const auto d = bfs_distances(g, {0, 0});
  CHECK(std::all_of(d.begin(), d.end(), [](int v) { return v >= 0; }));
}

TEST_CASE("maze_generate is a spanning tree with symmetric walls over many seeds") {
  for (uint64_t seed = 0; seed < 100; ++seed) {
    const int w = 1 + int(seed % 9), h = 1 + int((seed * 7) % 11);
    const LevelGrid g = maze_generate(seed, w, h);
    REQUIRE(g.open_interior_edges() == size_t(w * h - 1));
    REQUIRE(is_spanning_tree(g));
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (WallFlag s : {kNorth, kEast, kSouth, kWest}) {
          const Cell n = neighbor({x, y}, s);
          if (g.in_range(n)) REQUIRE(g.has_wall({x, y}, s) == g.has_wall(n, opposite(s)));
          else REQUIRE(g.has_wall({x, y}, s));
        }
  }
}

TEST_CASE("maze_generate is deterministic per seed") {
  CHECK(maze_generate(42, 8, 8) == maze_generate(42, 8, 8));
  CHECK_FALSE(maze_generate(42, 8, 8) == maze_generate(43, 8, 8));
}

TEST_CASE("boundary walls cannot be opened") {
  LevelGrid g(2, 2);
  CHECK_THROWS_AS(g.open({0, 0}, kSouth), Error);
  g.open({0, 0}, kEast);
  CHECK_FALSE(g.has_wall({1, 0}, kWest));
}

TEST_CASE("build_level examples") {
  const LevelGrid one(1, 1);
  LevelCounts c = count_level(one, build_level(one));
  CHECK(c.floors == 1);
  CHECK(c.walls == 4);
  CHECK(c.posts == 4);
  CHECK(c.other == 0);

  LevelGrid two(2, 1);
  two.open({0, 0}, kEast);
  c = count_level(two, build_level(two));
  CHECK(c.floors == 2);
  CHECK(c.walls == 6);
  CHECK(c.posts == 6);
  CHECK(c.other == 0);
}

TEST_CASE("build_level object count follows the closed walls") {
  for (uint64_t seed : {0u, 1u, 2u, 3u}) {
    const LevelGrid g = maze_generate(seed, 4, 4);
    const auto segments = closed_segments(g);
    std::set<std::pair<int, int>> touched;
    for (const auto& [a, b] : segments) {
      touched.insert(a);
      touched.insert(b);
    }
    const Scene s = build_level(g);
    const LevelCounts c = count_level(g, s);
    CHECK(c.floors == 16);
    CHECK(c.walls == segments.size());
    CHECK(c.posts == touched.size());
    CHECK(c.other == 0);
    CHECK(s.objects().size() == 16 + segments.size() + touched.size());
  }
}

TEST_CASE("level ids are unique and ordered floors first within a cell") {
  const LevelGrid g(3, 2);
  std::set<int64_t> ids;
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 3; ++x) {
      const Cell c{x, y};
      CHECK(ids.insert(floor_id(g, c)).second);
      for (WallFlag f : {kNorth, kEast, kSouth, kWest}) {
        CHECK(ids.insert(wall_id(g, c, f)).second);
        CHECK(ids.insert(pit_wall_id(g, c, f)).second);
        CHECK(wall_id(g, c, f) > floor_id(g, c));
      }
    }
  for (int j = 0; j <= 2; ++j)
    for (int i = 0; i <= 3; ++i) CHECK(ids.insert(post_id(g, i, j)).second);
  CHECK(*ids.rbegin() < kPropIdBase);
}

TEST_CASE("no two visible level faces are coplanar and overlapping") {
  // Boxes may touch, but never overlap with positive volume.
  const Scene s = build_level(maze_generate(9, 5, 5));
  std::vector<AABB> boxes;
  for (const SceneObject& o : s.objects())
    if (o.kind == ObjectKind::kWall) boxes.push_back(o.world_aabb());
  for (size_t i = 0; i < boxes.size(); ++i)
    for (size_t j = i + 1; j < boxes.size(); ++j) {
      const AABB& a = boxes[i];
      const AABB& b = boxes[j];
      const double ox = std::min(a.max.x, b.max.x) - std::max(a.min.x, b.min.x);
      const double oy = std::min(a.max.y, b.max.y) - std::max(a.min.y, b.min.y);
      const double oz = std::min(a.max.z, b.max.z) - std::max(a.min.z, b.min.z);
      REQUIRE_FALSE((ox > 1e-9 && oy > 1e-9 && oz > 1e-9));
    }
}

TEST_CASE("astar examples") {
  const LevelGrid room = open_room(5, 1);
  const NavGrid nav(room);
  auto p = astar(nav, {2, 0}, {2, 0});
  REQUIRE(p);
  CHECK(p->size() == 1);
  p = astar(nav, {0, 0}, {4, 0});
  REQUIRE(p);
  CHECK(p->size() == 5);
  CHECK(p->front() == Cell{0, 0});
  CHECK(p->back() == Cell{4, 0});

  const LevelGrid g = maze_generate(0, 4, 4);
  p = astar(NavGrid(g), {0, 0}, {3, 3});
  REQUIRE(p);
  CHECK(int(p->size()) - 1 == bfs_distances(g, {0, 0})[15]);

  CHECK_THROWS_AS(astar(nav, {0, 0}, {9, 9}), Error);
}

TEST_CASE("astar is unreachable around blocked cells") {
  const LevelGrid room = open_room(3, 1);
  const NavGrid nav(room, {{1, 0}});
  CHECK_FALSE(astar(nav, {0, 0}, {2, 0}).has_value());
}

TEST_CASE("astar path cost equals BFS distance and follows open walls") {
  Rng rng(21);
  for (uint64_t seed = 0; seed < 100; ++seed) {
    const LevelGrid g = maze_generate(seed, 8, 8);
    const NavGrid nav(g);
    for (int k = 0; k < 10; ++k) {
      const Cell a{int(rng.below(8)), int(rng.below(8))}, b{int(rng.below(8)), int(rng.below(8))};
      const auto p = astar(nav, a, b);
      REQUIRE(p);
      REQUIRE(int(p->size()) - 1 == bfs_distances(g, a)[size_t(b.y * 8 + b.x)]);
      for (size_t i = 1; i < p->size(); ++i) REQUIRE(g.passable((*p)[i - 1], (*p)[i]));
    }
  }
}

TEST_CASE("astar breaks ties deterministically") {
  const NavGrid nav(open_room(4, 4));
  const auto a = astar(nav, {0, 0}, {3, 3}), b = astar(nav, {0, 0}, {3, 3});
  CHECK(*a == *b);
  CHECK(a->size() == 7);
}

TEST_CASE("physics examples") {
  const Colliders open = single_wall({{50, 0, 50}, {51, 2, 51}});
  SUBCASE("NOOP keeps position and grounding") {
    AgentBody b = body_at({0, 0.5, 0});
    step_physics(b, Action::kNoop, open, {});
    CHECK(b.position == Vec3{0, 0.5, 0});
    CHECK(b.grounded);
    CHECK(b.vertical_velocity == 0);
  }
  SUBCASE("FORWARD at yaw 0 moves 3/30 along +z") {
    AgentBody b = body_at({0, 0.5, 0});
    step_physics(b, Action::kForward, open, {});
    CHECK(b.position.z == doctest::Approx(3.0 / 30.0).epsilon(1e-12));
    CHECK(b.position.x == doctest::Approx(0).epsilon(1e-12));
  }
  SUBCASE("yaw-relative strafing and turning") {
    AgentBody b = body_at({0, 0.5, 0}, 90);
    step_physics(b, Action::kForward, open, {});
    CHECK(b.position.x == doctest::Approx(0.1));
    step_physics(b, Action::kStrafeRight, open, {});
    CHECK(b.position.z == doctest::Approx(0.1));
    step_physics(b, Action::kTurnLeft, open, {});
    CHECK(b.orientation.yaw == doctest::Approx(96));
    step_physics(b, Action::kLookDown, open, {});
    CHECK(b.orientation.pitch == doctest::Approx(-6));
  }
  SUBCASE("FORWARD into a wall 0.55 ahead stops at the radius") {
    // Wall face at z = 0.55 from the agent center.
    const Colliders wall = single_wall({{-2, 0, 0.55}, {2, 2, 0.75}});
    AgentBody b = body_at({0, 0.5, 0});
    step_physics(b, Action::kForward, wall, {});
    CHECK(0.55 - b.position.z == doctest::Approx(AgentBody::kRadius).epsilon(1e-12));
    step_physics(b, Action::kForward, wall, {});
    CHECK(0.55 - b.position.z == doctest::Approx(AgentBody::kRadius).epsilon(1e-12));
  }
  SUBCASE("moving diagonally into a wall slides along it") {
    const Colliders wall = single_wall({{-5, 0, 0.5}, {5, 2, 0.7}});
    AgentBody b = body_at({0, 0.5, 0}, 45);
    step_physics(b, Action::kForward, wall, {});
    CHECK(b.position.z == doctest::Approx(0.0));
    CHECK(b.position.x == doctest::Approx(0.1 * std::sqrt(0.5)));
  }
}

TEST_CASE("jump apex matches the constant-acceleration oracle") {
  const Colliders open = single_wall({{50, 0, 50}, {51, 2, 51}});
  AgentBody b = body_at({0, 0.5, 0});
  const PhysicsParams p;
  step_physics(b, Action::kJump, open, p);
  double apex = b.position.y;
  int steps = 1;
  while (!b.grounded && steps < 200) {
    step_physics(b, Action::kNoop, open, p);
    apex = std::max(apex, b.position.y);
    ++steps;
  }
  CHECK(b.grounded);
  CHECK(b.vertical_velocity == 0);
  CHECK(b.position.y == doctest::Approx(0.5));
  // Positions are sampled at t = k*dt on the parabola v t - g t^2 / 2.
  double oracle = 0;
  for (int k = 0; k <= 60; ++k) {
    const double t = k * p.dt;
    oracle = std::max(oracle, p.jump_speed * t - 0.5 * p.gravity * t * t);
  }
  CHECK(apex - 0.5 == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(apex - 0.5 == doctest::Approx(1.27375).epsilon(1e-9));
  const double continuous = p.jump_speed * p.jump_speed / (2 * p.gravity);
  CHECK(std::abs(apex - 0.5 - continuous) / continuous < 0.02);
  CHECK(steps == 31);
}

TEST_CASE("air jumps need the invalid-action switch") {
  const Colliders open = single_wall({{50, 0, 50}, {51, 2, 51}});
  AgentBody b = body_at({0, 0.5, 0});
  PhysicsParams p;
  step_physics(b, Action::kJump, open, p);
  const double v = b.vertical_velocity;
  CHECK_FALSE(step_physics(b, Action::kJump, open, p).air_jump_applied);
  CHECK(b.vertical_velocity < v);
  p.allow_air_jump = true;
  CHECK(step_physics(b, Action::kJump, open, p).air_jump_applied);
  CHECK(b.vertical_velocity == doctest::Approx(p.jump_speed - p.gravity * p.dt));
}

TEST_CASE("walking off a missing floor tile falls") {
  Colliders c;
  c.supports.push_back({{-1, -1, -1}, {1, 0, 1}});
  AgentBody b = body_at({0, 0.5, 0.95});
  for (int i = 0; i < 30; ++i) step_physics(b, Action::kForward, c, {});
  CHECK_FALSE(b.grounded);
  CHECK(b.position.y < 0);
}

TEST_CASE("agent never enters an inflated wall box") {
  for (const char* id : {"Maze-v0", "StaticRoom-v0", "GettingStuck-v0"}) {
    const Level lv = build_environment(id, {}, 3);
    const Colliders col = colliders_from_scene(lv.scene);
    AgentBody b = lv.spawn;
    Rng rng(17);
    for (int i = 0; i < 3000; ++i) {
      step_physics(b, Action(rng.below(kActionCount)), col, {});
      for (const Obstacle& o : col.obstacles) {
        if (b.position.y - AgentBody::kRadius >= o.box.max.y || b.position.y + AgentBody::kRadius <= o.box.min.y)
          continue;
        AABB flat = o.box;
        flat.min.y = flat.max.y = b.position.y;
        REQUIRE(flat.distance(b.position) >= AgentBody::kRadius - 1e-6);
      }
      if (b.grounded) REQUIRE(b.vertical_velocity == 0);
    }
  }
}

TEST_CASE("stuck_detect examples") {
  PositionHistory idle;
  for (int i = 0; i < 90; ++i) idle.push({{1, 0.5, 1}, Action::kNoop});
  CHECK_FALSE(stuck_detect(idle));

  PositionHistory pinned;
  for (int i = 0; i < 90; ++i) pinned.push({{1, 0.5, 1}, Action::kForward});
  CHECK(stuck_detect(pinned));

  PositionHistory short_history;
  for (int i = 0; i < 89; ++i) short_history.push({{1, 0.5, 1}, Action::kForward});
  CHECK_FALSE(stuck_detect(short_history));

  // 90 free FORWARD steps cover 9 u.
  const Colliders open = single_wall({{50, 0, 50}, {51, 2, 51}});
  AgentBody b = body_at({0, 0.5, 0});
  PositionHistory free_run;
  for (int i = 0; i < 90; ++i) {
    step_physics(b, Action::kForward, open, {});
    free_run.push({b.position, Action::kForward});
  }
  CHECK(b.position.z == doctest::Approx(9.0));
  CHECK_FALSE(stuck_detect(free_run));

  // Half movement is enough; fewer is not.
  PositionHistory half;
  for (int i = 0; i < 90; ++i) half.push({{0, 0, 0}, i % 2 ? Action::kJump : Action::kTurnLeft});
  CHECK(stuck_detect(half));
  PositionHistory under;
  for (int i = 0; i < 90; ++i) under.push({{0, 0, 0}, i < 44 ? Action::kBack : Action::kNoop});
  CHECK_FALSE(stuck_detect(under));
}

TEST_CASE("history is bounded") {
  PositionHistory h;
  for (int i = 0; i < 500; ++i) h.push({{double(i), 0, 0}, Action::kNoop});
  CHECK(h.size() == PositionHistory::kCapacity);
  CHECK(h.entries().back().position.x == 499);
}

TEST_CASE("heading_error sign and range") {
  const AgentBody b = body_at({0, 0, 0}, 0);
  CHECK(heading_error(b, {1, 0, 0}) == doctest::Approx(90));
  CHECK(heading_error(b, {-1, 0, 0}) == doctest::Approx(-90));
  CHECK(heading_error(b, {0, 0, -1}) == doctest::Approx(180));
  CHECK(heading_error(body_at({0, 0, 0}, 350), {0.1, 0, 1}) == doctest::Approx(15.71).epsilon(1e-3));
}

TEST_CASE("nav policy turns toward the waypoint then walks") {
  const LevelGrid corridor = open_room(5, 1);
  const NavGrid nav(corridor);
  int checked = 0;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    // Facing +z while every other cell lies along +x: heading error +90.
    NavAgent facing_wall(seed);
    const Action a = facing_wall.act(body_at(corridor.cell_center({0, 0}, 0.5), 0), nav);
    if (facing_wall.path().size() < 2) continue;
    CHECK(a == Action::kTurnLeft);
    NavAgent aligned(seed);
    CHECK(aligned.act(body_at(corridor.cell_center({0, 0}, 0.5), 90), nav) == Action::kForward);
    ++checked;
  }
  CHECK(checked > 10);
}

TEST_CASE("nav policy inserts look-arounds and stays deterministic") {
  const Level lv = build_environment("Maze-v0", {}, 7);
  const Colliders col = colliders_from_scene(lv.scene);
  auto run = [&] {
    NavAgent agent(1);
    AgentBody b = lv.spawn;
    std::vector<Action> out;
    for (int i = 0; i < 400; ++i) {
      out.push_back(agent.act(b, lv.nav));
      step_physics(b, out.back(), col, {});
    }
    return out;
  };
  const auto a = run();
  CHECK(a == run());
  CHECK(std::count(a.begin(), a.end(), Action::kLookUp) >= 4);
}

TEST_CASE("nav policy covers most of Maze-v0 seed 7 in 10k steps") {
  const Level lv = build_environment("Maze-v0", {}, 7);
  const Colliders col = colliders_from_scene(lv.scene);
  NavAgent agent(mix_seed(7, fnv1a64("nav")));
  AgentBody b = lv.spawn;
  std::set<Cell> visited;
  for (int i = 0; i < 10000; ++i) {
    step_physics(b, agent.act(b, lv.nav), col, {});
    visited.insert(lv.grid.cell_at(b.position));
  }
  const double coverage = double(visited.size()) / double(lv.grid.width() * lv.grid.height());
  MESSAGE("coverage " << visited.size() << "/" << lv.grid.width() * lv.grid.height());
  CHECK(coverage >= 0.8);
}

TEST_CASE("built-in environments") {
  CHECK(environment_ids().size() == 3);
  CHECK_THROWS_AS(build_environment("nosuch", {}, 0), Error);
  const Level gs = build_environment("GettingStuck-v0", {}, 0);
  REQUIRE(gs.grid.shaft);
  CHECK(gs.grid.floor_y(*gs.grid.shaft) == -3.0);
  // 3 u deep: deeper than the jump apex.
  CHECK(3.0 > 5.0 * 5.0 / (2 * 9.81));
  CHECK_FALSE(gs.nav.walkable(*gs.grid.shaft));
  const Level room = build_environment("StaticRoom-v0", {}, 0);
  CHECK(room.grid.width() * LevelGrid::kCellSize == 6.0);
  CHECK(room.bug_defaults.at("crash").at("x") == room.spawn.position.x);
  const Level m7 = build_environment("Maze-v0", {}, 7), m8 = build_environment("Maze-v0", {}, 8);
  CHECK_FALSE(m7.grid == m8.grid);
}
