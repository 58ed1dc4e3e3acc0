// Showcase setups: for each bug, an environment, a pose and at most five
// actions after which the bug's mask color must appear.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fixtures.hpp"

namespace bugworld::testing {

struct BugFixture {
  std::string bug;
  std::string env_id;
  uint64_t seed = 0;
  BugParams params;
  // Runs after reset with the bug enabled; may pose the agent or pre-roll.
  std::function<void(Env&)> prepare;
  std::vector<Action> actions;
};

struct FixtureOutcome {
  size_t tagged_pixels = 0;  // max over the observations after prepare
  bool crashed = false;
  int first_step = -1;  // index into actions (0-based) of the first hit; -1 = at prepare
};

// Faces the eye at `target` from the current agent position.
inline void face(Env& env, Vec3 target) {
  const AgentBody& b = env.body();
  const Orientation o = look_at(b.eye(), target);
  env.set_agent_pose(b.position, o.yaw, o.pitch);
}

inline Vec3 object_center(const Env& env, int64_t id) {
  const AABB b = env.scene().find(id)->world_aabb();
  return (b.min + b.max) * 0.5;
}

inline Vec3 target_center(const Env& env, BugId bug) {
  return object_center(env, int64_t(env.catalog().param(bug, "target")));
}

// Drives GettingStuck-v0 from spawn into the shaft until grounded at the
// bottom. Returns the number of steps taken.
inline int descend_into_shaft(Env& env) {
  int steps = 0;
  while (!(env.body().grounded && env.body().position.y < -2.0) && steps < 400) {
    env.step(Action::kForward);
    ++steps;
  }
  return steps;
}

inline std::vector<BugFixture> bug_fixtures() {
  std::vector<BugFixture> f;
  auto object_bug = [&](const char* name, BugId id) {
    f.push_back({name, "StaticRoom-v0", 0, {}, [id](Env& env) { face(env, target_center(env, id)); },
                 {Action::kNoop}});
  };
  object_bug("texture_missing", BugId::kTextureMissing);
  object_bug("texture_corruption", BugId::kTextureCorruption);
  object_bug("z_fighting", BugId::kZFighting);
  // The far wall of the platform level is 17 u from spawn along the view.
  f.push_back({"z_clipping", "GettingStuck-v0", 0, {}, nullptr, {Action::kNoop}});
  object_bug("geometry_corruption", BugId::kGeometryCorruption);
  // First frame has no predecessor; the tear shows from the next step.
  f.push_back({"screen_tear", "StaticRoom-v0", 0, {}, nullptr, {Action::kTurnLeft}});
  // Walk into the south wall with the collision margin disabled.
  f.push_back({"camera_clipping", "StaticRoom-v0", 0, {},
               [](Env& env) { env.set_agent_pose({3, 0.5, 0.3}, 180, 0); },
               {Action::kForward, Action::kForward, Action::kForward, Action::kForward, Action::kForward}});
  f.push_back({"black_screen", "StaticRoom-v0", 0, {}, nullptr, {Action::kNoop}});
  // Look down at the removed tile in front of spawn.
  f.push_back({"boundary_hole", "StaticRoom-v0", 0, {}, [](Env& env) { face(env, {3, 0, 3}); }, {Action::kNoop}});
  f.push_back({"geometry_clipping", "StaticRoom-v0", 0, {},
               [](Env& env) { face(env, target_center(env, BugId::kGeometryClipping)); }, {Action::kNoop}});
  f.push_back({"freeze", "StaticRoom-v0", 0, {}, nullptr, {Action::kTurnLeft}});
  // Seed 0 flickers on its first frames.
  f.push_back({"flicker", "StaticRoom-v0", 0, {}, nullptr,
               {Action::kNoop, Action::kNoop, Action::kNoop, Action::kNoop, Action::kNoop}});
  // Pre-roll: descend into the shaft and keep pushing until the detector
  // holds, then the label is on for the next frames.
  f.push_back({"stuck", "GettingStuck-v0", 0, {},
               [](Env& env) {
                 env.set_bug("stuck", false);
                 descend_into_shaft(env);
                 for (int i = 0; i < 90; ++i) env.step(Action::kForward);
                 env.set_bug("stuck", true);
               },
               {Action::kForward}});
  f.push_back({"out_of_bounds", "StaticRoom-v0", 0, {},
               [](Env& env) { env.set_agent_pose({-1.0, 0.5, 3}, 90, 0); }, {Action::kNoop}});
  f.push_back({"invalid_information_access", "Maze-v0", 0, {},
               [](Env& env) {
                 const Vec3 c = env.level().grid.cell_center(env.level().grid.spawn, 0.5);
                 env.set_agent_pose({c.x, 0.5, c.z - 0.7}, 180, 0);
               },
               {Action::kForward, Action::kForward, Action::kForward, Action::kForward, Action::kForward}});
  f.push_back({"invalid_action", "StaticRoom-v0", 0, {}, nullptr, {Action::kJump, Action::kJump}});
  f.push_back({"crash", "StaticRoom-v0", 0, {}, nullptr, {Action::kNoop}});
  return f;
}

inline FixtureOutcome run_fixture(const BugFixture& fx, EnvConfig cfg = {}) {
  Env env(fx.env_id, cfg);
  env.set_bug(fx.bug, true, fx.params);
  env.reset(fx.seed);
  if (fx.prepare) fx.prepare(env);
  const RGB8 color = tag_color(env.catalog().tag(env.catalog().id(fx.bug)));
  FixtureOutcome out;
  for (size_t i = 0; i < fx.actions.size() && i < 5; ++i) {
    const StepResult r = env.step(fx.actions[i]);
    if (!r.obs) {
      out.crashed = r.info.flags.crash && r.info.done;
      if (out.first_step < 0) out.first_step = int(i);
      break;
    }
    const size_t n = count_color(r.obs->mask, color);
    if (n > 0 && out.first_step < 0) out.first_step = int(i);
    out.tagged_pixels = std::max(out.tagged_pixels, n);
  }
  return out;
}

}  // namespace bugworld::testing
