#include "env.hpp"

#include <algorithm>

#include "error.hpp"

namespace bugworld {

std::string_view behaviour_name(Behaviour b) { return b == Behaviour::kNav ? "nav" : "external"; }

Behaviour parse_behaviour(std::string_view name) {
  if (name == "nav") return Behaviour::kNav;
  if (name == "external") return Behaviour::kExternal;
  throw Error(ErrorCode::kUnknownBehaviour, "unknown behaviour '" + std::string(name) + "'");
}

Env::Env(std::string env_id, EnvConfig config)
    : env_id_(std::move(env_id)), config_(std::move(config)), catalog_(registry_) {
  if (!is_environment(env_id_)) throw Error(ErrorCode::kUnknownEnv, "unknown environment '" + env_id_ + "'");
  if (config_.width < 1 || config_.height < 1 || config_.width > 4096 || config_.height > 4096)
    throw Error(ErrorCode::kBadArgument, "resolution must be within 1..4096");
  if (config_.maze_width < 1 || config_.maze_height < 1 || config_.maze_width > 256 || config_.maze_height > 256)
    throw Error(ErrorCode::kBadArgument, "maze dimensions must be within 1..256");
  seed_ = config_.seed;
  catalog_.set_level_defaults(build_environment(env_id_, config_, seed_).bug_defaults);
}

void Env::require_reset() const {
  if (!reset_) throw Error(ErrorCode::kNotReset, "environment has not been reset");
}

Camera Env::camera() const {
  Camera cam;
  cam.position = body_.eye();
  cam.orientation = body_.orientation;
  return cam;
}

StateVector Env::state() const {
  const Vec3& p = body_.position;
  return {p.x, p.y, p.z, body_.orientation.yaw, body_.orientation.pitch, body_.vertical_velocity,
          body_.grounded ? 1.0 : 0.0};
}

void Env::reapply_scene_bugs() {
  undo_scene_phase(level_.scene, undo_);
  undo_ = apply_scene_phase(level_.scene, catalog_, seed_);
  colliders_ = colliders_from_scene(level_.scene);
}

Observation Env::reset(uint64_t seed) {
  seed_ = seed;
  undo_.clear();
  reset_ = false;
  level_ = build_environment(env_id_, config_, seed);
  catalog_.set_level_defaults(level_.bug_defaults);
  reapply_scene_bugs();
  body_ = level_.spawn;
  history_.clear();
  post_.clear();
  nav_ = NavAgent(mix_seed(seed, fnv1a64("nav")));
  step_ = 0;
  done_ = false;
  reset_ = true;
  return observe(logical_labels(body_, history_, level_.bounds, false, catalog_));
}

RenderOutput Env::render_view() const {
  const RasterSetup setup = raster_setup(catalog_, Camera{}.far_plane);
  return render(level_.scene, camera(), setup.overrides, step_, config_.width, config_.height);
}

Observation Env::observe(const LogicalResult& logical) {
  const Camera cam = camera();
  const RasterSetup setup = raster_setup(catalog_, cam.far_plane);
  RenderOutput out = render(level_.scene, cam, setup.overrides, step_, config_.width, config_.height);
  Observation obs;
  obs.mask = render_mask(level_.scene, cam, setup.rules, out.meta, out.depth, setup.overrides, step_);
  obs.frame = std::move(out.frame);
  apply_post_phase(obs.frame, obs.mask, post_, catalog_, seed_, step_);
  for (TagId t : logical.full_frame_tags) paint_full_frame(obs.mask, t);
  obs.state = state();
  return obs;
}

StepResult Env::step(Action action) {
  require_reset();
  if (done_) throw Error(ErrorCode::kEpisodeDone, "episode is done; call reset");
  const int code = int(action);
  if (code < 0 || code >= kActionCount) throw Error(ErrorCode::kInvalidAction, "action code out of range");
  const auto& allowed = config_.allowed_actions;
  if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), action) == allowed.end())
    throw Error(ErrorCode::kInvalidAction,
                "action " + std::string(action_name(action)) + " is not in the allowed set");

  const PhysicsEvents ev = step_physics(body_, action, colliders_, physics_params(catalog_));
  history_.push({body_.position, action});
  const LogicalResult logical = logical_labels(body_, history_, level_.bounds, ev.air_jump_applied, catalog_);
  ++step_;

  StepResult r;
  r.info.step = step_;
  r.info.active_bugs = catalog_.active_names();
  r.info.flags = logical.flags;
  if (logical.flags.crash) {
    done_ = true;
    r.info.done = true;
    return r;
  }
  r.obs = observe(logical);
  done_ = config_.step_limit > 0 && step_ >= config_.step_limit;
  r.info.done = done_;
  return r;
}

void Env::set_bug(std::string_view name, bool enabled, const BugParams& params) {
  const auto saved = catalog_.snapshot();
  catalog_.set(name, enabled, params);
  if (!reset_) {
    // No level yet: check targets against the one reset would build.
    Level probe = build_environment(env_id_, config_, seed_);
    BugCatalog trial = catalog_;
    trial.set_level_defaults(probe.bug_defaults);
    try {
      apply_scene_phase(probe.scene, trial, seed_);
    } catch (const Error&) {
      catalog_.restore(saved);
      throw;
    }
    return;
  }
  try {
    reapply_scene_bugs();
  } catch (const Error&) {
    catalog_.restore(saved);
    reapply_scene_bugs();
    throw;
  }
}

void Env::set_behaviour(std::string_view name) { behaviour_ = parse_behaviour(name); }

Action Env::act() {
  if (behaviour_ == Behaviour::kExternal)
    throw Error(ErrorCode::kBehaviourExternal, "behaviour is 'external'; actions must be supplied to step");
  return policy_action();
}

Action Env::policy_action() {
  require_reset();
  return nav_.act(body_, level_.nav);
}

void Env::set_agent_pose(const Vec3& position, double yaw, double pitch) {
  require_reset();
  body_.position = position;
  body_.orientation.set_yaw(yaw);
  body_.orientation.set_pitch(pitch);
  body_.vertical_velocity = 0.0;
  body_.grounded = true;
  history_.clear();
}

}  // namespace bugworld
