#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bugs.hpp"
#include "raster.hpp"
#include "scene.hpp"
#include "world.hpp"

namespace bugworld {

inline constexpr size_t kStateSize = 7;
using StateVector = std::array<double, kStateSize>;
inline constexpr std::array<std::string_view, kStateSize> kStateLayout{
    "pos_x", "pos_y", "pos_z", "yaw_deg", "pitch_deg", "vert_velocity", "grounded"};

struct Observation {
  Image frame;
  Image mask;
  StateVector state{};
  bool operator==(const Observation&) const = default;
};

struct StepInfo {
  uint64_t step = 0;
  std::vector<std::string> active_bugs;
  LogicalFlags flags;
  bool done = false;
};

/// A crash leaves no observation.
struct StepResult {
  std::optional<Observation> obs;
  StepInfo info;
};

enum class Behaviour { kNav, kExternal };
std::string_view behaviour_name(Behaviour b);
Behaviour parse_behaviour(std::string_view name);  // Error(kUnknownBehaviour)

class Env {
 public:
  // Throws Error(kUnknownEnv) or Error(kBadArgument) for unusable configs.
  Env(std::string env_id, EnvConfig config);

  const std::string& env_id() const { return env_id_; }
  const EnvConfig& config() const { return config_; }
  const TagRegistry& registry() const { return registry_; }
  const BugCatalog& catalog() const { return catalog_; }

  Observation reset(uint64_t seed);

  // Throws kNotReset, kEpisodeDone, kInvalidAction.
  StepResult step(Action action);

  /// Takes effect from the next observation. On kTargetNotFound the previous
  /// bug configuration is kept.
  void set_bug(std::string_view name, bool enabled, const BugParams& params = {});
  std::vector<BugInfo> list_bugs() const { return catalog_.list(); }

  void set_behaviour(std::string_view name);
  Behaviour behaviour() const { return behaviour_; }
  // Next action of the built-in policy. Throws kBehaviourExternal, kNotReset.
  Action act();
  // The built-in policy's next action regardless of behaviour.
  Action policy_action();

  // Teleport for fixtures and debugging; clears motion history.
  void set_agent_pose(const Vec3& position, double yaw, double pitch);

  bool is_reset() const { return reset_; }
  bool done() const { return done_; }
  uint64_t step_index() const { return step_; }
  uint64_t seed() const { return seed_; }
  const Level& level() const { return level_; }
  const Scene& scene() const { return level_.scene; }
  const AgentBody& body() const { return body_; }
  Camera camera() const;
  StateVector state() const;

  // Frame and mask for the current pose without advancing the episode.
  RenderOutput render_view() const;

 private:
  void require_reset() const;
  void reapply_scene_bugs();
  Observation observe(const LogicalResult& logical);

  std::string env_id_;
  EnvConfig config_;
  TagRegistry registry_;
  BugCatalog catalog_;

  Level level_;
  Colliders colliders_;
  std::vector<UndoRecord> undo_;
  AgentBody body_;
  PositionHistory history_;
  PostHistory post_;
  NavAgent nav_;
  Behaviour behaviour_ = Behaviour::kExternal;
  uint64_t seed_ = 0;
  uint64_t step_ = 0;
  bool reset_ = false;
  bool done_ = false;
};

}  // namespace bugworld
