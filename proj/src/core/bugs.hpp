#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "raster.hpp"
#include "scene.hpp"
#include "world.hpp"

namespace bugworld {

enum Phase : uint8_t { kPhaseScene = 1, kPhaseRaster = 2, kPhasePost = 4, kPhaseLogical = 8 };

// Registration order; also the tag order (tag = index + 1).
enum class BugId : int {
  kTextureMissing,
  kTextureCorruption,
  kZFighting,
  kZClipping,
  kGeometryCorruption,
  kScreenTear,
  kCameraClipping,
  kBlackScreen,
  kBoundaryHole,
  kGeometryClipping,
  kFreeze,
  kFlicker,
  kStuck,
  kOutOfBounds,
  kInvalidInformationAccess,
  kInvalidAction,
  kCrash,
};
inline constexpr int kBugCount = 17;

using BugParams = std::map<std::string, double>;

struct BugSpec {
  std::string name;
  TagId tag = kNoBug;
  uint8_t phases = 0;
  BugParams defaults;
};

struct BugInfo {
  std::string name;
  TagId tag = kNoBug;
  uint8_t phases = 0;
  BugParams params;
  bool enabled = false;
};

std::string phase_names(uint8_t phases);

inline constexpr RGB8 kMissingTextureColor{255, 0, 255};
inline constexpr RGB8 kZFightColor{232, 224, 40};
inline constexpr int64_t kOverlayIdOffset = 1'000'000'000;

/// The injectable bugs of one environment instance. All start disabled.
class BugCatalog {
 public:
  explicit BugCatalog(TagRegistry& registry);

  const std::vector<BugSpec>& specs() const { return specs_; }
  std::vector<BugInfo> list() const;

  // Throws Error(kUnknownBug). Does not touch the scene.
  BugId id(std::string_view name) const;
  const BugSpec& spec(BugId id) const { return specs_[size_t(id)]; }
  TagId tag(BugId id) const { return specs_[size_t(id)].tag; }

  /// Enables or disables a bug, merging `params` over its current values.
  /// Throws Error(kUnknownBug) or Error(kBadArgument) for unknown params.
  void set(std::string_view name, bool enabled, const BugParams& params = {});
  bool enabled(BugId id) const { return enabled_[size_t(id)]; }
  double param(BugId id, const std::string& key) const;
  std::vector<std::string> active_names() const;

  /// Level-supplied parameter values (e.g. targets) layered under user values.
  void set_level_defaults(const BugDefaults& defaults);

  struct Snapshot {
    std::array<bool, kBugCount> enabled;
    std::array<BugParams, kBugCount> user_params;
  };
  Snapshot snapshot() const { return {enabled_, user_params_}; }
  void restore(const Snapshot& s) {
    enabled_ = s.enabled;
    user_params_ = s.user_params;
  }

 private:
  BugParams effective(size_t i) const;

  std::vector<BugSpec> specs_;
  std::array<bool, kBugCount> enabled_{};
  std::array<BugParams, kBugCount> level_params_{};
  std::array<BugParams, kBugCount> user_params_{};
};

/// Per-bug stream: episode seed mixed with the FNV-1a hash of the bug name.
uint64_t bug_stream_seed(uint64_t episode_seed, std::string_view name);

// ---------------------------------------------------------------------------
// Scene phase

struct UndoRecord {
  enum class Kind { kRestore, kRemove, kReinsert };
  Kind kind = Kind::kRestore;
  SceneObject saved;  // kRestore/kReinsert: the original object
  int64_t id = 0;     // kRemove: the inserted object
};

/// Applies every enabled scene-phase bug in catalog order. Returns undo
/// records in application order. Throws Error(kTargetNotFound) after rolling
/// back its own partial work.
std::vector<UndoRecord> apply_scene_phase(Scene& scene, const BugCatalog& catalog, uint64_t episode_seed);

/// Reverts records in reverse order.
void undo_scene_phase(Scene& scene, std::vector<UndoRecord>& records);

// ---------------------------------------------------------------------------
// Raster phase

struct RasterSetup {
  RasterOverrides overrides;
  MaskRules rules;
};

RasterSetup raster_setup(const BugCatalog& catalog, double nominal_far);

/// Physics switches driven by logical/raster bugs.
PhysicsParams physics_params(const BugCatalog& catalog);

// ---------------------------------------------------------------------------
// Post phase

struct PostHistory {
  std::optional<Image> previous_render;  // raw render of the previous frame
  std::optional<Image> last_output;      // final frame of the previous step
  std::optional<Image> frozen;

  void clear() { *this = {}; }
};

/// Applies post bugs in the fixed order freeze, screen_tear, flicker,
/// black_screen; each sees the previous stage's output. Updates history.
void apply_post_phase(Image& frame, Image& mask, PostHistory& history, const BugCatalog& catalog,
                      uint64_t episode_seed, uint64_t frame_index);

// ---------------------------------------------------------------------------
// Logical labels

struct LogicalFlags {
  bool stuck = false;
  bool out_of_bounds = false;
  bool crash = false;
  bool invalid_action_applied = false;
};

struct LogicalResult {
  LogicalFlags flags;
  std::vector<TagId> full_frame_tags;  // painted in order, later wins
};

/// Detector flags are always evaluated; full-frame tags only for enabled bugs.
/// Crash only fires when enabled and never produces a tag.
LogicalResult logical_labels(const AgentBody& body, const PositionHistory& history, const AABB& level_bounds,
                             bool air_jump_applied, const BugCatalog& catalog);

void paint_full_frame(Image& mask, TagId tag);

}  // namespace bugworld
