#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "core/env.hpp"
#include "json.hpp"

namespace bugworld {

inline constexpr int kDatasetVersion = 1;

struct ScheduleEntry {
  uint64_t step = 0;
  std::string name;
  bool enabled = true;
  BugParams params;
  bool operator==(const ScheduleEntry&) const = default;
};

/// NAME@STEP[:on|:off][,key=value...]. Throws Error(kBadArgument).
ScheduleEntry parse_schedule_entry(std::string_view text);

struct GenerateOptions {
  std::string env_id = "StaticRoom-v0";
  EnvConfig config;
  std::string behaviour = "nav";
  std::vector<Action> actions;  // used when behaviour is "external"
  uint64_t steps = 1;
  std::vector<ScheduleEntry> schedule;  // applied before the step with that index
  std::filesystem::path out_dir;
};

std::string frame_file(uint64_t k);  // frames/frame_%06d.png
std::string mask_file(uint64_t k);   // masks/mask_%06d.png
inline constexpr const char* kIncompleteMarker = "INCOMPLETE";

/// Rolls out reset followed by up to `steps` steps and writes the corpus; the
/// manifest is written last. Frame k is the observation after step k. A crash
/// or the step limit ends the rollout early. On failure the INCOMPLETE marker
/// stays behind. Returns the manifest.
nlohmann::json generate(const GenerateOptions& options);

struct Violation {
  std::string kind;  // MANIFEST, INCOMPLETE, COUNT, MISSING_FILE, CHECKSUM, PALETTE, SHAPE, STEP_ORDER, TRAJECTORY
  std::string detail;
};

std::vector<Violation> validate(const std::filesystem::path& dir);

struct DatasetItem {
  Image frame;
  Image mask;
  nlohmann::json row;
};

/// Sequential and random access over a generated corpus.
class DatasetReader {
 public:
  explicit DatasetReader(std::filesystem::path dir);  // Error(kIo)

  const nlohmann::json& manifest() const { return manifest_; }
  size_t size() const { return rows_.size(); }
  DatasetItem item(size_t k) const;
  void for_each(const std::function<void(const DatasetItem&)>& fn) const;

 private:
  std::filesystem::path dir_;
  nlohmann::json manifest_;
  std::vector<nlohmann::json> rows_;
};

}  // namespace bugworld
