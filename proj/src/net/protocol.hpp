#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/env.hpp"
#include "core/error.hpp"
#include "json.hpp"

namespace bugworld {

using json = nlohmann::json;

/// Wire frame: 4-byte big-endian header length, UTF-8 JSON header, payload.
struct Message {
  json header = json::object();
  std::vector<uint8_t> payload;
  bool operator==(const Message&) const = default;
};

inline constexpr uint32_t kMaxHeaderBytes = 1u << 20;
inline constexpr uint64_t kMaxPayloadBytes = uint64_t(1) << 31;

/// Sets header["payload_len"] to the payload size.
std::vector<uint8_t> encode_message(json header, std::span<const uint8_t> payload = {});

/// Decodes exactly one message occupying all of `bytes`. Throws Error(kMalformed).
Message decode_message(std::span<const uint8_t> bytes);

/// Incremental decoder for byte streams. Returns the first complete message
/// and removes its bytes from `buffer`; nullopt when more bytes are needed.
/// Throws Error(kMalformed) on an invalid prefix.
std::optional<Message> take_message(std::vector<uint8_t>& buffer);

// JSON forms shared by the server, the dataset manifest and the C API.
json config_to_json(const EnvConfig& c);
EnvConfig config_from_json(const json& j, EnvConfig base = {});  // Error(kBadArgument)
json flags_to_json(const LogicalFlags& f);
json info_to_json(const StepInfo& info);
json bugs_to_json(const std::vector<BugInfo>& bugs);
json palette_to_json(const TagRegistry& registry);
json rgb_to_json(RGB8 c);
json spec_to_json(const Env& env);
BugParams params_from_json(const json& j);  // Error(kBadArgument)

Message obs_message(const Observation& obs, const StepInfo& info);
Message crash_message(const StepInfo& info);
Message error_message(ErrorCode code, const std::string& detail);
Message ok_message(json extra = json::object());

struct SessionDefaults {
  std::string env_id = "Maze-v0";
  EnvConfig config;
};

/// One client's conversation with one environment. Pure request -> responses.
class Session {
 public:
  explicit Session(SessionDefaults defaults = {});

  std::vector<Message> handle(const Message& request);
  const Env* env() const { return env_ ? &*env_ : nullptr; }

 private:
  std::vector<Message> dispatch(const std::string& cmd, const json& h);
  Env& require_env();

  SessionDefaults defaults_;
  std::optional<Env> env_;
};

}  // namespace bugworld
