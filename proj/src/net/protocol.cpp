#include "protocol.hpp"

#include <cstring>

#include "core/error.hpp"

namespace bugworld {

namespace {

uint32_t read_be32(const uint8_t* p) {
  return uint32_t(p[0]) << 24 | uint32_t(p[1]) << 16 | uint32_t(p[2]) << 8 | uint32_t(p[3]);
}

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::kMalformed, what); }

json parse_header(std::span<const uint8_t> bytes) {
  json h = json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (h.is_discarded()) malformed("header is not valid JSON");
  if (!h.is_object()) malformed("header is not a JSON object");
  const auto it = h.find("payload_len");
  if (it == h.end() || !it->is_number_unsigned()) malformed("header lacks an unsigned payload_len");
  if (it->get<uint64_t>() > kMaxPayloadBytes) malformed("payload_len too large");
  return h;
}

}  // namespace

std::vector<uint8_t> encode_message(json header, std::span<const uint8_t> payload) {
  header["payload_len"] = uint64_t(payload.size());
  const std::string text = header.dump();
  const auto n = uint32_t(text.size());
  std::vector<uint8_t> out;
  out.reserve(4 + text.size() + payload.size());
  out.push_back(uint8_t(n >> 24));
  out.push_back(uint8_t(n >> 16));
  out.push_back(uint8_t(n >> 8));
  out.push_back(uint8_t(n));
  out.insert(out.end(), text.begin(), text.end());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Message decode_message(std::span<const uint8_t> bytes) {
  if (bytes.size() < 4) malformed("truncated length prefix");
  const uint32_t hlen = read_be32(bytes.data());
  if (hlen > kMaxHeaderBytes) malformed("header too large");
  if (bytes.size() < 4 + uint64_t(hlen)) malformed("truncated header");
  Message m;
  m.header = parse_header(bytes.subspan(4, hlen));
  const uint64_t plen = m.header["payload_len"].get<uint64_t>();
  if (bytes.size() - 4 - hlen != plen) malformed("payload length does not match payload_len");
  m.payload.assign(bytes.begin() + 4 + hlen, bytes.end());
  return m;
}

std::optional<Message> take_message(std::vector<uint8_t>& buffer) {
  if (buffer.size() < 4) return std::nullopt;
  const uint32_t hlen = read_be32(buffer.data());
  if (hlen > kMaxHeaderBytes) malformed("header too large");
  if (buffer.size() < 4 + uint64_t(hlen)) return std::nullopt;
  json h = parse_header(std::span(buffer).subspan(4, hlen));
  const uint64_t plen = h["payload_len"].get<uint64_t>();
  const uint64_t total = 4 + uint64_t(hlen) + plen;
  if (buffer.size() < total) return std::nullopt;
  Message m;
  m.header = std::move(h);
  m.payload.assign(buffer.begin() + 4 + hlen, buffer.begin() + std::ptrdiff_t(total));
  buffer.erase(buffer.begin(), buffer.begin() + std::ptrdiff_t(total));
  return m;
}

// ---------------------------------------------------------------------------

json rgb_to_json(RGB8 c) { return json::array({c.r, c.g, c.b}); }

json config_to_json(const EnvConfig& c) {
  json j{{"width", c.width},           {"height", c.height},           {"seed", c.seed},
         {"maze_width", c.maze_width}, {"maze_height", c.maze_height}, {"step_limit", c.step_limit}};
  json allowed = json::array();
  for (Action a : c.allowed_actions) allowed.push_back(int(a));
  j["allowed_actions"] = allowed;
  return j;
}

EnvConfig config_from_json(const json& j, EnvConfig base) {
  if (j.is_null()) return base;
  if (!j.is_object()) throw Error(ErrorCode::kBadArgument, "config must be an object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "resolution") base.width = base.height = v.get<int>();
      else if (key == "width") base.width = v.get<int>();
      else if (key == "height") base.height = v.get<int>();
      else if (key == "seed") base.seed = v.get<uint64_t>();
      else if (key == "maze_width") base.maze_width = v.get<int>();
      else if (key == "maze_height") base.maze_height = v.get<int>();
      else if (key == "step_limit") base.step_limit = v.get<uint64_t>();
      else if (key == "allowed_actions") {
        base.allowed_actions.clear();
        for (const auto& a : v) {
          const int code = a.get<int>();
          if (code < 0 || code >= kActionCount) throw Error(ErrorCode::kBadArgument, "action code out of range");
          base.allowed_actions.push_back(Action(code));
        }
      } else {
        throw Error(ErrorCode::kBadArgument, "unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBadArgument, std::string("bad config value: ") + e.what());
  }
  return base;
}

json flags_to_json(const LogicalFlags& f) {
  return {{"stuck", f.stuck},
          {"out_of_bounds", f.out_of_bounds},
          {"crash", f.crash},
          {"invalid_action_applied", f.invalid_action_applied}};
}

json info_to_json(const StepInfo& info) {
  return {{"step", info.step}, {"active_bugs", info.active_bugs}, {"flags", flags_to_json(info.flags)},
          {"done", info.done}};
}

json bugs_to_json(const std::vector<BugInfo>& bugs) {
  json out = json::array();
  for (const BugInfo& b : bugs) {
    json phases = json::array();
    for (auto [bit, name] : {std::pair{kPhaseScene, "SCENE"}, std::pair{kPhaseRaster, "RASTER"},
                             std::pair{kPhasePost, "POST"}, std::pair{kPhaseLogical, "LOGICAL"}})
      if (b.phases & bit) phases.push_back(name);
    out.push_back({{"name", b.name},
                   {"tag", b.tag},
                   {"color", rgb_to_json(tag_color(b.tag))},
                   {"phases", phases},
                   {"params", b.params},
                   {"enabled", b.enabled}});
  }
  return out;
}

json palette_to_json(const TagRegistry& registry) {
  json out = json::object();
  for (TagId t = 0; t < registry.size(); ++t) out[registry.name(t)] = rgb_to_json(registry.color(t));
  return out;
}

json spec_to_json(const Env& env) {
  json actions = json::object();
  for (int a = 0; a < kActionCount; ++a) actions[std::string(action_name(Action(a)))] = a;
  json layout = json::array();
  for (auto s : kStateLayout) layout.push_back(s);
  return {{"type", "spec"},
          {"env_id", env.env_id()},
          {"environments", environment_ids()},
          {"behaviours", {"nav", "external"}},
          {"resolution", {{"width", env.config().width}, {"height", env.config().height}}},
          {"actions", actions},
          {"state_layout", layout},
          {"palette", palette_to_json(env.registry())}};
}

BugParams params_from_json(const json& j) {
  BugParams p;
  if (j.is_null()) return p;
  if (!j.is_object()) throw Error(ErrorCode::kBadArgument, "params must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number()) throw Error(ErrorCode::kBadArgument, "param '" + k + "' must be a number");
    p[k] = v.get<double>();
  }
  return p;
}

Message obs_message(const Observation& obs, const StepInfo& info) {
  Message m;
  m.header = {{"type", "obs"},   {"w", obs.frame.width},     {"h", obs.frame.height},
              {"state", obs.state}, {"info", info_to_json(info)}};
  const auto f = obs.frame.bytes(), k = obs.mask.bytes();
  m.payload.reserve(f.size() + k.size());
  m.payload.insert(m.payload.end(), f.begin(), f.end());
  m.payload.insert(m.payload.end(), k.begin(), k.end());
  m.header["payload_len"] = m.payload.size();
  return m;
}

Message crash_message(const StepInfo& info) {
  Message m;
  m.header = {{"type", "obs"}, {"w", 0}, {"h", 0}, {"state", json::array()}, {"info", info_to_json(info)},
              {"payload_len", 0}};
  return m;
}

Message error_message(ErrorCode code, const std::string& detail) {
  return {{{"type", "error"}, {"code", error_code_name(code)}, {"detail", detail}, {"payload_len", 0}}, {}};
}

Message ok_message(json extra) {
  extra["type"] = "ok";
  extra["payload_len"] = 0;
  return {std::move(extra), {}};
}

// ---------------------------------------------------------------------------

Session::Session(SessionDefaults defaults) : defaults_(std::move(defaults)) {}

Env& Session::require_env() {
  if (!env_) throw Error(ErrorCode::kNoEnv, "no environment; send 'make' first");
  return *env_;
}

std::vector<Message> Session::handle(const Message& request) {
  try {
    const auto it = request.header.find("cmd");
    if (it == request.header.end() || !it->is_string())
      throw Error(ErrorCode::kMalformed, "request header lacks a string 'cmd'");
    return dispatch(it->get<std::string>(), request.header);
  } catch (const Error& e) {
    return {error_message(e.code(), e.what())};
  } catch (const json::exception& e) {
    return {error_message(ErrorCode::kBadArgument, e.what())};
  }
}

std::vector<Message> Session::dispatch(const std::string& cmd, const json& h) {
  if (cmd == "make") {
    const std::string id = h.value("env_id", defaults_.env_id);
    Env fresh(id, config_from_json(h.value("config", json()), defaults_.config));
    env_ = std::move(fresh);
    return {ok_message({{"env_id", id}})};
  }
  if (cmd == "reset") {
    Env& env = require_env();
    const uint64_t seed = h.contains("seed") ? h["seed"].get<uint64_t>() : env.config().seed;
    const Observation obs = env.reset(seed);
    StepInfo info;
    info.active_bugs = env.catalog().active_names();
    return {obs_message(obs, info)};
  }
  if (cmd == "step") {
    Env& env = require_env();
    if (!h.contains("action") || !h["action"].is_number_integer())
      throw Error(ErrorCode::kInvalidAction, "step requires an integer 'action'");
    const auto code = h["action"].get<int64_t>();
    if (code < 0 || code >= kActionCount) throw Error(ErrorCode::kInvalidAction, "action code out of range");
    const StepResult r = env.step(Action(code));
    return {r.obs ? obs_message(*r.obs, r.info) : crash_message(r.info)};
  }
  if (cmd == "auto_step") {
    Env& env = require_env();
    const int64_t n = h.value("n", int64_t(1));
    if (n < 0) throw Error(ErrorCode::kBadArgument, "n must be non-negative");
    std::vector<Message> out;
    int64_t ran = 0;
    for (; ran < n; ++ran) {
      const StepResult r = env.step(env.policy_action());
      out.push_back(r.obs ? obs_message(*r.obs, r.info) : crash_message(r.info));
      if (r.info.done) {
        ++ran;
        break;
      }
    }
    out.push_back(ok_message({{"steps", ran}}));
    return out;
  }
  if (cmd == "set_bug") {
    Env& env = require_env();
    if (!h.contains("name") || !h["name"].is_string()) throw Error(ErrorCode::kBadArgument, "set_bug requires 'name'");
    env.set_bug(h["name"].get<std::string>(), h.value("enabled", true), params_from_json(h.value("params", json())));
    return {ok_message()};
  }
  if (cmd == "list_bugs") {
    Env& env = require_env();
    return {Message{{{"type", "bugs"}, {"bugs", bugs_to_json(env.list_bugs())}, {"payload_len", 0}}, {}}};
  }
  if (cmd == "set_behaviour") {
    Env& env = require_env();
    env.set_behaviour(h.value("name", std::string()));
    return {ok_message()};
  }
  if (cmd == "spec") {
    if (env_) {
      json s = spec_to_json(*env_);
      s["payload_len"] = 0;
      return {Message{std::move(s), {}}};
    }
    const Env probe(defaults_.env_id, defaults_.config);
    json s = spec_to_json(probe);
    s["payload_len"] = 0;
    return {Message{std::move(s), {}}};
  }
  throw Error(ErrorCode::kUnknownCmd, "unknown command '" + cmd + "'");
}

}  // namespace bugworld
