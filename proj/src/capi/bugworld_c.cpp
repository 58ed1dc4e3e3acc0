#include "bugworld/bugworld.h"

#include <cstdlib>
#include <cstring>
#include <optional>
#include <string>

#include "core/env.hpp"
#include "core/error.hpp"
#include "data/dataset.hpp"
#include "net/protocol.hpp"
#include "net/server.hpp"

using namespace bugworld;

struct bw_env {
  Env env;
  std::optional<Observation> obs;
  StepInfo info;
};

struct bw_server {
  Server server;
};

struct bw_dataset {
  DatasetReader reader;
  std::optional<DatasetItem> item;
};

namespace {

thread_local std::string g_last_error;

bw_status status_of(ErrorCode code) { return bw_status(int(code) + 1); }

bw_status fail(bw_status s, std::string detail) {
  g_last_error = std::move(detail);
  return s;
}

// Runs fn, translating exceptions into status codes.
template <class Fn>
bw_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return BW_OK;
  } catch (const Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const json::exception& e) {
    return fail(BW_ERR_BAD_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(BW_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(BW_ERR_INTERNAL, "unknown failure");
  }
}

void require(bool cond, const char* what) {
  if (!cond) throw Error(ErrorCode::kBadArgument, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

json parse_optional(const char* text) {
  if (!text || !*text) return json();
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kBadArgument, "invalid JSON argument");
  return j;
}

bw_status image_out(const Image* img, const uint8_t** rgb, int* w, int* h) {
  if (!img) return fail(BW_ERR_NOT_RESET, "no observation available");
  if (!rgb || !w || !h) return fail(BW_ERR_BAD_ARGUMENT, "null output pointer");
  *rgb = img->bytes().data();
  *w = img->width;
  *h = img->height;
  return BW_OK;
}

}  // namespace

extern "C" {

const char* bw_status_name(bw_status status) {
  if (status == BW_OK) return "OK";
  if (status == BW_ERR_INTERNAL) return "INTERNAL";
  if (status >= BW_ERR_UNKNOWN_ENV && status <= BW_ERR_IO) {
    static thread_local std::string name;
    name = std::string(error_code_name(ErrorCode(int(status) - 1)));
    return name.c_str();
  }
  return "UNKNOWN";
}

const char* bw_last_error(void) { return g_last_error.c_str(); }
const char* bw_version(void) { return "1.0.0"; }
void bw_string_free(char* s) { std::free(s); }

bw_status bw_env_create(const char* env_id, const char* config_json, bw_env** out) {
  return guarded([&] {
    require(env_id && out, "env_id and out must not be null");
    *out = nullptr;
    EnvConfig cfg = config_from_json(parse_optional(config_json));
    *out = new bw_env{Env(env_id, std::move(cfg)), std::nullopt, {}};
  });
}

void bw_env_destroy(bw_env* env) { delete env; }

bw_status bw_env_reset(bw_env* env, uint64_t seed) {
  return guarded([&] {
    require(env, "env must not be null");
    env->obs.reset();
    env->obs = env->env.reset(seed);
    env->info = {};
    env->info.active_bugs = env->env.catalog().active_names();
  });
}

bw_status bw_env_step(bw_env* env, int action, bw_step_info* info) {
  return guarded([&] {
    require(env, "env must not be null");
    if (action < 0 || action >= kActionCount) throw Error(ErrorCode::kInvalidAction, "action code out of range");
    StepResult r = env->env.step(Action(action));
    env->obs = std::move(r.obs);
    env->info = std::move(r.info);
    if (info) {
      const LogicalFlags& f = env->info.flags;
      *info = {env->info.step, env->info.done, f.stuck, f.out_of_bounds, f.crash, f.invalid_action_applied,
               env->obs.has_value()};
    }
  });
}

bw_status bw_env_frame(const bw_env* env, const uint8_t** rgb, int* width, int* height) {
  if (!env) return fail(BW_ERR_BAD_ARGUMENT, "env must not be null");
  return image_out(env->obs ? &env->obs->frame : nullptr, rgb, width, height);
}

bw_status bw_env_mask(const bw_env* env, const uint8_t** rgb, int* width, int* height) {
  if (!env) return fail(BW_ERR_BAD_ARGUMENT, "env must not be null");
  return image_out(env->obs ? &env->obs->mask : nullptr, rgb, width, height);
}

bw_status bw_env_state(const bw_env* env, double state[7]) {
  if (!env || !state) return fail(BW_ERR_BAD_ARGUMENT, "null argument");
  if (!env->obs) return fail(BW_ERR_NOT_RESET, "no observation available");
  std::memcpy(state, env->obs->state.data(), sizeof(double) * kStateSize);
  return BW_OK;
}

bw_status bw_env_info_json(const bw_env* env, char** out) {
  return guarded([&] {
    require(env && out, "null argument");
    *out = dup_string(info_to_json(env->info).dump());
  });
}

bw_status bw_env_set_bug(bw_env* env, const char* name, int enabled, const char* params_json) {
  return guarded([&] {
    require(env && name, "null argument");
    env->env.set_bug(name, enabled != 0, params_from_json(parse_optional(params_json)));
  });
}

bw_status bw_env_list_bugs_json(const bw_env* env, char** out) {
  return guarded([&] {
    require(env && out, "null argument");
    *out = dup_string(bugs_to_json(env->env.list_bugs()).dump());
  });
}

bw_status bw_env_spec_json(const bw_env* env, char** out) {
  return guarded([&] {
    require(env && out, "null argument");
    *out = dup_string(spec_to_json(env->env).dump());
  });
}

bw_status bw_env_set_behaviour(bw_env* env, const char* name) {
  return guarded([&] {
    require(env && name, "null argument");
    env->env.set_behaviour(name);
  });
}

bw_status bw_env_act(bw_env* env, int* action) {
  return guarded([&] {
    require(env && action, "null argument");
    *action = int(env->env.act());
  });
}

bw_status bw_env_set_agent_pose(bw_env* env, double x, double y, double z, double yaw, double pitch) {
  return guarded([&] {
    require(env, "env must not be null");
    env->env.set_agent_pose({x, y, z}, yaw, pitch);
  });
}

bw_status bw_resolve_port(int has_flag, int flag, int* port) {
  return guarded([&] {
    require(port, "port must not be null");
    *port = resolve_port(has_flag ? std::optional<int>(flag) : std::nullopt, std::getenv("BUGWORLD_PORT"));
  });
}

bw_status bw_server_create(const bw_server_options* options, bw_server** out) {
  return guarded([&] {
    require(options && out, "null argument");
    *out = nullptr;
    ServerOptions o;
    if (options->host) o.host = options->host;
    o.port = options->port;
    if (options->env_id) o.defaults.env_id = options->env_id;
    if (!is_environment(o.defaults.env_id))
      throw Error(ErrorCode::kUnknownEnv, "unknown environment '" + o.defaults.env_id + "'");
    o.defaults.config = config_from_json(parse_optional(options->config_json));
    if (options->viewer_dir) o.viewer_dir = std::filesystem::path(options->viewer_dir);
    *out = new bw_server{Server(std::move(o))};
  });
}

int bw_server_port(const bw_server* server) { return server ? server->server.port() : -1; }

bw_status bw_server_run(bw_server* server) {
  return guarded([&] {
    require(server, "server must not be null");
    server->server.run();
  });
}

void bw_server_stop(bw_server* server) {
  if (server) server->server.stop();
}

void bw_server_destroy(bw_server* server) { delete server; }

bw_status bw_dataset_generate(const char* options_json, char** manifest_json) {
  return guarded([&] {
    const json j = parse_optional(options_json);
    require(j.is_object(), "options must be a JSON object");
    GenerateOptions o;
    o.env_id = j.value("env_id", o.env_id);
    o.config = config_from_json(j.value("config", json()));
    o.behaviour = j.value("behaviour", o.behaviour);
    o.steps = j.value("steps", o.steps);
    if (j.contains("actions"))
      for (const auto& a : j["actions"]) o.actions.push_back(Action(a.get<int>()));
    if (j.contains("schedule"))
      for (const auto& s : j["schedule"]) o.schedule.push_back(parse_schedule_entry(s.get<std::string>()));
    require(j.contains("out_dir") && j["out_dir"].is_string(), "out_dir is required");
    o.out_dir = j["out_dir"].get<std::string>();
    const json manifest = generate(o);
    if (manifest_json) *manifest_json = dup_string(manifest.dump());
  });
}

bw_status bw_dataset_validate(const char* dir, char** report_json) {
  return guarded([&] {
    require(dir && report_json, "null argument");
    json out = json::array();
    for (const Violation& v : validate(dir)) out.push_back({{"kind", v.kind}, {"detail", v.detail}});
    *report_json = dup_string(out.dump());
  });
}

bw_status bw_dataset_open(const char* dir, bw_dataset** out) {
  return guarded([&] {
    require(dir && out, "null argument");
    *out = nullptr;
    *out = new bw_dataset{DatasetReader(dir), std::nullopt};
  });
}

void bw_dataset_close(bw_dataset* ds) { delete ds; }

size_t bw_dataset_size(const bw_dataset* ds) { return ds ? ds->reader.size() : 0; }

bw_status bw_dataset_load(bw_dataset* ds, size_t k) {
  return guarded([&] {
    require(ds, "dataset must not be null");
    ds->item = ds->reader.item(k);
  });
}

bw_status bw_dataset_frame(const bw_dataset* ds, const uint8_t** rgb, int* width, int* height) {
  if (!ds) return fail(BW_ERR_BAD_ARGUMENT, "dataset must not be null");
  return image_out(ds->item ? &ds->item->frame : nullptr, rgb, width, height);
}

bw_status bw_dataset_mask(const bw_dataset* ds, const uint8_t** rgb, int* width, int* height) {
  if (!ds) return fail(BW_ERR_BAD_ARGUMENT, "dataset must not be null");
  return image_out(ds->item ? &ds->item->mask : nullptr, rgb, width, height);
}

bw_status bw_dataset_row_json(const bw_dataset* ds, char** out) {
  return guarded([&] {
    require(ds && out, "null argument");
    if (!ds->item) throw Error(ErrorCode::kBadArgument, "no item loaded");
    *out = dup_string(ds->item->row.dump());
  });
}

}  // extern "C"
