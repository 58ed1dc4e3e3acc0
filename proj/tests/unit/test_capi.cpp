// Exercises the shared library through the public header only.
#include <bugworld/bugworld.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <thread>

#include "doctest.h"
#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json take_json(char* s) {
  REQUIRE(s != nullptr);
  json j = json::parse(s);
  bw_string_free(s);
  return j;
}

struct EnvHandle {
  bw_env* env = nullptr;
  ~EnvHandle() { bw_env_destroy(env); }
};

fs::path temp_path(const std::string& tag) {
  auto p = fs::temp_directory_path() / ("bugworld_capi_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("status names") {
  CHECK(std::string(bw_status_name(BW_OK)) == "OK");
  CHECK(std::string(bw_status_name(BW_ERR_UNKNOWN_BUG)) == "UNKNOWN_BUG");
  CHECK(std::string(bw_status_name(BW_ERR_EPISODE_DONE)) == "EPISODE_DONE");
  CHECK(std::string(bw_status_name(BW_ERR_IO)) == "IO_ERROR");
  CHECK(std::string(bw_status_name(BW_ERR_INTERNAL)) == "INTERNAL");
  CHECK(std::string(bw_status_name(bw_status(50))) == "UNKNOWN");
  CHECK(std::string(bw_version()) == "1.0.0");
}

TEST_CASE("environment lifecycle") {
  EnvHandle h;
  REQUIRE(bw_env_create("StaticRoom-v0", R"({"resolution":24,"seed":3})", &h.env) == BW_OK);
  const uint8_t* rgb = nullptr;
  int w = 0, ht = 0;
  CHECK(bw_env_frame(h.env, &rgb, &w, &ht) == BW_ERR_NOT_RESET);
  bw_step_info info{};
  CHECK(bw_env_step(h.env, 0, &info) == BW_ERR_NOT_RESET);
  CHECK(std::string(bw_last_error()).find("reset") != std::string::npos);

  REQUIRE(bw_env_reset(h.env, 3) == BW_OK);
  CHECK(std::string(bw_last_error()).empty());
  REQUIRE(bw_env_frame(h.env, &rgb, &w, &ht) == BW_OK);
  CHECK(w == 24);
  CHECK(ht == 24);
  double state[7];
  REQUIRE(bw_env_state(h.env, state) == BW_OK);
  CHECK(state[0] == doctest::Approx(3.0));
  CHECK(state[1] == doctest::Approx(0.5));
  CHECK(state[6] == 1.0);

  REQUIRE(bw_env_step(h.env, 1, &info) == BW_OK);
  CHECK(info.step == 1);
  CHECK(info.has_observation == 1);
  CHECK(info.done == 0);
  REQUIRE(bw_env_state(h.env, state) == BW_OK);
  CHECK(state[2] == doctest::Approx(1.1));
  const json i = take_json([&] {
    char* s = nullptr;
    REQUIRE(bw_env_info_json(h.env, &s) == BW_OK);
    return s;
  }());
  CHECK(i["step"] == 1);

  CHECK(bw_env_step(h.env, 11, &info) == BW_ERR_INVALID_ACTION);
  CHECK(bw_env_step(h.env, -1, &info) == BW_ERR_INVALID_ACTION);
}

TEST_CASE("create errors") {
  bw_env* env = reinterpret_cast<bw_env*>(1);
  CHECK(bw_env_create("Nowhere-v0", nullptr, &env) == BW_ERR_UNKNOWN_ENV);
  CHECK(env == nullptr);
  CHECK(bw_env_create("Maze-v0", "{bad", &env) == BW_ERR_BAD_ARGUMENT);
  CHECK(bw_env_create("Maze-v0", R"({"resolution":0})", &env) == BW_ERR_BAD_ARGUMENT);
  CHECK(bw_env_create(nullptr, nullptr, &env) == BW_ERR_BAD_ARGUMENT);
  CHECK(bw_env_reset(nullptr, 0) == BW_ERR_BAD_ARGUMENT);
}

TEST_CASE("bugs through the C API") {
  EnvHandle h;
  REQUIRE(bw_env_create("StaticRoom-v0", R"({"resolution":16})", &h.env) == BW_OK);
  CHECK(bw_env_set_bug(h.env, "nosuch", 1, nullptr) == BW_ERR_UNKNOWN_BUG);
  CHECK(bw_env_set_bug(h.env, "flicker", 1, R"({"probability":"x"})") == BW_ERR_BAD_ARGUMENT);
  CHECK(bw_env_set_bug(h.env, "black_screen", 1, nullptr) == BW_OK);
  char* s = nullptr;
  REQUIRE(bw_env_list_bugs_json(h.env, &s) == BW_OK);
  const json bugs = take_json(s);
  REQUIRE(bugs.size() == 17);
  int enabled = 0;
  for (const auto& b : bugs) enabled += b["enabled"].get<bool>();
  CHECK(enabled == 1);

  REQUIRE(bw_env_reset(h.env, 0) == BW_OK);
  bw_step_info info{};
  REQUIRE(bw_env_step(h.env, 0, &info) == BW_OK);
  const uint8_t* frame = nullptr;
  const uint8_t* mask = nullptr;
  int w = 0, ht = 0;
  REQUIRE(bw_env_frame(h.env, &frame, &w, &ht) == BW_OK);
  REQUIRE(bw_env_mask(h.env, &mask, &w, &ht) == BW_OK);
  bool frame_black = true, mask_uniform = true;
  for (int k = 0; k < w * ht * 3; ++k) {
    frame_black &= frame[k] == 0;
    mask_uniform &= mask[k] == mask[k % 3];
  }
  CHECK(frame_black);
  CHECK(mask_uniform);
  CHECK((mask[0] | mask[1] | mask[2]) != 0);

  REQUIRE(bw_env_spec_json(h.env, &s) == BW_OK);
  CHECK(take_json(s)["actions"].size() == 11);
}

TEST_CASE("crash leaves no observation") {
  EnvHandle h;
  REQUIRE(bw_env_create("StaticRoom-v0", R"({"resolution":8})", &h.env) == BW_OK);
  REQUIRE(bw_env_set_bug(h.env, "crash", 1, nullptr) == BW_OK);
  REQUIRE(bw_env_reset(h.env, 0) == BW_OK);
  bw_step_info info{};
  REQUIRE(bw_env_step(h.env, 0, &info) == BW_OK);
  CHECK(info.crash == 1);
  CHECK(info.done == 1);
  CHECK(info.has_observation == 0);
  const uint8_t* rgb = nullptr;
  int w = 0, ht = 0;
  CHECK(bw_env_frame(h.env, &rgb, &w, &ht) == BW_ERR_NOT_RESET);
  CHECK(bw_env_step(h.env, 0, &info) == BW_ERR_EPISODE_DONE);
}

TEST_CASE("behaviours and poses") {
  EnvHandle h;
  REQUIRE(bw_env_create("Maze-v0", R"({"resolution":8})", &h.env) == BW_OK);
  int action = -1;
  CHECK(bw_env_set_behaviour(h.env, "wander") == BW_ERR_UNKNOWN_BEHAVIOUR);
  CHECK(bw_env_act(h.env, &action) == BW_ERR_BEHAVIOUR_EXTERNAL);
  CHECK(bw_env_set_agent_pose(h.env, 1, 0.5, 1, 0, 0) == BW_ERR_NOT_RESET);
  REQUIRE(bw_env_set_behaviour(h.env, "nav") == BW_OK);
  REQUIRE(bw_env_reset(h.env, 1) == BW_OK);
  REQUIRE(bw_env_act(h.env, &action) == BW_OK);
  CHECK(action >= 0);
  CHECK(action < 11);
  REQUIRE(bw_env_set_agent_pose(h.env, 1.0, 0.5, 1.25, 45, 0) == BW_OK);
  bw_step_info info{};
  REQUIRE(bw_env_step(h.env, 0, &info) == BW_OK);
  double state[7];
  REQUIRE(bw_env_state(h.env, state) == BW_OK);
  CHECK(state[0] == doctest::Approx(1.0));
  CHECK(state[2] == doctest::Approx(1.25));
  CHECK(state[3] == doctest::Approx(45));
}

TEST_CASE("port resolution") {
  int port = 0;
  ::unsetenv("BUGWORLD_PORT");
  REQUIRE(bw_resolve_port(0, 0, &port) == BW_OK);
  CHECK(port == 8723);
  ::setenv("BUGWORLD_PORT", "9123", 1);
  REQUIRE(bw_resolve_port(0, 0, &port) == BW_OK);
  CHECK(port == 9123);
  REQUIRE(bw_resolve_port(1, 9200, &port) == BW_OK);
  CHECK(port == 9200);
  ::setenv("BUGWORLD_PORT", "nine", 1);
  CHECK(bw_resolve_port(0, 0, &port) == BW_ERR_BAD_ARGUMENT);
  ::unsetenv("BUGWORLD_PORT");
}

TEST_CASE("server start and stop") {
  bw_server_options o{"127.0.0.1", 0, "StaticRoom-v0", R"({"resolution":8})", nullptr};
  bw_server* server = nullptr;
  REQUIRE(bw_server_create(&o, &server) == BW_OK);
  CHECK(bw_server_port(server) > 0);
  std::thread t([server] { bw_server_run(server); });
  bw_server_stop(server);
  t.join();
  bw_server_destroy(server);

  bw_server_options bad{"127.0.0.1", 0, "Nowhere-v0", nullptr, nullptr};
  CHECK(bw_server_create(&bad, &server) == BW_ERR_UNKNOWN_ENV);
  CHECK(bw_server_port(nullptr) == -1);
}

TEST_CASE("datasets through the C API") {
  const fs::path out = temp_path("ds");
  const json opts{{"env_id", "StaticRoom-v0"},
                  {"config", {{"resolution", 16}, {"seed", 2}}},
                  {"steps", 6},
                  {"schedule", {"texture_missing@1"}},
                  {"out_dir", out.string()}};
  char* s = nullptr;
  REQUIRE(bw_dataset_generate(opts.dump().c_str(), &s) == BW_OK);
  CHECK(take_json(s)["steps"] == 6);
  REQUIRE(bw_dataset_validate(out.string().c_str(), &s) == BW_OK);
  CHECK(take_json(s).empty());

  bw_dataset* ds = nullptr;
  REQUIRE(bw_dataset_open(out.string().c_str(), &ds) == BW_OK);
  CHECK(bw_dataset_size(ds) == 6);
  const uint8_t* rgb = nullptr;
  int w = 0, h = 0;
  CHECK(bw_dataset_frame(ds, &rgb, &w, &h) == BW_ERR_NOT_RESET);
  REQUIRE(bw_dataset_load(ds, 5) == BW_OK);
  REQUIRE(bw_dataset_mask(ds, &rgb, &w, &h) == BW_OK);
  CHECK(w == 16);
  REQUIRE(bw_dataset_row_json(ds, &s) == BW_OK);
  const json row = take_json(s);
  CHECK(row["step"] == 5);
  CHECK(row["active_bugs"] == json::array({"texture_missing"}));
  CHECK(bw_dataset_load(ds, 6) == BW_ERR_BAD_ARGUMENT);
  bw_dataset_close(ds);

  CHECK(bw_dataset_generate(opts.dump().c_str(), &s) == BW_ERR_IO);
  CHECK(bw_dataset_generate(R"({"steps":3})", &s) == BW_ERR_BAD_ARGUMENT);
  CHECK(bw_dataset_generate(R"({"schedule":["x@"],"out_dir":"/tmp/never"})", &s) == BW_ERR_BAD_ARGUMENT);
  CHECK(bw_dataset_open("/nonexistent/bugworld", &ds) == BW_ERR_IO);
  fs::remove_all(out);
}
