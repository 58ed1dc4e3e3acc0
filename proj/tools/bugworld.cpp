// Command-line front end over the C API: serve, gen, validate, bugs.
#include <bugworld/bugworld.h>

#include <csignal>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

using nlohmann::json;

namespace {

int report(bw_status s) {
  std::cerr << "bugworld: " << bw_status_name(s) << ": " << bw_last_error() << "\n";
  return 2;
}

std::string take(char* s) {
  std::string out = s ? s : "";
  bw_string_free(s);
  return out;
}

json env_config(int resolution, std::optional<uint64_t> seed, int maze_w, int maze_h) {
  json c{{"resolution", resolution}, {"maze_width", maze_w}, {"maze_height", maze_h}};
  if (seed) c["seed"] = *seed;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bugworld: headless bug-injecting 3D environment"};
  app.require_subcommand(1);

  std::string env_id = "Maze-v0";
  int resolution = 128;
  std::optional<uint64_t> seed;
  int maze_w = 8, maze_h = 8;

  auto* serve = app.add_subcommand("serve", "run the protocol server");
  std::optional<int> port;
  std::string host = "0.0.0.0";
  std::optional<std::string> viewer;
  serve->add_option("--env", env_id, "default environment for 'make'")->capture_default_str();
  serve->add_option("--port", port, "listen port (default: BUGWORLD_PORT or 8723)");
  serve->add_option("--host", host, "listen address")->capture_default_str();
  serve->add_option("--resolution", resolution, "frame width and height")->capture_default_str();
  serve->add_option("--seed", seed, "default episode seed");
  serve->add_option("--maze-width", maze_w)->capture_default_str();
  serve->add_option("--maze-height", maze_h)->capture_default_str();
  serve->add_option("--viewer", viewer, "directory of viewer static files");

  auto* gen = app.add_subcommand("gen", "generate a labelled dataset");
  std::string gen_env = "StaticRoom-v0", behaviour = "nav", out_dir;
  uint64_t steps = 1000;
  std::vector<std::string> bugs;
  gen->add_option("--env", gen_env)->capture_default_str();
  gen->add_option("--behaviour", behaviour)->capture_default_str();
  gen->add_option("--steps", steps)->capture_default_str();
  gen->add_option("--seed", seed);
  gen->add_option("--resolution", resolution)->capture_default_str();
  gen->add_option("--maze-width", maze_w)->capture_default_str();
  gen->add_option("--maze-height", maze_h)->capture_default_str();
  gen->add_option("--bug", bugs, "NAME@STEP[:on|:off][,key=value...] (repeatable)");
  gen->add_option("--out", out_dir, "output directory")->required();

  auto* val = app.add_subcommand("validate", "check a generated dataset");
  std::string val_dir;
  val->add_option("dir", val_dir)->required();

  auto* list = app.add_subcommand("bugs", "list the bug catalog");
  std::string list_env = "StaticRoom-v0";
  list->add_option("--env", list_env)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (*serve) {
    int resolved = 0;
    if (bw_status s = bw_resolve_port(port.has_value(), port.value_or(0), &resolved)) return report(s);
    const std::string cfg = env_config(resolution, seed, maze_w, maze_h).dump();
    bw_server_options opts{host.c_str(), resolved, env_id.c_str(), cfg.c_str(),
                           viewer ? viewer->c_str() : nullptr};
    bw_server* server = nullptr;
    if (bw_status s = bw_server_create(&opts, &server)) return report(s);

    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);
    std::thread runner([server] { bw_server_run(server); });
    std::cerr << "bugworld: serving " << env_id << " on " << host << ":" << bw_server_port(server)
              << (viewer ? " with viewer" : "") << "\n";
    int sig = 0;
    sigwait(&set, &sig);
    bw_server_stop(server);
    runner.join();
    bw_server_destroy(server);
    return 0;
  }

  if (*gen) {
    json opts{{"env_id", gen_env},
              {"config", env_config(resolution, seed, maze_w, maze_h)},
              {"behaviour", behaviour},
              {"steps", steps},
              {"schedule", bugs},
              {"out_dir", out_dir}};
    char* manifest = nullptr;
    if (bw_status s = bw_dataset_generate(opts.dump().c_str(), &manifest)) return report(s);
    const json m = json::parse(take(manifest));
    std::cout << "wrote " << m["steps"] << " steps to " << out_dir;
    if (!m["termination"].is_null()) std::cout << " (ended by " << m["termination"].get<std::string>() << ")";
    std::cout << "\n";
    return 0;
  }

  if (*val) {
    char* out = nullptr;
    if (bw_status s = bw_dataset_validate(val_dir.c_str(), &out)) return report(s);
    const json violations = json::parse(take(out));
    for (const auto& v : violations)
      std::cout << v["kind"].get<std::string>() << ": " << v["detail"].get<std::string>() << "\n";
    if (violations.empty()) std::cout << "ok\n";
    return violations.empty() ? 0 : 1;
  }

  if (*list) {
    bw_env* env = nullptr;
    if (bw_status s = bw_env_create(list_env.c_str(), nullptr, &env)) return report(s);
    char* out = nullptr;
    const bw_status s = bw_env_list_bugs_json(env, &out);
    bw_env_destroy(env);
    if (s) return report(s);
    for (const auto& b : json::parse(take(out))) {
      const auto& c = b["color"];
      std::printf("%-28s tag %2d  rgb(%3d,%3d,%3d)  %s\n", b["name"].get<std::string>().c_str(), b["tag"].get<int>(),
                  c[0].get<int>(), c[1].get<int>(), c[2].get<int>(), b["params"].dump().c_str());
    }
    return 0;
  }
  return 0;
}
