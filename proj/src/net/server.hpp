#pragma once

#include <atomic>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "protocol.hpp"

namespace bugworld {

inline constexpr int kDefaultPort = 8723;

/// Explicit port, else BUGWORLD_PORT, else the default. Throws Error(kBadArgument).
int resolve_port(std::optional<int> flag, const char* env_value);

struct ServerOptions {
  std::string host = "0.0.0.0";
  int port = kDefaultPort;  // 0 picks a free port
  SessionDefaults defaults;
  std::optional<std::filesystem::path> viewer_dir;
};

/// Accepts raw protocol connections and, on the same port, HTTP requests:
/// "/ws" upgrades to a WebSocket carrying the same messages, other paths are
/// served from the viewer directory. Every connection owns one Session.
class Server {
 public:
  explicit Server(ServerOptions options);  // binds; throws Error(kIo)
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  int port() const { return port_; }
  void run();   // blocks until stop()
  void stop();  // safe from any thread

 private:
  void serve_connection(int fd);
  void serve_http(int fd);
  void serve_websocket(int fd);
  void serve_static(int fd, const std::string& target);

  ServerOptions options_;
  int listen_fd_ = -1;
  int wake_[2] = {-1, -1};
  int port_ = 0;
  std::atomic<bool> stopping_{false};
  std::mutex mu_;
  std::vector<int> open_fds_;
  std::vector<std::thread> workers_;
};

// WebSocket framing, exposed for tests.
std::vector<uint8_t> ws_encode_frame(uint8_t opcode, std::span<const uint8_t> payload,
                                     std::optional<std::array<uint8_t, 4>> mask = std::nullopt);

}  // namespace bugworld
