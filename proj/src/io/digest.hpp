#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace bugworld {

std::string sha256_hex(std::span<const uint8_t> data);

/// Incremental SHA-256 for checksums over several buffers.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;
  void update(std::span<const uint8_t> data);
  std::string hex();

 private:
  void* ctx_;
};

/// Sec-WebSocket-Accept value for a client key.
std::string websocket_accept(std::string_view key);

}  // namespace bugworld
