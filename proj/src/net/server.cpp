#include "server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "core/error.hpp"
#include "io/digest.hpp"

namespace bugworld {

int resolve_port(std::optional<int> flag, const char* env_value) {
  int port = kDefaultPort;
  if (flag) {
    port = *flag;
  } else if (env_value && *env_value) {
    const std::string_view s(env_value);
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), port);
    if (ec != std::errc() || end != s.data() + s.size())
      throw Error(ErrorCode::kBadArgument, "BUGWORLD_PORT is not a number: " + std::string(s));
  }
  if (port < 0 || port > 65535) throw Error(ErrorCode::kBadArgument, "port out of range");
  return port;
}

namespace {

struct Closed {};

void read_exact(int fd, void* dst, size_t n) {
  auto* p = static_cast<uint8_t*>(dst);
  while (n > 0) {
    const ssize_t r = ::recv(fd, p, n, 0);
    if (r <= 0) {
      if (r < 0 && errno == EINTR) continue;
      throw Closed{};
    }
    p += r;
    n -= size_t(r);
  }
}

void write_all(int fd, std::span<const uint8_t> data) {
  const uint8_t* p = data.data();
  size_t n = data.size();
  while (n > 0) {
    const ssize_t w = ::send(fd, p, n, MSG_NOSIGNAL);
    if (w <= 0) {
      if (w < 0 && errno == EINTR) continue;
      throw Closed{};
    }
    p += w;
    n -= size_t(w);
  }
}

void write_all(int fd, std::string_view s) { write_all(fd, {reinterpret_cast<const uint8_t*>(s.data()), s.size()}); }

std::vector<uint8_t> encode(const Message& m) { return encode_message(m.header, m.payload); }

std::string lower(std::string s) {
  for (char& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

struct HttpRequest {
  std::string method;
  std::string target;
  std::map<std::string, std::string> headers;  // lower-case names
};

HttpRequest read_http_request(int fd) {
  std::string raw;
  char c;
  while (raw.size() < 16384) {
    read_exact(fd, &c, 1);
    raw.push_back(c);
    if (raw.ends_with("\r\n\r\n")) break;
  }
  if (!raw.ends_with("\r\n\r\n")) throw Closed{};
  std::istringstream in(raw);
  HttpRequest req;
  std::string line;
  std::getline(in, line);
  std::istringstream first(line);
  first >> req.method >> req.target;
  while (std::getline(in, line) && line != "\r") {
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    req.headers[lower(line.substr(0, colon))] = trim(std::string_view(line).substr(colon + 1));
  }
  return req;
}

void send_http(int fd, int status, std::string_view reason, std::string_view type, std::string_view body) {
  std::ostringstream h;
  h << "HTTP/1.1 " << status << ' ' << reason << "\r\nContent-Type: " << type
    << "\r\nContent-Length: " << body.size() << "\r\nConnection: close\r\n\r\n";
  write_all(fd, h.str());
  write_all(fd, body);
}

std::string_view content_type(const std::filesystem::path& p) {
  static const std::map<std::string, std::string_view> kTypes{
      {".html", "text/html; charset=utf-8"}, {".js", "text/javascript"}, {".mjs", "text/javascript"},
      {".css", "text/css"},                   {".json", "application/json"}, {".png", "image/png"},
      {".svg", "image/svg+xml"},              {".map", "application/json"}, {".ico", "image/x-icon"},
      {".wasm", "application/wasm"}};
  const auto it = kTypes.find(lower(p.extension().string()));
  return it == kTypes.end() ? std::string_view("application/octet-stream") : it->second;
}

}  // namespace

std::vector<uint8_t> ws_encode_frame(uint8_t opcode, std::span<const uint8_t> payload,
                                     std::optional<std::array<uint8_t, 4>> mask) {
  std::vector<uint8_t> out;
  out.push_back(uint8_t(0x80 | (opcode & 0x0f)));
  const uint8_t mbit = mask ? 0x80 : 0;
  const uint64_t n = payload.size();
  if (n < 126) {
    out.push_back(uint8_t(mbit | n));
  } else if (n <= 0xffff) {
    out.push_back(uint8_t(mbit | 126));
    out.push_back(uint8_t(n >> 8));
    out.push_back(uint8_t(n));
  } else {
    out.push_back(uint8_t(mbit | 127));
    for (int s = 56; s >= 0; s -= 8) out.push_back(uint8_t(n >> s));
  }
  if (mask) out.insert(out.end(), mask->begin(), mask->end());
  const size_t start = out.size();
  out.insert(out.end(), payload.begin(), payload.end());
  if (mask)
    for (size_t i = 0; i < n; ++i) out[start + i] ^= (*mask)[i % 4];
  return out;
}

Server::Server(ServerOptions options) : options_(std::move(options)) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw Error(ErrorCode::kIo, std::string("socket: ") + std::strerror(errno));
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(uint16_t(options_.port));
  if (::inet_pton(AF_INET, options_.host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw Error(ErrorCode::kBadArgument, "bad listen address '" + options_.host + "'");
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(listen_fd_, 16) < 0) {
    const std::string err = std::strerror(errno);
    ::close(listen_fd_);
    throw Error(ErrorCode::kIo, "cannot listen on port " + std::to_string(options_.port) + ": " + err);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  if (::pipe(wake_) < 0) {
    ::close(listen_fd_);
    throw Error(ErrorCode::kIo, "pipe failed");
  }
}

Server::~Server() {
  stop();
  for (auto& t : workers_)
    if (t.joinable()) t.join();
  ::close(listen_fd_);
  ::close(wake_[0]);
  ::close(wake_[1]);
}

void Server::stop() {
  if (stopping_.exchange(true)) return;
  const char b = 1;
  [[maybe_unused]] auto r = ::write(wake_[1], &b, 1);
  std::lock_guard lock(mu_);
  for (int fd : open_fds_) ::shutdown(fd, SHUT_RDWR);
}

void Server::run() {
  while (!stopping_) {
    pollfd fds[2] = {{listen_fd_, POLLIN, 0}, {wake_[0], POLLIN, 0}};
    if (::poll(fds, 2, -1) < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (fds[1].revents) break;
    if (!(fds[0].revents & POLLIN)) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    std::lock_guard lock(mu_);
    if (stopping_) {
      ::close(fd);
      break;
    }
    open_fds_.push_back(fd);
    workers_.emplace_back([this, fd] {
      serve_connection(fd);
      std::lock_guard inner(mu_);
      open_fds_.erase(std::find(open_fds_.begin(), open_fds_.end(), fd));
      ::close(fd);
    });
  }
}

void Server::serve_connection(int fd) {
  try {
    char peek[4];
    ssize_t got = 0;
    while (got < 4) {
      got = ::recv(fd, peek, 4, MSG_PEEK | MSG_WAITALL);
      if (got <= 0) return;
    }
    if (std::memcmp(peek, "GET ", 4) == 0) {
      serve_http(fd);
      return;
    }
    Session session(options_.defaults);
    std::vector<uint8_t> buffer;
    uint8_t chunk[65536];
    for (;;) {
      const ssize_t r = ::recv(fd, chunk, sizeof chunk, 0);
      if (r <= 0) {
        if (r < 0 && errno == EINTR) continue;
        return;
      }
      buffer.insert(buffer.end(), chunk, chunk + r);
      for (;;) {
        std::optional<Message> req;
        try {
          req = take_message(buffer);
        } catch (const Error& e) {
          write_all(fd, encode(error_message(e.code(), e.what())));
          return;
        }
        if (!req) break;
        for (const Message& m : session.handle(*req)) write_all(fd, encode(m));
      }
    }
  } catch (const Closed&) {
  }
}

void Server::serve_http(int fd) {
  const HttpRequest req = read_http_request(fd);
  const std::string path = req.target.substr(0, req.target.find('?'));
  if (path == "/ws") {
    const auto key = req.headers.find("sec-websocket-key");
    const auto upgrade = req.headers.find("upgrade");
    if (key == req.headers.end() || upgrade == req.headers.end() || lower(upgrade->second) != "websocket") {
      send_http(fd, 400, "Bad Request", "text/plain", "websocket upgrade required\n");
      return;
    }
    write_all(fd, "HTTP/1.1 101 Switching Protocols\r\nUpgrade: websocket\r\nConnection: Upgrade\r\n"
                  "Sec-WebSocket-Accept: " + websocket_accept(key->second) + "\r\n\r\n");
    serve_websocket(fd);
    return;
  }
  serve_static(fd, path);
}

void Server::serve_static(int fd, const std::string& target) {
  if (!options_.viewer_dir) {
    send_http(fd, 404, "Not Found", "text/plain", "viewer not enabled\n");
    return;
  }
  std::string rel = target;
  if (rel.empty() || rel.back() == '/') rel += "index.html";
  const std::filesystem::path p = std::filesystem::path(rel).relative_path();
  for (const auto& part : p)
    if (part == "..") {
      send_http(fd, 403, "Forbidden", "text/plain", "forbidden\n");
      return;
    }
  const std::filesystem::path file = *options_.viewer_dir / p;
  std::ifstream in(file, std::ios::binary);
  if (!in || std::filesystem::is_directory(file)) {
    send_http(fd, 404, "Not Found", "text/plain", "not found\n");
    return;
  }
  std::ostringstream body;
  body << in.rdbuf();
  send_http(fd, 200, "OK", content_type(file), body.str());
}

void Server::serve_websocket(int fd) {
  Session session(options_.defaults);
  std::vector<uint8_t> message;
  bool in_message = false;
  auto send_frame = [&](uint8_t opcode, std::span<const uint8_t> payload) {
    write_all(fd, ws_encode_frame(opcode, payload));
  };
  for (;;) {
    uint8_t hdr[2];
    read_exact(fd, hdr, 2);
    const bool fin = hdr[0] & 0x80;
    const uint8_t opcode = hdr[0] & 0x0f;
    const bool masked = hdr[1] & 0x80;
    uint64_t len = hdr[1] & 0x7f;
    if (len == 126) {
      uint8_t b[2];
      read_exact(fd, b, 2);
      len = uint64_t(b[0]) << 8 | b[1];
    } else if (len == 127) {
      uint8_t b[8];
      read_exact(fd, b, 8);
      len = 0;
      for (uint8_t x : b) len = len << 8 | x;
    }
    if (len > kMaxPayloadBytes) return;
    uint8_t key[4] = {0, 0, 0, 0};
    if (masked) read_exact(fd, key, 4);
    std::vector<uint8_t> payload(len);
    if (len) read_exact(fd, payload.data(), len);
    if (masked)
      for (size_t i = 0; i < len; ++i) payload[i] ^= key[i % 4];

    if (opcode == 0x8) {
      send_frame(0x8, {});
      return;
    }
    if (opcode == 0x9) {
      send_frame(0xA, payload);
      continue;
    }
    if (opcode == 0xA) continue;
    if (opcode == 0x1 || opcode == 0x2) {
      message = std::move(payload);
      in_message = true;
    } else if (opcode == 0x0 && in_message) {
      message.insert(message.end(), payload.begin(), payload.end());
    } else {
      return;
    }
    if (!fin) continue;
    in_message = false;
    Message req;
    try {
      req = decode_message(message);
    } catch (const Error& e) {
      send_frame(0x2, encode(error_message(e.code(), e.what())));
      send_frame(0x8, {});
      return;
    }
    for (const Message& m : session.handle(req)) send_frame(0x2, encode(m));
  }
}

}  // namespace bugworld
