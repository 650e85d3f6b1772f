// Copyright 2026 The s2c-iae Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Generator and embedder clients over a stream socket speaking the wire
// protocol, and a small server that exposes local implementations the same
// way.

#pragma once

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <list>
#include <mutex>
#include <string>
#include <thread>

#include "s2c/embedding.hpp"
#include "s2c/generator.hpp"
#include "s2c/wire.hpp"

namespace s2c {

namespace detail {

class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Socket& operator=(Socket&& o) noexcept {
    if (this != &o) {
      close();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  ~Socket() { close(); }

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  void close() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }
  void shutdown() {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
  }

  // Throws TransportError on failure.
  void send_all(std::string_view data) {
    while (!data.empty()) {
      ssize_t n = ::send(fd_, data.data(), data.size(), MSG_NOSIGNAL);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) throw TransportError(std::string("send failed: ") + std::strerror(errno));
      data.remove_prefix(static_cast<std::size_t>(n));
    }
  }

  // Next '\n'-terminated frame without the newline; nullopt on clean EOF.
  std::optional<std::string> read_line() {
    for (;;) {
      if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return line;
      }
      char chunk[4096];
      ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
      if (n < 0 && errno == EINTR) continue;
      if (n < 0) throw TransportError(std::string("recv failed: ") + std::strerror(errno));
      if (n == 0) {
        if (buffer_.empty()) return std::nullopt;
        throw TransportError("connection closed mid-frame");
      }
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  int fd_ = -1;
  std::string buffer_;
};

// "unix:/path/to/socket" or "host:port".
inline Socket connect_to(const std::string& address) {
  if (address.rfind("unix:", 0) == 0) {
    std::string path = address.substr(5);
    sockaddr_un sa{};
    sa.sun_family = AF_UNIX;
    if (path.size() >= sizeof sa.sun_path) throw UsageError("socket path too long: " + path);
    std::memcpy(sa.sun_path, path.c_str(), path.size() + 1);
    Socket s(::socket(AF_UNIX, SOCK_STREAM, 0));
    if (!s.valid() || ::connect(s.fd(), reinterpret_cast<sockaddr*>(&sa), sizeof sa) != 0)
      throw TransportError("cannot connect to " + address + ": " + std::strerror(errno));
    return s;
  }
  auto colon = address.rfind(':');
  if (colon == std::string::npos) throw UsageError("generator address must be host:port or unix:/path");
  std::string host = address.substr(0, colon);
  std::string port = address.substr(colon + 1);
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &res); rc != 0)
    throw TransportError("cannot resolve " + address + ": " + ::gai_strerror(rc));
  Socket s;
  for (addrinfo* ai = res; ai; ai = ai->ai_next) {
    Socket c(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
    if (c.valid() && ::connect(c.fd(), ai->ai_addr, ai->ai_addrlen) == 0) {
      s = std::move(c);
      break;
    }
  }
  ::freeaddrinfo(res);
  if (!s.valid()) throw TransportError("cannot connect to " + address);
  return s;
}

}  // namespace detail

// Client side. One request in flight per instance; concurrent callers queue
// on a mutex. A failed exchange drops the connection so the next call
// reconnects.
class RemoteGenerator final : public Generator {
 public:
  explicit RemoteGenerator(std::string address) : address_(std::move(address)) {}

  GenerateResponse generate(const GenerateRequest& req) const override {
    std::lock_guard lock(mu_);
    try {
      if (!sock_.valid()) sock_ = detail::connect_to(address_);
      sock_.send_all(wire::encode_request(req));
      auto line = sock_.read_line();
      if (!line) throw TransportError("generator closed the connection");
      return wire::decode_response(*line);
    } catch (const TransportError&) {
      sock_.close();
      throw;
    }
  }

  const std::string& address() const { return address_; }

 private:
  std::string address_;
  mutable std::mutex mu_;
  mutable detail::Socket sock_;
};

// Embedder backed by a remote embedding endpoint. Vectors are
// re-normalised on receipt; warnings (e.g. truncated input) go to the sink.
class RemoteEmbedder final : public Embedder {
 public:
  explicit RemoteEmbedder(std::string address, WarningSink on_warning = {})
      : address_(std::move(address)), on_warning_(std::move(on_warning)) {}

  Embedding embed(std::string_view text) const override {
    std::string t(text);
    auto v = request(std::span<const std::string>(&t, 1));
    if (v.size() != 1) throw ProtocolError("embedder returned " + std::to_string(v.size()) + " vectors for 1 text");
    return std::move(v.front());
  }

  std::vector<Embedding> embed_batch(std::span<const std::string> texts) const {
    if (texts.empty()) return {};
    auto v = request(texts);
    if (v.size() != texts.size()) throw ProtocolError("embedder returned a batch of the wrong size");
    return v;
  }

  std::size_t dimension() const override {
    {
      std::lock_guard lock(mu_);
      if (dim_) return dim_;
    }
    return embed("").size();
  }

 private:
  std::vector<Embedding> request(std::span<const std::string> texts) const {
    std::lock_guard lock(mu_);
    wire::EmbedResult r;
    try {
      if (!sock_.valid()) sock_ = detail::connect_to(address_);
      sock_.send_all(wire::encode_embed_request(texts));
      auto line = sock_.read_line();
      if (!line) throw TransportError("embedder closed the connection");
      r = wire::decode_embeddings(*line);
    } catch (const TransportError&) {
      sock_.close();
      throw;
    }
    for (const auto& w : r.warnings) warn(on_warning_, w);
    for (auto& v : r.vectors) {
      if (dim_ && v.size() != dim_) throw ProtocolError("embedding dimension changed between calls");
      dim_ = v.size();
      l2_normalize(v);
    }
    return std::move(r.vectors);
  }

  std::string address_;
  WarningSink on_warning_;
  mutable std::mutex mu_;
  mutable detail::Socket sock_;
  mutable std::size_t dim_ = 0;
};

// Serves a Generator (and optionally an Embedder) on 127.0.0.1:<port>
// (0 picks a free port) until destroyed or stopped.
class GeneratorServer {
 public:
  GeneratorServer(const Generator& generator, std::uint16_t port = 0, const Embedder* embedder = nullptr)
      : generator_(generator), embedder_(embedder) {
    listener_ = detail::Socket(::socket(AF_INET, SOCK_STREAM, 0));
    if (!listener_.valid()) throw TransportError("cannot create socket");
    int one = 1;
    ::setsockopt(listener_.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in sa{};
    sa.sin_family = AF_INET;
    sa.sin_port = htons(port);
    sa.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    if (::bind(listener_.fd(), reinterpret_cast<sockaddr*>(&sa), sizeof sa) != 0 || ::listen(listener_.fd(), 16) != 0)
      throw TransportError(std::string("cannot listen: ") + std::strerror(errno));
    socklen_t len = sizeof sa;
    ::getsockname(listener_.fd(), reinterpret_cast<sockaddr*>(&sa), &len);
    port_ = ntohs(sa.sin_port);
    acceptor_ = std::thread([this] { accept_loop(); });
  }

  GeneratorServer(const GeneratorServer&) = delete;
  GeneratorServer& operator=(const GeneratorServer&) = delete;
  ~GeneratorServer() { stop(); }

  std::uint16_t port() const { return port_; }
  std::string address() const { return "127.0.0.1:" + std::to_string(port_); }

  void stop() {
    if (stopping_.exchange(true)) return;
    listener_.shutdown();
    if (acceptor_.joinable()) acceptor_.join();
    {
      std::lock_guard lock(mu_);
      for (auto& c : connections_) c.sock.shutdown();
    }
    for (auto& c : connections_)
      if (c.worker.joinable()) c.worker.join();
  }

  // Blocks until stop() is called from another thread.
  void wait() {
    if (acceptor_.joinable()) acceptor_.join();
  }

 private:
  struct Connection {
    detail::Socket sock;
    std::thread worker;
  };

  void accept_loop() {
    while (!stopping_) {
      int fd = ::accept(listener_.fd(), nullptr, nullptr);
      if (fd < 0) {
        if (errno == EINTR) continue;
        return;
      }
      std::lock_guard lock(mu_);
      connections_.push_back({detail::Socket(fd), {}});
      Connection& c = connections_.back();
      c.worker = std::thread([this, &c] { serve(c.sock); });
    }
  }

  void serve(detail::Socket& sock) {
    try {
      while (auto line = sock.read_line()) {
        std::string reply;
        try {
          reply = answer(*line);
        } catch (const ProtocolError& e) {
          reply = wire::encode_error(e.what(), false);
        } catch (const TransportError& e) {
          reply = wire::encode_error(e.what(), true);
        } catch (const std::exception& e) {
          reply = wire::encode_error(e.what(), false);
        }
        sock.send_all(reply);
      }
    } catch (const TransportError&) {
      // Peer went away.
    }
  }

  std::string answer(const std::string& frame) const {
    if (wire::detail::parse_frame(frame).value("type", std::string()) == "embed") {
      if (!embedder_) throw ProtocolError("this server has no embedder");
      wire::EmbedResult r;
      for (const auto& t : wire::decode_embed_request(frame)) r.vectors.push_back(embedder_->embed(t));
      return wire::encode_embeddings(r);
    }
    return wire::encode_response(generator_.generate(wire::decode_request(frame)));
  }

  const Generator& generator_;
  const Embedder* embedder_;
  detail::Socket listener_;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  std::mutex mu_;
  std::list<Connection> connections_;
};

}  // namespace s2c
