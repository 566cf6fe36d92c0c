#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "stealth/scenario.hpp"

namespace stealth::harness {

struct ServeOptions {
  std::string address = "127.0.0.1";
  std::uint16_t port = 8080;  // 0 picks a free port
  Scenario scenario;
  std::optional<std::uint64_t> seed;
  std::map<std::string, double> overrides;
  std::optional<std::filesystem::path> static_root;  // files for plain HTTP requests
  bool stop_on_signal = false;                       // SIGINT/SIGTERM end run()
};

/// Websocket session service. Each connection gets its own Session; all
/// connections share one io_context thread, so within a session message
/// handling and ticks are serialized. Snapshots use latest-wins delivery: a
/// snapshot not yet sent when the next one is ready is replaced, never queued.
class Server {
 public:
  explicit Server(ServeOptions options);  // binds immediately
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t port() const;
  /// Blocks until stop() is called.
  void run();
  /// Safe to call from any thread.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace stealth::harness
