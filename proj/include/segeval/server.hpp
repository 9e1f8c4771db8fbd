#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "segeval/dataset.hpp"
#include "segeval/pipeline.hpp"

namespace segeval {

struct ServerOptions {
  std::string host = "127.0.0.1";
  /// 0 picks a free port; query it with Server::port().
  std::uint16_t port = 0;
  std::filesystem::path report_dir = "reports";
  std::size_t threads = 2;
  /// Parameter values pushed to clients in reply to declare_params.
  nlohmann::json param_overrides = nlohmann::json::object();
};

/// TCP front end of the session state machine: newline-delimited JSON, one
/// isolated Session per connection, messages of a connection handled in
/// arrival order. No authentication or TLS.
class Server {
 public:
  Server(Dataset dataset, EvalConfig config, ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts the worker threads. Throws Error on bind failure.
  void start();
  std::uint16_t port() const;
  /// Closes the listener and all connections, then joins the workers.
  void stop();

  struct Impl;  // visible to the connection handlers in server.cpp

 private:
  std::unique_ptr<Impl> impl_;
};

/// Splits "host:port". Throws ConfigError on malformed input.
std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& text);

}  // namespace segeval
