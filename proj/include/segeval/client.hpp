#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "segeval/protocol.hpp"
#include "segeval/types.hpp"

namespace segeval {

/// Error reply received from the server.
class RemoteError : public Error {
 public:
  RemoteError(std::string code, const std::string& message)
      : Error(code + ": " + message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

/// Blocking client for the evaluation service. One instance is one session.
class ProtocolClient {
 public:
  ProtocolClient(const std::string& host, std::uint16_t port);
  ~ProtocolClient();
  ProtocolClient(const ProtocolClient&) = delete;
  ProtocolClient& operator=(const ProtocolClient&) = delete;

  /// Returns the server's hello payload (dataset listing included).
  nlohmann::json hello(const std::string& algorithm, bool learning_capable = false,
                       std::string_view protocol_version = protocol::kProtocolVersion);
  /// Declares parameters; returns the values the server sets.
  nlohmann::json declare_params(const nlohmann::json& params);

  using FrameCallback = std::function<void(std::size_t index, std::span<const double> frame)>;

  /// Fetches a recording ("full" or "frame_by_frame"); on_frame fires once
  /// per frame in index order.
  Recording request_recording(const std::string& name, const std::string& mode = "full",
                              const FrameCallback& on_frame = {});
  nlohmann::json request_training(int held_out_fold);
  /// Returns the decoded evaluation_report payload.
  nlohmann::json report_points(const std::string& recording, const std::vector<double>& points);
  void bye();

  /// Low-level access for tests and tools.
  void send(protocol::MessageType type, nlohmann::json payload);
  /// Sends raw text as one line; a trailing newline is added if missing.
  void send_line(const std::string& line);
  protocol::Message receive();

 private:
  /// Receives one message; throws RemoteError for `error` messages.
  protocol::Message expect(protocol::MessageType type);

  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::int64_t next_id_ = 1;
};

}  // namespace segeval
