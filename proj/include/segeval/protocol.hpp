#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "segeval/dataset.hpp"
#include "segeval/errors.hpp"
#include "segeval/pipeline.hpp"

namespace segeval::protocol {

inline constexpr std::string_view kProtocolVersion = "1";

enum class MessageType {
  Hello,
  DeclareParams,
  SetParams,
  RequestRecording,
  RecordingMeta,
  RecordingFrames,
  RequestTraining,
  TrainingData,
  ReportPoints,
  EvaluationReport,
  Error,
  Bye,
};

std::string_view to_string(MessageType t);
std::optional<MessageType> parse_message_type(std::string_view s);

/// One line of the newline-delimited JSON wire format.
struct Message {
  MessageType type = MessageType::Hello;
  std::int64_t id = 0;
  nlohmann::json payload = nlohmann::json::object();
  std::string protocol_version{kProtocolVersion};
  /// Id of the request this message answers, when it is a reply.
  std::optional<std::int64_t> reply_to;

  bool operator==(const Message&) const = default;
};

/// Raised for lines that are not valid protocol messages.
class ProtocolError : public Error {
 public:
  ProtocolError(std::string code, const std::string& message)
      : Error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

/// Serializes to a single line terminated by '\n'.
std::string encode(const Message& msg);
/// Parses one line (trailing newline optional). Throws ProtocolError("malformed").
Message decode(std::string_view line);

enum class SessionState { AwaitHello, Idle, Streaming, AwaitReport, Done };

std::string_view to_string(SessionState s);

/// Per-connection state. Plain value; the handler never shares it.
struct Session {
  std::uint64_t session_id = 0;
  SessionState state = SessionState::AwaitHello;
  std::string client;
  std::string algorithm = "external";
  bool learning_capable = false;
  nlohmann::json declared_params = nlohmann::json::array();
  nlohmann::json params = nlohmann::json::object();
  std::string current_recording;
  std::string data_access = "full";
  bool training_api_used = false;
  std::optional<int> held_out_fold;
  std::optional<std::int64_t> last_client_id;
  std::int64_t next_server_id = 1;
  std::size_t reports = 0;

  bool operator==(const Session&) const = default;
};

struct StepResult {
  Session session;
  std::vector<Message> replies;
  /// Set when report_points was evaluated; the caller persists it.
  std::optional<EvaluationReport> report;
  /// Close the connection after the replies are sent.
  bool close = false;
};

/// Error codes carried in `error` payloads.
namespace codes {
inline constexpr const char* kMalformed = "malformed";
inline constexpr const char* kVersionMismatch = "version_mismatch";
inline constexpr const char* kIllegalTransition = "illegal_transition";
inline constexpr const char* kUnknownRecording = "unknown_recording";
inline constexpr const char* kTrainingNotNegotiated = "training_not_negotiated";
inline constexpr const char* kInsufficientData = "insufficient_data";
inline constexpr const char* kValidation = "validation";
}  // namespace codes

/// Pure state machine of the evaluation service.
///
///   AwaitHello --hello--> Idle --request_recording--> Streaming
///     --(last frame sent)--> AwaitReport --report_points--> Done
///
/// declare_params, set_params and request_training are accepted in Idle only
/// (Done counts as Idle, so one connection may evaluate several recordings).
/// Illegal transitions yield an `error` and leave the session unchanged;
/// malformed input and version mismatches also close the connection.
class SessionHandler {
 public:
  SessionHandler(const Dataset& dataset, EvalConfig config,
                 nlohmann::json param_overrides = nlohmann::json::object());

  StepResult handle_message(Session session, const Message& msg) const;
  StepResult handle_line(Session session, std::string_view line) const;

  const Dataset& dataset() const { return *dataset_; }
  const EvalConfig& config() const { return config_; }

 private:
  StepResult on_hello(Session s, const Message& m) const;
  StepResult on_declare_params(Session s, const Message& m) const;
  StepResult on_set_params(Session s, const Message& m) const;
  StepResult on_request_recording(Session s, const Message& m) const;
  StepResult on_request_training(Session s, const Message& m) const;
  StepResult on_report_points(Session s, const Message& m) const;

  const Dataset* dataset_;
  EvalConfig config_;
  nlohmann::json param_overrides_;
};

/// Builds a reply from the session's server-side id counter.
Message make_reply(Session& s, MessageType type, nlohmann::json payload,
                   std::optional<std::int64_t> reply_to);
Message make_error(Session& s, std::string_view code, std::string_view message,
                   std::optional<std::int64_t> reply_to);

}  // namespace segeval::protocol
