#include "segeval/protocol.hpp"

#include <array>
#include <utility>

#include "segeval/io.hpp"
#include "segeval/version.hpp"

namespace segeval::protocol {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<MessageType, std::string_view>, 12> kTypeNames{{
    {MessageType::Hello, "hello"},
    {MessageType::DeclareParams, "declare_params"},
    {MessageType::SetParams, "set_params"},
    {MessageType::RequestRecording, "request_recording"},
    {MessageType::RecordingMeta, "recording_meta"},
    {MessageType::RecordingFrames, "recording_frames"},
    {MessageType::RequestTraining, "request_training"},
    {MessageType::TrainingData, "training_data"},
    {MessageType::ReportPoints, "report_points"},
    {MessageType::EvaluationReport, "evaluation_report"},
    {MessageType::Error, "error"},
    {MessageType::Bye, "bye"},
}};

bool idle_like(SessionState s) { return s == SessionState::Idle || s == SessionState::Done; }

StepResult illegal(Session s, const Message& m) {
  auto err = make_error(s, codes::kIllegalTransition,
                        std::string(to_string(m.type)) + " is not allowed in state " +
                            std::string(to_string(s.state)),
                        m.id);
  return {std::move(s), {std::move(err)}, std::nullopt, false};
}

StepResult fail(Session s, const Message& m, std::string_view code, std::string_view text,
                bool close = false) {
  auto err = make_error(s, code, text, m.id);
  return {std::move(s), {std::move(err)}, std::nullopt, close};
}

json frames_json(const Recording& rec, std::size_t begin, std::size_t end) {
  json frames = json::array();
  for (std::size_t f = begin; f < end; ++f) {
    auto row = rec.frame(f);
    frames.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return frames;
}

json points_json(const GroundTruth& gt) { return to_json(gt).at("points"); }

}  // namespace

std::string_view to_string(MessageType t) {
  for (const auto& [type, name] : kTypeNames) {
    if (type == t) return name;
  }
  return "unknown";
}

std::optional<MessageType> parse_message_type(std::string_view s) {
  for (const auto& [type, name] : kTypeNames) {
    if (name == s) return type;
  }
  return std::nullopt;
}

std::string_view to_string(SessionState s) {
  switch (s) {
    case SessionState::AwaitHello:
      return "await_hello";
    case SessionState::Idle:
      return "idle";
    case SessionState::Streaming:
      return "streaming";
    case SessionState::AwaitReport:
      return "await_report";
    case SessionState::Done:
      return "done";
  }
  return "unknown";
}

std::string encode(const Message& msg) {
  json j{{"type", to_string(msg.type)},
         {"id", msg.id},
         {"protocol_version", msg.protocol_version},
         {"payload", msg.payload}};
  if (msg.reply_to) j["reply_to"] = *msg.reply_to;
  return j.dump() + "\n";
}

Message decode(std::string_view line) {
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ProtocolError(codes::kMalformed, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ProtocolError(codes::kMalformed, "message must be a JSON object");
  if (!j.contains("type") || !j["type"].is_string()) {
    throw ProtocolError(codes::kMalformed, "message needs a string 'type'");
  }
  auto type = parse_message_type(j["type"].get<std::string>());
  if (!type) {
    throw ProtocolError(codes::kMalformed, "unknown message type '" + j["type"].get<std::string>() + "'");
  }
  if (!j.contains("id") || !j["id"].is_number_integer()) {
    throw ProtocolError(codes::kMalformed, "message needs an integer 'id'");
  }
  if (!j.contains("protocol_version") || !j["protocol_version"].is_string()) {
    throw ProtocolError(codes::kMalformed, "message needs a string 'protocol_version'");
  }
  Message m;
  m.type = *type;
  m.id = j["id"].get<std::int64_t>();
  m.protocol_version = j["protocol_version"].get<std::string>();
  if (j.contains("payload")) {
    if (!j["payload"].is_object()) throw ProtocolError(codes::kMalformed, "'payload' must be an object");
    m.payload = j["payload"];
  }
  if (j.contains("reply_to") && !j["reply_to"].is_null()) {
    if (!j["reply_to"].is_number_integer()) {
      throw ProtocolError(codes::kMalformed, "'reply_to' must be an integer");
    }
    m.reply_to = j["reply_to"].get<std::int64_t>();
  }
  return m;
}

Message make_reply(Session& s, MessageType type, json payload,
                   std::optional<std::int64_t> reply_to) {
  Message m;
  m.type = type;
  m.id = s.next_server_id++;
  m.payload = std::move(payload);
  m.reply_to = reply_to;
  return m;
}

Message make_error(Session& s, std::string_view code, std::string_view message,
                   std::optional<std::int64_t> reply_to) {
  return make_reply(s, MessageType::Error, json{{"code", code}, {"message", message}}, reply_to);
}

SessionHandler::SessionHandler(const Dataset& dataset, EvalConfig config, json param_overrides)
    : dataset_(&dataset), config_(config), param_overrides_(std::move(param_overrides)) {
  config_.validate();
}

StepResult SessionHandler::handle_line(Session session, std::string_view line) const {
  Message msg;
  try {
    msg = decode(line);
  } catch (const ProtocolError& e) {
    auto err = make_error(session, e.code(), e.what(), std::nullopt);
    return {std::move(session), {std::move(err)}, std::nullopt, true};
  }
  return handle_message(std::move(session), msg);
}

StepResult SessionHandler::handle_message(Session s, const Message& m) const {
  if (m.protocol_version != kProtocolVersion) {
    return fail(std::move(s), m, codes::kVersionMismatch,
                "server speaks protocol version " + std::string(kProtocolVersion) +
                    ", client sent " + m.protocol_version,
                true);
  }
  if (s.last_client_id && m.id <= *s.last_client_id) {
    return fail(std::move(s), m, codes::kMalformed,
                "message ids must increase (got " + std::to_string(m.id) + " after " +
                    std::to_string(*s.last_client_id) + ")",
                true);
  }
  s.last_client_id = m.id;

  if (m.type == MessageType::Bye) {
    auto reply = make_reply(s, MessageType::Bye, json::object(), m.id);
    return {std::move(s), {std::move(reply)}, std::nullopt, true};
  }
  if (s.state == SessionState::AwaitHello) {
    return m.type == MessageType::Hello ? on_hello(std::move(s), m) : illegal(std::move(s), m);
  }
  switch (m.type) {
    case MessageType::DeclareParams:
      return idle_like(s.state) ? on_declare_params(std::move(s), m) : illegal(std::move(s), m);
    case MessageType::SetParams:
      return idle_like(s.state) ? on_set_params(std::move(s), m) : illegal(std::move(s), m);
    case MessageType::RequestRecording:
      return idle_like(s.state) ? on_request_recording(std::move(s), m)
                                : illegal(std::move(s), m);
    case MessageType::RequestTraining:
      return idle_like(s.state) ? on_request_training(std::move(s), m)
                                : illegal(std::move(s), m);
    case MessageType::ReportPoints:
      return s.state == SessionState::AwaitReport ? on_report_points(std::move(s), m)
                                                  : illegal(std::move(s), m);
    default:
      return illegal(std::move(s), m);
  }
}

StepResult SessionHandler::on_hello(Session s, const Message& m) const {
  const auto& p = m.payload;
  s.client = p.value("client", std::string("anonymous"));
  s.algorithm = p.value("algorithm", s.client);
  if (p.contains("learning_capable") && !p["learning_capable"].is_boolean()) {
    return fail(std::move(s), m, codes::kValidation, "learning_capable must be a boolean");
  }
  s.learning_capable = p.value("learning_capable", false);
  s.state = SessionState::Idle;

  json listing = json::array();
  for (const auto& e : dataset_->entries) {
    listing.push_back({{"name", e.recording.name()},
                       {"frames", e.recording.frame_count()},
                       {"channels", e.recording.channels()},
                       {"frame_rate_hz", e.recording.frame_rate_hz()}});
  }
  json payload{{"server", "segeval"},
               {"toolkit_version", kToolkitVersion},
               {"session", s.session_id},
               {"learning_capable", s.learning_capable},
               {"dataset", {{"name", dataset_->name}, {"version", dataset_->version}}},
               {"recordings", std::move(listing)},
               {"config", to_json(config_)}};
  auto reply = make_reply(s, MessageType::Hello, std::move(payload), m.id);
  return {std::move(s), {std::move(reply)}, std::nullopt, false};
}

StepResult SessionHandler::on_declare_params(Session s, const Message& m) const {
  const auto& declared = m.payload.contains("params") ? m.payload["params"] : json();
  if (!declared.is_array()) {
    return fail(std::move(s), m, codes::kValidation, "declare_params needs a 'params' array");
  }
  json values = json::object();
  for (const auto& d : declared) {
    if (!d.is_object() || !d.contains("name") || !d["name"].is_string() || !d.contains("default")) {
      return fail(std::move(s), m, codes::kValidation,
                  "every declared parameter needs 'name' and 'default'");
    }
    const auto name = d["name"].get<std::string>();
    json value = param_overrides_.contains(name) ? param_overrides_[name] : d["default"];
    if (value.is_number()) {
      if (d.contains("min") && d["min"].is_number() && value.get<double>() < d["min"].get<double>()) {
        return fail(std::move(s), m, codes::kValidation, "parameter '" + name + "' below its minimum");
      }
      if (d.contains("max") && d["max"].is_number() && value.get<double>() > d["max"].get<double>()) {
        return fail(std::move(s), m, codes::kValidation, "parameter '" + name + "' above its maximum");
      }
    }
    values[name] = std::move(value);
  }
  s.declared_params = declared;
  s.params = values;
  auto reply = make_reply(s, MessageType::SetParams, json{{"values", std::move(values)}}, m.id);
  return {std::move(s), {std::move(reply)}, std::nullopt, false};
}

StepResult SessionHandler::on_set_params(Session s, const Message& m) const {
  if (!m.payload.contains("values") || !m.payload["values"].is_object()) {
    return fail(std::move(s), m, codes::kValidation, "set_params needs a 'values' object");
  }
  for (const auto& [key, value] : m.payload["values"].items()) s.params[key] = value;
  auto reply = make_reply(s, MessageType::SetParams, json{{"values", s.params}}, m.id);
  return {std::move(s), {std::move(reply)}, std::nullopt, false};
}

StepResult SessionHandler::on_request_recording(Session s, const Message& m) const {
  const auto name = m.payload.value("recording", std::string());
  const auto mode = m.payload.value("mode", std::string("full"));
  if (mode != "full" && mode != "frame_by_frame") {
    return fail(std::move(s), m, codes::kValidation, "mode must be 'full' or 'frame_by_frame'");
  }
  const auto* entry = dataset_->find(name);
  if (!entry) {
    return fail(std::move(s), m, codes::kUnknownRecording, "no recording named '" + name + "'");
  }
  const auto& rec = entry->recording;
  s.current_recording = name;
  s.data_access = mode;
  s.state = SessionState::Streaming;

  StepResult out;
  out.replies.push_back(make_reply(s, MessageType::RecordingMeta,
                                   json{{"recording", name},
                                        {"frame_rate_hz", rec.frame_rate_hz()},
                                        {"channels", rec.channels()},
                                        {"frames", rec.frame_count()},
                                        {"mode", mode}},
                                   m.id));
  if (mode == "full") {
    out.replies.push_back(make_reply(
        s, MessageType::RecordingFrames,
        json{{"recording", name}, {"start", 0}, {"frames", frames_json(rec, 0, rec.frame_count())}},
        m.id));
  } else {
    for (std::size_t f = 0; f < rec.frame_count(); ++f) {
      out.replies.push_back(make_reply(
          s, MessageType::RecordingFrames,
          json{{"recording", name}, {"start", f}, {"frames", frames_json(rec, f, f + 1)}}, m.id));
    }
  }
  // Every frame is queued: the stream is complete.
  s.state = SessionState::AwaitReport;
  out.session = std::move(s);
  return out;
}

StepResult SessionHandler::on_request_training(Session s, const Message& m) const {
  if (!s.learning_capable) {
    return fail(std::move(s), m, codes::kTrainingNotNegotiated,
                "training not negotiated: declare learning_capable in hello");
  }
  const int held_out = m.payload.value("fold", 0);
  if (held_out < 0 || held_out >= FoldAssignment::kFolds) {
    return fail(std::move(s), m, codes::kValidation, "fold must lie in 0..4");
  }
  std::optional<FoldAssignment> folds;
  try {
    folds = make_folds(dataset_->names());
  } catch (const InsufficientDataError& e) {
    return fail(std::move(s), m, codes::kInsufficientData, e.what());
  }

  json recordings = json::array();
  for (const auto& e : dataset_->entries) {
    const int fold = folds->fold_of(e.recording.name());
    json r = to_json(e.recording);
    r["fold"] = fold;
    r["role"] = fold == held_out ? "held_out" : "train";
    r["ground_truth"] = fold == held_out ? json(nullptr) : points_json(e.ground_truth);
    recordings.push_back(std::move(r));
  }
  s.training_api_used = true;
  s.held_out_fold = held_out;
  auto reply = make_reply(
      s, MessageType::TrainingData,
      json{{"fold", held_out}, {"folds", FoldAssignment::kFolds}, {"recordings", std::move(recordings)}},
      m.id);
  return {std::move(s), {std::move(reply)}, std::nullopt, false};
}

StepResult SessionHandler::on_report_points(Session s, const Message& m) const {
  if (m.payload.contains("recording") && m.payload["recording"] != s.current_recording) {
    return fail(std::move(s), m, codes::kValidation,
                "report names a recording other than '" + s.current_recording + "'");
  }
  if (!m.payload.contains("points") || !m.payload["points"].is_array()) {
    return fail(std::move(s), m, codes::kValidation, "report_points needs a 'points' array");
  }
  const auto* entry = dataset_->find(s.current_recording);
  std::optional<EvaluationReport> report;
  try {
    SegmentationResult seg(s.current_recording, m.payload["points"].get<std::vector<double>>());
    Provenance prov;
    prov.toolkit_version = kToolkitVersion;
    prov.dataset_version = dataset_->version;
    prov.algorithm = s.algorithm;
    prov.algorithm_params = s.params;
    prov.data_access = s.data_access;
    prov.training_api_used = s.training_api_used;
    prov.trained = s.training_api_used;
    if (s.held_out_fold) prov.fold = make_folds(dataset_->names()).fold_of(s.current_recording);
    report = evaluate_recording(entry->recording, entry->ground_truth, seg, config_, std::move(prov));
  } catch (const json::exception& e) {
    return fail(std::move(s), m, codes::kValidation, std::string("points: ") + e.what());
  } catch (const Error& e) {
    return fail(std::move(s), m, codes::kValidation, e.what());
  }
  ++s.reports;
  s.state = SessionState::Done;
  auto reply = make_reply(s, MessageType::EvaluationReport, json{{"report", to_json(*report)}}, m.id);
  return {std::move(s), {std::move(reply)}, std::move(report), false};
}

}  // namespace segeval::protocol
