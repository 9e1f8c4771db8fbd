#include "segeval/client.hpp"

#include <boost/asio.hpp>

namespace segeval {

namespace asio = boost::asio;
using asio::ip::tcp;
using nlohmann::json;
using protocol::Message;
using protocol::MessageType;

struct ProtocolClient::Impl {
  asio::io_context io;
  tcp::socket socket{io};
  asio::streambuf buffer;
};

ProtocolClient::ProtocolClient(const std::string& host, std::uint16_t port)
    : impl_(std::make_unique<Impl>()) {
  try {
    tcp::resolver resolver(impl_->io);
    asio::connect(impl_->socket, resolver.resolve(host, std::to_string(port)));
  } catch (const boost::system::system_error& e) {
    throw Error("cannot connect to " + host + ":" + std::to_string(port) + ": " + e.what());
  }
}

ProtocolClient::~ProtocolClient() {
  boost::system::error_code ignored;
  impl_->socket.close(ignored);
}

void ProtocolClient::send(MessageType type, json payload) {
  Message m;
  m.type = type;
  m.id = next_id_++;
  m.payload = std::move(payload);
  send_line(protocol::encode(m));
}

void ProtocolClient::send_line(const std::string& line) {
  const std::string framed = line.ends_with('\n') ? line : line + '\n';
  try {
    asio::write(impl_->socket, asio::buffer(framed));
  } catch (const boost::system::system_error& e) {
    throw Error(std::string("send failed: ") + e.what());
  }
}

Message ProtocolClient::receive() {
  boost::system::error_code ec;
  const std::size_t n = asio::read_until(impl_->socket, impl_->buffer, '\n', ec);
  if (ec) throw Error("connection closed: " + ec.message());
  std::string line(asio::buffers_begin(impl_->buffer.data()),
                   asio::buffers_begin(impl_->buffer.data()) + static_cast<std::ptrdiff_t>(n));
  impl_->buffer.consume(n);
  return protocol::decode(line);
}

Message ProtocolClient::expect(MessageType type) {
  auto m = receive();
  if (m.type == MessageType::Error) {
    throw RemoteError(m.payload.value("code", std::string("error")),
                      m.payload.value("message", std::string()));
  }
  if (m.type != type) {
    throw protocol::ProtocolError("unexpected", "expected " + std::string(to_string(type)) +
                                                    ", got " + std::string(to_string(m.type)));
  }
  return m;
}

json ProtocolClient::hello(const std::string& algorithm, bool learning_capable,
                           std::string_view protocol_version) {
  Message m;
  m.type = MessageType::Hello;
  m.id = next_id_++;
  m.protocol_version = std::string(protocol_version);
  m.payload = {{"client", algorithm}, {"algorithm", algorithm}, {"learning_capable", learning_capable}};
  send_line(protocol::encode(m));
  return expect(MessageType::Hello).payload;
}

json ProtocolClient::declare_params(const json& params) {
  send(MessageType::DeclareParams, {{"params", params}});
  return expect(MessageType::SetParams).payload.at("values");
}

Recording ProtocolClient::request_recording(const std::string& name, const std::string& mode,
                                            const FrameCallback& on_frame) {
  send(MessageType::RequestRecording, {{"recording", name}, {"mode", mode}});
  const auto meta = expect(MessageType::RecordingMeta).payload;
  const auto total = meta.at("frames").get<std::size_t>();
  const auto channels = meta.at("channels").get<std::vector<std::string>>();
  std::vector<double> samples;
  samples.reserve(total * channels.size());
  std::size_t received = 0;
  while (received < total) {
    const auto chunk = expect(MessageType::RecordingFrames).payload;
    if (chunk.at("start").get<std::size_t>() != received) {
      throw protocol::ProtocolError("unexpected", "frames arrived out of order");
    }
    for (const auto& row : chunk.at("frames")) {
      auto values = row.get<std::vector<double>>();
      if (on_frame) on_frame(received, values);
      samples.insert(samples.end(), values.begin(), values.end());
      ++received;
    }
  }
  return Recording(name, meta.at("frame_rate_hz").get<double>(), channels, std::move(samples));
}

json ProtocolClient::request_training(int held_out_fold) {
  send(MessageType::RequestTraining, {{"fold", held_out_fold}});
  return expect(MessageType::TrainingData).payload;
}

json ProtocolClient::report_points(const std::string& recording, const std::vector<double>& points) {
  send(MessageType::ReportPoints, {{"recording", recording}, {"points", points}});
  return expect(MessageType::EvaluationReport).payload;
}

void ProtocolClient::bye() {
  send(MessageType::Bye, json::object());
  expect(MessageType::Bye);
}

}  // namespace segeval
