#include "segeval/server.hpp"

#include <atomic>
#include <charconv>
#include <mutex>
#include <set>
#include <thread>
#include <vector>

#include <boost/asio.hpp>

#include "segeval/errors.hpp"
#include "segeval/io.hpp"
#include "segeval/protocol.hpp"

namespace segeval {

namespace asio = boost::asio;
using asio::ip::tcp;
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kMaxLineBytes = 64u << 20;

class Connection;

}  // namespace

struct Server::Impl {
  Impl(Dataset ds, EvalConfig cfg, ServerOptions opts)
      : dataset(std::move(ds)),
        options(std::move(opts)),
        handler(dataset, cfg, options.param_overrides),
        acceptor(io) {}

  void accept();
  void persist(protocol::StepResult& step, std::uint64_t session_id);

  Dataset dataset;
  ServerOptions options;
  protocol::SessionHandler handler;
  asio::io_context io;
  tcp::acceptor acceptor;
  std::vector<std::thread> workers;
  std::atomic<std::uint64_t> next_session{1};
  std::mutex connections_mutex;
  std::set<std::shared_ptr<Connection>> connections;
  bool running = false;
};

namespace {

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, Server::Impl& server, std::uint64_t id)
      : socket_(std::move(socket)), server_(server), buffer_(kMaxLineBytes) {
    session_.session_id = id;
  }

  void start() { read(); }

  /// Safe to call from any thread.
  void close() {
    asio::post(socket_.get_executor(), [self = shared_from_this()] { self->close_now(); });
  }

 private:
  void read() {
    asio::async_read_until(socket_, buffer_, '\n',
                           [self = shared_from_this()](boost::system::error_code ec, std::size_t n) {
                             self->on_line(ec, n);
                           });
  }

  void on_line(boost::system::error_code ec, std::size_t n) {
    if (ec) {
      finish();
      return;
    }
    std::string line(asio::buffers_begin(buffer_.data()),
                     asio::buffers_begin(buffer_.data()) + static_cast<std::ptrdiff_t>(n));
    buffer_.consume(n);
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) {
      read();
      return;
    }

    auto step = server_.handler.handle_line(session_, line);
    if (step.report) server_.persist(step, session_.session_id);
    session_ = std::move(step.session);
    close_after_write_ = step.close;

    outgoing_.clear();
    for (const auto& m : step.replies) outgoing_ += protocol::encode(m);
    asio::async_write(socket_, asio::buffer(outgoing_),
                      [self = shared_from_this()](boost::system::error_code wec, std::size_t) {
                        if (wec || self->close_after_write_) {
                          self->close_now();
                          self->finish();
                        } else {
                          self->read();
                        }
                      });
  }

  void close_now() {
    boost::system::error_code ignored;
    socket_.shutdown(tcp::socket::shutdown_both, ignored);
    socket_.close(ignored);
  }

  void finish() {
    std::lock_guard lock(server_.connections_mutex);
    server_.connections.erase(shared_from_this());
  }

  tcp::socket socket_;
  Server::Impl& server_;
  asio::streambuf buffer_;
  protocol::Session session_;
  std::string outgoing_;
  bool close_after_write_ = false;
};

}  // namespace

void Server::Impl::accept() {
  acceptor.async_accept(asio::make_strand(io), [this](boost::system::error_code ec,
                                                       tcp::socket socket) {
    if (ec) return;  // acceptor closed
    auto conn = std::make_shared<Connection>(std::move(socket), *this, next_session++);
    {
      std::lock_guard lock(connections_mutex);
      connections.insert(conn);
    }
    conn->start();
    accept();
  });
}

void Server::Impl::persist(protocol::StepResult& step, std::uint64_t session_id) {
  auto& report = *step.report;
  report.generated_at = utc_timestamp();
  const auto file = options.report_dir / (report.recording_name + ".s" + std::to_string(session_id) +
                                          ".r" + std::to_string(step.session.reports) + ".json");
  const auto j = to_json(report);
  write_text_file(file, j.dump(2) + "\n");
  // Echo the persisted form to the client.
  for (auto& m : step.replies) {
    if (m.type == protocol::MessageType::EvaluationReport) {
      m.payload["report"] = j;
      m.payload["report_file"] = file.filename().string();
    }
  }
}

Server::Server(Dataset dataset, EvalConfig config, ServerOptions options)
    : impl_(std::make_unique<Impl>(std::move(dataset), config, std::move(options))) {}

Server::~Server() { stop(); }

void Server::start() {
  if (impl_->running) return;
  try {
    const auto address = asio::ip::make_address(impl_->options.host);
    const tcp::endpoint endpoint(address, impl_->options.port);
    impl_->acceptor.open(endpoint.protocol());
    impl_->acceptor.set_option(tcp::acceptor::reuse_address(true));
    impl_->acceptor.bind(endpoint);
    impl_->acceptor.listen();
  } catch (const boost::system::system_error& e) {
    throw Error("cannot bind " + impl_->options.host + ":" + std::to_string(impl_->options.port) +
                ": " + e.what());
  }
  fs::create_directories(impl_->options.report_dir);
  impl_->running = true;
  impl_->accept();
  const std::size_t n = std::max<std::size_t>(1, impl_->options.threads);
  for (std::size_t i = 0; i < n; ++i) impl_->workers.emplace_back([this] { impl_->io.run(); });
}

std::uint16_t Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::stop() {
  if (!impl_ || !impl_->running) return;
  asio::post(impl_->io, [this] {
    boost::system::error_code ignored;
    impl_->acceptor.close(ignored);
    std::lock_guard lock(impl_->connections_mutex);
    for (const auto& c : impl_->connections) c->close();
  });
  // run() returns once the aborted operations have drained.
  for (auto& w : impl_->workers) w.join();
  impl_->workers.clear();
  std::lock_guard lock(impl_->connections_mutex);
  impl_->connections.clear();
  impl_->running = false;
}

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
    throw ConfigError("expected host:port, got '" + text + "'");
  }
  unsigned port = 0;
  const char* first = text.data() + colon + 1;
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, port);
  if (ec != std::errc() || ptr != last || port > 65535) {
    throw ConfigError("invalid port in '" + text + "'");
  }
  return {text.substr(0, colon), static_cast<std::uint16_t>(port)};
}

}  // namespace segeval
