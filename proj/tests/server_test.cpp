#include <filesystem>

#include <gtest/gtest.h>

#include "segeval/client.hpp"
#include "segeval/errors.hpp"
#include "segeval/io.hpp"
#include "segeval/server.hpp"
#include "segeval/synthgen.hpp"
#include "test_util.hpp"

namespace segeval {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::size_t file_count(const fs::path& dir) {
  if (!fs::exists(dir)) return 0;
  return static_cast<std::size_t>(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}));
}

class ServerTest : public ::testing::Test {
 protected:
  ServerTest() : dataset(make_demo_dataset(5, 8)) {
    ServerOptions opts;
    opts.report_dir = dir / "reports";
    server = std::make_unique<Server>(dataset, EvalConfig{}, opts);
    server->start();
  }
  ~ServerTest() override { server->stop(); }

  ProtocolClient connect() { return ProtocolClient("127.0.0.1", server->port()); }

  EvaluationReport offline(const std::string& name, const std::vector<double>& points,
                           const Provenance& prov) {
    const auto* e = dataset.find(name);
    return evaluate_recording(e->recording, e->ground_truth, SegmentationResult(name, points),
                              EvalConfig{}, prov);
  }

  test::TempDir dir;
  Dataset dataset;
  std::unique_ptr<Server> server;
};

TEST_F(ServerTest, RoundTripMatchesOfflineEvaluation) {
  auto client = connect();
  const auto hello = client.hello("scripted");
  EXPECT_EQ(hello["recordings"].size(), 5u);
  const auto rec = client.request_recording("demo02");
  EXPECT_EQ(rec, dataset.find("demo02")->recording);

  const std::vector<double> points{12, 100.5, 180, 333};
  const auto payload = client.report_points("demo02", points);
  auto remote = report_from_json(payload["report"]);
  EXPECT_FALSE(remote.generated_at.empty());
  const auto expected = offline("demo02", points, remote.provenance);
  EXPECT_EQ(remote.cells, expected.cells);
  EXPECT_EQ(remote.psme, expected.psme);
  remote.generated_at.clear();
  EXPECT_EQ(remote, expected);

  const fs::path file = dir / "reports" / payload["report_file"].get<std::string>();
  EXPECT_TRUE(fs::exists(file));
  EXPECT_EQ(read_json_file(file), payload["report"]);
  client.bye();
}

TEST_F(ServerTest, FrameByFrameDeliversEveryFrameInOrder) {
  auto client = connect();
  client.hello("streamer");
  std::vector<std::size_t> seen;
  const auto rec = client.request_recording(
      "demo00", "frame_by_frame", [&](std::size_t i, std::span<const double>) { seen.push_back(i); });
  const auto& truth = dataset.find("demo00")->recording;
  ASSERT_EQ(seen.size(), static_cast<std::size_t>(truth.f_max()));
  for (std::size_t i = 0; i < seen.size(); ++i) EXPECT_EQ(seen[i], i);
  EXPECT_EQ(rec, truth);
  const auto payload = client.report_points("demo00", {});
  EXPECT_EQ(payload["report"]["provenance"]["data_access"], "frame_by_frame");
  client.bye();
}

TEST_F(ServerTest, NoReportWithoutReportPoints) {
  {
    auto client = connect();
    client.hello("quitter");
    client.request_recording("demo01");
    client.bye();
  }
  {
    auto client = connect();
    client.hello("dropper");
    client.request_recording("demo01");
  }  // connection dropped without bye
  EXPECT_EQ(file_count(dir / "reports"), 0u);
}

TEST_F(ServerTest, InterleavedSessionsAreIsolated) {
  auto a = connect();
  auto b = connect();
  const auto ha = a.hello("alpha");
  const auto hb = b.hello("beta");
  EXPECT_NE(ha["session"], hb["session"]);
  a.request_recording("demo00");
  b.request_recording("demo03", "frame_by_frame");
  const auto rb = report_from_json(b.report_points("demo03", {50})["report"]);
  const auto ra = report_from_json(a.report_points("demo00", {60, 70})["report"]);
  EXPECT_EQ(ra.recording_name, "demo00");
  EXPECT_EQ(ra.provenance.algorithm, "alpha");
  EXPECT_EQ(ra.provenance.data_access, "full");
  EXPECT_EQ(rb.recording_name, "demo03");
  EXPECT_EQ(rb.provenance.algorithm, "beta");
  EXPECT_EQ(rb.provenance.data_access, "frame_by_frame");
  EXPECT_EQ(ra.algorithm_points, 2u);
  EXPECT_EQ(rb.algorithm_points, 1u);
  a.bye();
  b.bye();
  EXPECT_EQ(file_count(dir / "reports"), 2u);
}

TEST_F(ServerTest, ErrorsReachTheClient) {
  auto client = connect();
  client.hello("x");
  try {
    client.request_training(0);
    FAIL() << "expected RemoteError";
  } catch (const RemoteError& e) {
    EXPECT_EQ(e.code(), protocol::codes::kTrainingNotNegotiated);
  }
  // The session survives an illegal transition.
  EXPECT_NO_THROW(client.request_recording("demo04"));
}

TEST_F(ServerTest, VersionMismatchClosesConnection) {
  auto client = connect();
  EXPECT_THROW(client.hello("old", false, "0"), RemoteError);
  EXPECT_THROW(client.receive(), Error);
}

TEST_F(ServerTest, MalformedLineClosesConnection) {
  auto client = connect();
  client.send_line("this is not json");
  const auto reply = client.receive();
  EXPECT_EQ(reply.type, protocol::MessageType::Error);
  EXPECT_EQ(reply.payload["code"], protocol::codes::kMalformed);
  EXPECT_THROW(client.receive(), Error);
}

TEST(Endpoint, Parsing) {
  EXPECT_EQ(parse_endpoint("127.0.0.1:7878"), (std::pair<std::string, std::uint16_t>{"127.0.0.1", 7878}));
  EXPECT_THROW(parse_endpoint("localhost"), ConfigError);
  EXPECT_THROW(parse_endpoint("host:99999"), ConfigError);
  EXPECT_THROW(parse_endpoint("host:abc"), ConfigError);
}

}  // namespace
}  // namespace segeval
