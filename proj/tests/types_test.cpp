#include <random>

#include <gtest/gtest.h>

#include "segeval/errors.hpp"
#include "segeval/io.hpp"
#include "segeval/types.hpp"
#include "test_util.hpp"

namespace segeval {
namespace {

TEST(TimeConversion, MarginAndSigmaAtHundredHertz) {
  EXPECT_DOUBLE_EQ(time_ms_to_frames(200, 100), 20.0);
  EXPECT_NEAR(time_ms_to_frames(66.67, 100), 6.667, 1e-12);
  EXPECT_EQ(time_ms_to_frames(0, 100), 0.0);
  EXPECT_EQ(time_ms_to_frames(0, 7.5), 0.0);
}

TEST(TimeConversion, RejectsNonPositiveRate) {
  EXPECT_THROW(time_ms_to_frames(10, 0), DomainError);
  EXPECT_THROW(time_ms_to_frames(10, -5), DomainError);
  EXPECT_THROW(frames_to_ms(10, 0), DomainError);
}

TEST(TimeConversion, RoundTripsFramesThroughMilliseconds) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> value(0.0, 1e5);
  std::uniform_real_distribution<double> rate(1.0, 1000.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = value(rng);
    const double r = rate(rng);
    EXPECT_NEAR(time_ms_to_frames(frames_to_ms(x, r), r), x, 1e-12 * std::max(1.0, x));
  }
}

TEST(Canonicalize, SortsAndMerges) {
  EXPECT_EQ(canonicalize_points({3, 1, 2}), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(canonicalize_points({5, 5}), (std::vector<double>{5}));
  EXPECT_TRUE(canonicalize_points({}).empty());
}

TEST(Canonicalize, MergesNearDuplicatesToTheirMean) {
  const auto out = canonicalize_points({10.0, 10.0 + 4e-10, 20.0});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_NEAR(out[0], 10.0 + 2e-10, 1e-15);
  // Legitimately close points survive.
  EXPECT_EQ(canonicalize_points({1.0, 1.001}).size(), 2u);
}

TEST(Canonicalize, IsIdempotent) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> count(0, 40);
  std::uniform_real_distribution<double> pos(0.0, 50.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> pts;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      pts.push_back(pos(rng));
      if (i % 5 == 0) pts.push_back(pts.back() + 5e-10);  // near duplicate
      if (i % 7 == 0) pts.push_back(pts.back());          // exact duplicate
    }
    const auto once = canonicalize_points(pts);
    EXPECT_EQ(canonicalize_points(once), once);
    EXPECT_TRUE(std::is_sorted(once.begin(), once.end()));
  }
}

TEST(Recording, ValidatesInvariants) {
  EXPECT_THROW(Recording("r", 0.0, {"a"}, {1.0}), DomainError);
  EXPECT_THROW(Recording("r", 100.0, {"a", "b"}, {1.0, 2.0, 3.0}), DimensionError);
  EXPECT_THROW(Recording("r", 100.0, {"a"}, {}), DimensionError);
  EXPECT_THROW(Recording::from_rows("r", 100, {"a", "b"}, {{1, 2}, {3}}), DimensionError);
  const auto rec = Recording::from_rows("r", 100, {"a", "b"}, {{1, 2}, {3, 4}, {5, 6}});
  EXPECT_EQ(rec.f_max(), 3);
  EXPECT_EQ(rec.at(1, 1), 4.0);
}

TEST(GroundTruth, SortsAndRejectsDuplicates) {
  GroundTruth gt("r", {{30, Granularity::Fine}, {10, Granularity::Rough}});
  EXPECT_EQ(gt.times(), (std::vector<double>{10, 30}));
  EXPECT_THROW(GroundTruth("r", {{5, Granularity::Rough}, {5, Granularity::Fine}}), DomainError);
  EXPECT_THROW(GroundTruth("r", {{-1, Granularity::Rough}}), DomainError);
  EXPECT_THROW(gt.check_range(20), DomainError);
  EXPECT_NO_THROW(gt.check_range(30));
}

TEST(Granularity, IsOrdered) {
  EXPECT_LT(Granularity::Rough, Granularity::Medium);
  EXPECT_LT(Granularity::Medium, Granularity::Fine);
  EXPECT_EQ(parse_granularity("medium"), Granularity::Medium);
  EXPECT_THROW(parse_granularity("coarse"), ParseError);
}

class RecordingIo : public ::testing::Test {
 protected:
  test::TempDir dir;
};

TEST_F(RecordingIo, LoadsJson) {
  write_text_file(dir / "r.json",
                  R"({"name":"r","frame_rate_hz":100,"channels":["a","b"],)"
                  R"("frames":[[1,2],[3,4],[5,6]]})");
  const auto rec = load_recording(dir / "r.json", RecordingFormat::Json);
  EXPECT_EQ(rec.name(), "r");
  EXPECT_EQ(rec.f_max(), 3);
  EXPECT_EQ(rec.frame_rate_hz(), 100.0);
}

TEST_F(RecordingIo, LoadsCsvWithSidecar) {
  write_text_file(dir / "walk.csv", "t,q0,q1\n0,1,2\n0.01,3,4\n0.02,5,6\n0.03,7,8\n0.04,9,10\n");
  write_text_file(dir / "walk.meta.json", R"({"frame_rate_hz": 100})");
  const auto rec = load_recording(dir / "walk.csv", RecordingFormat::Csv);
  EXPECT_EQ(rec.channels(), (std::vector<std::string>{"q0", "q1"}));
  EXPECT_EQ(rec.f_max(), 5);
  EXPECT_EQ(rec.name(), "walk");
}

TEST_F(RecordingIo, RejectsRaggedRows) {
  write_text_file(dir / "bad.csv", "t,q0,q1\n0,1,2\n0.01,3\n");
  write_text_file(dir / "bad.meta.json", R"({"frame_rate_hz": 100})");
  EXPECT_THROW(load_recording(dir / "bad.csv", RecordingFormat::Csv), DimensionError);
  write_text_file(dir / "bad.json",
                  R"({"name":"r","frame_rate_hz":100,"channels":["a","b"],"frames":[[1]]})");
  EXPECT_THROW(load_recording(dir / "bad.json", RecordingFormat::Json), DimensionError);
}

TEST_F(RecordingIo, RejectsMalformedInput) {
  write_text_file(dir / "broken.json", "{not json");
  EXPECT_THROW(load_recording(dir / "broken.json", RecordingFormat::Json), ParseError);
  write_text_file(dir / "rate.json",
                  R"({"name":"r","frame_rate_hz":0,"channels":["a"],"frames":[[1]]})");
  EXPECT_THROW(load_recording(dir / "rate.json", RecordingFormat::Json), DomainError);
  write_text_file(dir / "nometa.csv", "t,a\n0,1\n");
  EXPECT_THROW(load_recording(dir / "nometa.csv", RecordingFormat::Csv), ParseError);
  EXPECT_THROW(load_recording(dir / "missing.json", RecordingFormat::Json), ParseError);
}

TEST_F(RecordingIo, RoundTripsBitExactlyInBothFormats) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 1e3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> samples;
    for (int i = 0; i < 3 * 50; ++i) samples.push_back(noise(rng) * std::pow(10.0, trial % 7 - 3));
    const Recording rec("rt" + std::to_string(trial), 120.0 + trial / 3.0, {"x", "y", "z"},
                        samples);
    for (auto fmt : {RecordingFormat::Json, RecordingFormat::Csv}) {
      const auto path = dir / (rec.name() + (fmt == RecordingFormat::Csv ? ".csv" : ".rec.json"));
      write_recording(path, rec, fmt);
      EXPECT_EQ(load_recording(path, fmt), rec);
    }
  }
}

TEST_F(RecordingIo, GroundTruthAndSegmentationRoundTrip) {
  const GroundTruth gt("r", {{10, Granularity::Rough}, {20.5, Granularity::Medium},
                             {30, Granularity::Fine}});
  write_ground_truth(dir / "r.gt.json", gt);
  EXPECT_EQ(load_ground_truth(dir / "r.gt.json"), gt);

  const SegmentationResult seg("r", {30, 10, 10, 20.25});
  EXPECT_EQ(seg.points(), (std::vector<double>{10, 20.25, 30}));
  write_segmentation(dir / "r.seg.json", seg);
  EXPECT_EQ(load_segmentation(dir / "r.seg.json"), seg);
}

TEST_F(RecordingIo, GroundTruthRejectsUnknownGranularity) {
  write_text_file(dir / "g.json", R"({"recording":"r","points":[{"frame":1,"granularity":"x"}]})");
  EXPECT_THROW(load_ground_truth(dir / "g.json"), ParseError);
}

}  // namespace
}  // namespace segeval
