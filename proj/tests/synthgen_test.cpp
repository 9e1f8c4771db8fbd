#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "segeval/errors.hpp"
#include "segeval/io.hpp"
#include "segeval/pipeline.hpp"
#include "segeval/synthgen.hpp"

namespace segeval {
namespace {

using V = std::vector<double>;

SynthSpec jump_then_walk(std::uint64_t seed = 1, double noise = 0.0) {
  SynthSpec spec;
  spec.name = "jw";
  spec.seed = seed;
  spec.noise_std = noise;
  spec.activities = {{"jump", 100, 1, {0.5, 0.2}}, {"walk", 300, 3, {0.3, -0.4}}};
  return spec;
}

V times_with(const GroundTruth& gt, Granularity g) {
  V out;
  for (const auto& p : gt.points())
    if (p.granularity == g) out.push_back(p.frame);
  return out;
}

TEST(Scenarios, Geometry) {
  const auto sc = make_scenarios();
  ASSERT_EQ(sc.size(), 7u);
  for (const auto& s : sc) {
    EXPECT_EQ(s.gt_points, (V{20, 50, 80}));
    EXPECT_EQ(s.f_max, 100);
    for (double p : s.alg_points) {
      EXPECT_GE(p, 0);
      EXPECT_LE(p, 100);
    }
  }
  EXPECT_EQ(sc[0].id, 'a');
  EXPECT_EQ(sc[0].alg_points, (V{20, 50, 80}));
  EXPECT_EQ(sc[1].alg_points, (V{21, 51, 81}));
  EXPECT_FALSE(sc[0].reconstructed);
  EXPECT_FALSE(sc[1].reconstructed);
  EXPECT_FALSE(sc[6].reconstructed);
  for (int i = 2; i <= 5; ++i) EXPECT_TRUE(sc[i].reconstructed);
  // Scenario g: every point is farther than the margin and 5 sigma from its partner.
  for (double a : sc[6].alg_points) {
    double nearest = 1e9;
    for (double g : sc[6].gt_points) nearest = std::min(nearest, std::abs(a - g));
    EXPECT_GT(nearest, 5 * 1.67);
  }
}

TEST(Scenarios, Scores) {
  const auto scores = score_scenarios();
  EXPECT_EQ(scores[0].f1_conventional, 1);
  EXPECT_EQ(scores[0].f1_margin, 1);
  EXPECT_NEAR(scores[0].f1_ink, 1, 1e-6);
  EXPECT_EQ(scores[1].f1_conventional, 0);
  EXPECT_EQ(scores[1].f1_margin, 1);
  EXPECT_NEAR(scores[1].f1_ink, 0.76, 0.01);
  EXPECT_EQ(scores[2].f1_margin, 6.0 / 7.0);
  EXPECT_EQ(scores[6].f1_conventional, 0);
  EXPECT_EQ(scores[6].f1_margin, 0);
  EXPECT_NEAR(scores[6].f1_ink, 0, 0.005);
}

TEST(MakeRecording, JumpThenWalkLabels) {
  const auto out = make_recording(jump_then_walk());
  EXPECT_EQ(out.recording.f_max(), 400);
  EXPECT_EQ(out.recording.channel_count(), 2u);
  EXPECT_EQ(times_with(out.ground_truth, Granularity::Rough), V{100});
  EXPECT_EQ(times_with(out.ground_truth, Granularity::Medium), (V{200, 300}));
  EXPECT_EQ(times_with(out.ground_truth, Granularity::Fine), (V{50, 150, 250, 350}));
  EXPECT_NO_THROW(out.ground_truth.check_range(out.recording.f_max()));
}

TEST(MakeRecording, CascadeInclusionHolds) {
  const auto ds = make_demo_dataset(5, 3);
  for (const auto& e : ds.entries) {
    const auto c = cascade(e.ground_truth);
    EXPECT_TRUE(std::includes(c.fine.begin(), c.fine.end(), c.medium.begin(), c.medium.end()));
    EXPECT_TRUE(std::includes(c.medium.begin(), c.medium.end(), c.rough.begin(), c.rough.end()));
    EXPECT_FALSE(c.rough.empty());
  }
}

TEST(MakeRecording, DeterministicPerSeed) {
  const auto a = make_recording(jump_then_walk(7, 0.01));
  const auto b = make_recording(jump_then_walk(7, 0.01));
  EXPECT_EQ(to_json(a.recording).dump(), to_json(b.recording).dump());
  EXPECT_EQ(a.ground_truth, b.ground_truth);
  const auto c = make_recording(jump_then_walk(8, 0.01));
  EXPECT_NE(a.recording, c.recording);
}

TEST(MakeRecording, VelocityVanishesAtRepetitionBoundaries) {
  const auto out = make_recording(jump_then_walk());
  const auto& r = out.recording;
  for (double t : times_with(out.ground_truth, Granularity::Medium)) {
    const auto i = static_cast<std::size_t>(t);
    for (std::size_t c = 0; c < r.channel_count(); ++c)
      EXPECT_NEAR(r.at(i + 1, c) - r.at(i - 1, c), 0, 1e-3);
  }
}

TEST(MakeRecording, RejectsInvalidSpecs) {
  auto spec = jump_then_walk();
  spec.activities[1].amplitudes = {1.0};
  EXPECT_THROW(make_recording(spec), ConfigError);
  spec = jump_then_walk();
  spec.activities[0].kind = "fly";
  EXPECT_THROW(make_recording(spec), ConfigError);
  spec = jump_then_walk();
  spec.activities.clear();
  EXPECT_THROW(make_recording(spec), ConfigError);
  spec = jump_then_walk();
  spec.frame_rate_hz = 0;
  EXPECT_THROW(make_recording(spec), Error);
}

TEST(MakeDataset, FromGenerateSpec) {
  const nlohmann::json spec = {
      {"name", "gen"},
      {"version", "v2"},
      {"seed", 5},
      {"noise_std", 0.001},
      {"recordings",
       {{{"name", "one"},
         {"activities", {{{"kind", "still"}, {"frames", 50}, {"amplitudes", {0.0}}},
                         {{"kind", "wave"}, {"frames", 100}, {"repetitions", 2},
                          {"amplitudes", {1.0}}}}}},
        {{"name", "two"},
         {"seed", 99},
         {"activities", {{{"kind", "squat"}, {"frames", 120}, {"repetitions", 3},
                          {"amplitudes", {0.4}}}}}}}}};
  const auto ds = make_dataset(spec);
  EXPECT_EQ(ds.name, "gen");
  EXPECT_EQ(ds.version, "v2");
  EXPECT_EQ(ds.names(), (std::vector<std::string>{"one", "two"}));
  EXPECT_EQ(ds.find("one")->recording.f_max(), 150);
  EXPECT_EQ(make_dataset(spec).entries[1].recording, ds.entries[1].recording);
  const auto round = synth_spec_from_json(to_json(jump_then_walk(3, 0.5)));
  EXPECT_EQ(round.seed, 3u);
  EXPECT_EQ(round.activities.size(), 2u);
}

}  // namespace
}  // namespace segeval
