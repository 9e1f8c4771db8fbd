#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "segeval/dataset.hpp"
#include "segeval/types.hpp"

namespace segeval {

/// One of the seven toy scenarios on a 100-frame recording with ground truth
/// {20, 50, 80}.
struct ScenarioSpec {
  char id;
  std::vector<double> gt_points;
  std::vector<double> alg_points;
  std::int64_t f_max;
  /// True where the exact point placement had to be reconstructed (c to f).
  bool reconstructed;
};

std::vector<ScenarioSpec> make_scenarios();

struct ScenarioScores {
  char id;
  double f1_conventional;
  double f1_margin;
  double f1_ink;
  bool reconstructed;
};

/// F1 under the three approaches for every scenario. Defaults: margin 5
/// frames, sigma 1.67 frames.
std::vector<ScenarioScores> score_scenarios(double margin_frames = 5.0,
                                            double sigma_frames = 1.67);

/// One activity of a synthetic recording.
///
/// Periodic kinds (anything but "still" and "ramp") repeat a raised-cosine
/// excursion `repetitions` times: velocity is zero at every repetition
/// boundary and at every half-repetition extremum. "still" holds the pose,
/// "ramp" moves linearly by `amplitudes`.
struct Activity {
  std::string kind;
  int frames = 0;
  int repetitions = 1;
  std::vector<double> amplitudes;
};

struct SynthSpec {
  std::string name = "synthetic";
  std::uint64_t seed = 0;
  double frame_rate_hz = 100.0;
  double noise_std = 0.0;
  std::vector<Activity> activities;

  void validate() const;
};

struct SyntheticRecording {
  Recording recording;
  GroundTruth ground_truth;
};

/// Rough points at activity boundaries, Medium points between repetitions,
/// Fine points at half-repetition extrema. Deterministic per seed.
SyntheticRecording make_recording(const SynthSpec& spec);

SynthSpec synth_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SynthSpec& spec);

/// A generate file: `{"name", "version", "seed", "frame_rate_hz", "noise_std",
/// "recordings": [{"name", "seed"?, "activities": [...]}]}`. Per-recording
/// values override the top-level defaults.
Dataset make_dataset(const nlohmann::json& generate_spec);

/// Reproducible mixed-activity dataset for demos and tests.
Dataset make_demo_dataset(std::size_t recordings, std::uint64_t seed, double noise_std = 0.002);

}  // namespace segeval
