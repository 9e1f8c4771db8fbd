#pragma once

#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "segeval/dataset.hpp"
#include "segeval/types.hpp"

namespace segeval {

/// Zero-velocity-crossing segmenter settings. Velocities are in channel units
/// per second.
struct ZvcParams {
  double noise_floor = 0.2;
  int min_crossing_channels = 1;
  /// Minimum gap in frames between two reported points.
  double refractory = 10.0;

  void validate() const;
};

/// Sum-of-squared-velocities segmenter settings; thresholds in (units/s)^2.
struct SsavParams {
  int window = 41;
  double threshold = 1.0;
  double noise_threshold = 0.05;

  void validate() const;
};

/// Sliding-window PCA segmenter settings.
struct PcaParams {
  int init_window = 100;
  double retained_energy = 0.9;
  double error_ratio_threshold = 5.0;

  void validate() const;
};

/// Per-frame velocities (central differences, one-sided at the ends) scaled to
/// units per second. Row-major, same layout as the recording.
std::vector<double> joint_velocities(const Recording& rec);

/// Sum over channels of squared velocity, one value per frame.
std::vector<double> ssav_series(const Recording& rec);

SegmentationResult zvc_segment(const Recording& rec, const ZvcParams& params);
SegmentationResult ssav_segment(const Recording& rec, const SsavParams& params);
SegmentationResult pca_segment(const Recording& rec, const PcaParams& params);

/// Per-frame squared reconstruction error of `rec` against the principal
/// subspace fitted on frames [fit_begin, fit_begin + window).
std::vector<double> pca_reconstruction_error(const Recording& rec, std::size_t fit_begin,
                                             std::size_t window, double retained_energy);

enum class BaselineKind { Zvc, Ssav, Pca };

std::string_view to_string(BaselineKind k);
/// Throws ConfigError for names other than zvc, ssav, pca.
BaselineKind parse_baseline_kind(std::string_view s);

nlohmann::json to_json(const ZvcParams& p);
nlohmann::json to_json(const SsavParams& p);
nlohmann::json to_json(const PcaParams& p);
ZvcParams zvc_params_from_json(const nlohmann::json& j);
SsavParams ssav_params_from_json(const nlohmann::json& j);
PcaParams pca_params_from_json(const nlohmann::json& j);

/// A configured baseline ready to run, with its fully resolved parameters.
struct Baseline {
  BaselineKind kind;
  nlohmann::json params;
  Segmenter segment;
};

/// Builds a baseline; `overrides` may set any subset of its parameters.
Baseline make_baseline(BaselineKind kind, const nlohmann::json& overrides = nlohmann::json::object());

}  // namespace segeval
