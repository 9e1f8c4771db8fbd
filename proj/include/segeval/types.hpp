#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace segeval {

/// Label level of a ground-truth point. Ordered Rough < Medium < Fine.
enum class Granularity { Rough = 0, Medium = 1, Fine = 2 };

inline constexpr Granularity kGranularities[] = {Granularity::Rough, Granularity::Medium,
                                                 Granularity::Fine};

std::string_view to_string(Granularity g);
Granularity parse_granularity(std::string_view s);

/// Multi-channel trajectory sampled at a fixed frame rate.
///
/// Samples are stored row-major, one row per frame. All invariants are checked
/// on construction; a Recording is immutable afterwards.
class Recording {
 public:
  Recording(std::string name, double frame_rate_hz, std::vector<std::string> channels,
            std::vector<double> samples);

  static Recording from_rows(std::string name, double frame_rate_hz,
                             std::vector<std::string> channels,
                             const std::vector<std::vector<double>>& rows);

  const std::string& name() const { return name_; }
  double frame_rate_hz() const { return frame_rate_hz_; }
  const std::vector<std::string>& channels() const { return channels_; }
  std::size_t frame_count() const { return samples_.size() / channels_.size(); }
  std::size_t channel_count() const { return channels_.size(); }
  std::int64_t f_max() const { return static_cast<std::int64_t>(frame_count()); }

  std::span<const double> frame(std::size_t index) const;
  double at(std::size_t frame_index, std::size_t channel) const {
    return samples_[frame_index * channels_.size() + channel];
  }
  std::span<const double> samples() const { return samples_; }

  bool operator==(const Recording&) const = default;

 private:
  std::string name_;
  double frame_rate_hz_;
  std::vector<std::string> channels_;
  std::vector<double> samples_;
};

struct LabelledPoint {
  double frame;
  Granularity granularity;

  bool operator==(const LabelledPoint&) const = default;
};

/// Hierarchically tagged ground truth of one recording; points sorted and distinct.
class GroundTruth {
 public:
  GroundTruth(std::string recording_name, std::vector<LabelledPoint> points);

  const std::string& recording_name() const { return recording_name_; }
  const std::vector<LabelledPoint>& points() const { return points_; }
  std::vector<double> times() const;

  /// Throws DomainError if any point lies outside [0, f_max].
  void check_range(std::int64_t f_max) const;

  bool operator==(const GroundTruth&) const = default;

 private:
  std::string recording_name_;
  std::vector<LabelledPoint> points_;
};

/// Points reported by an algorithm for one recording, kept canonical.
class SegmentationResult {
 public:
  SegmentationResult(std::string recording_name, std::vector<double> points);

  const std::string& recording_name() const { return recording_name_; }
  const std::vector<double>& points() const { return points_; }

  bool operator==(const SegmentationResult&) const = default;

 private:
  std::string recording_name_;
  std::vector<double> points_;
};

/// Real-valued confusion matrix closed by f_max (tp + tn + fp + fn = f_max).
struct ConfusionCounts {
  double tp = 0;
  double tn = 0;
  double fp = 0;
  double fn = 0;
  std::int64_t f_max = 0;

  double total() const { return tp + tn + fp + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

/// Points closer than this (in frames) are treated as one.
inline constexpr double kMergeTolerance = 1e-9;

double time_ms_to_frames(double t_ms, double frame_rate_hz);
double frames_to_ms(double frames, double frame_rate_hz);

/// Sorts and merges runs of points closer than kMergeTolerance into their mean.
std::vector<double> canonicalize_points(std::vector<double> points);

/// Throws DomainError naming `what` if a point lies outside [0, f_max].
void check_points_in_range(std::span<const double> points, std::int64_t f_max,
                           std::string_view what);

}  // namespace segeval
