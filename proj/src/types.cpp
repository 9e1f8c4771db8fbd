#include "segeval/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "segeval/errors.hpp"

namespace segeval {

std::string_view to_string(Granularity g) {
  switch (g) {
    case Granularity::Rough:
      return "rough";
    case Granularity::Medium:
      return "medium";
    case Granularity::Fine:
      return "fine";
  }
  return "unknown";
}

Granularity parse_granularity(std::string_view s) {
  if (s == "rough") return Granularity::Rough;
  if (s == "medium") return Granularity::Medium;
  if (s == "fine") return Granularity::Fine;
  throw ParseError("unknown granularity '" + std::string(s) + "'");
}

Recording::Recording(std::string name, double frame_rate_hz, std::vector<std::string> channels,
                     std::vector<double> samples)
    : name_(std::move(name)),
      frame_rate_hz_(frame_rate_hz),
      channels_(std::move(channels)),
      samples_(std::move(samples)) {
  if (!(frame_rate_hz_ > 0) || !std::isfinite(frame_rate_hz_)) {
    throw DomainError("recording '" + name_ + "': frame_rate_hz must be positive");
  }
  if (channels_.empty()) {
    throw DimensionError("recording '" + name_ + "' declares no channels");
  }
  if (samples_.size() % channels_.size() != 0) {
    throw DimensionError("recording '" + name_ + "': sample count is not a multiple of " +
                         std::to_string(channels_.size()) + " channels");
  }
  if (samples_.empty()) {
    throw DimensionError("recording '" + name_ + "' has no frames");
  }
}

Recording Recording::from_rows(std::string name, double frame_rate_hz,
                               std::vector<std::string> channels,
                               const std::vector<std::vector<double>>& rows) {
  std::vector<double> samples;
  samples.reserve(rows.size() * channels.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != channels.size()) {
      throw DimensionError("recording '" + name + "': frame " + std::to_string(i) + " has " +
                           std::to_string(rows[i].size()) + " values, expected " +
                           std::to_string(channels.size()));
    }
    samples.insert(samples.end(), rows[i].begin(), rows[i].end());
  }
  return Recording(std::move(name), frame_rate_hz, std::move(channels), std::move(samples));
}

std::span<const double> Recording::frame(std::size_t index) const {
  if (index >= frame_count()) {
    throw DomainError("frame index " + std::to_string(index) + " out of range");
  }
  return std::span<const double>(samples_).subspan(index * channels_.size(), channels_.size());
}

GroundTruth::GroundTruth(std::string recording_name, std::vector<LabelledPoint> points)
    : recording_name_(std::move(recording_name)), points_(std::move(points)) {
  std::stable_sort(points_.begin(), points_.end(),
                   [](const LabelledPoint& a, const LabelledPoint& b) { return a.frame < b.frame; });
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i].frame) || points_[i].frame < 0) {
      throw DomainError("ground truth '" + recording_name_ + "': invalid point " +
                        std::to_string(points_[i].frame));
    }
    if (i > 0 && points_[i].frame - points_[i - 1].frame < kMergeTolerance) {
      throw DomainError("ground truth '" + recording_name_ + "': duplicate point at frame " +
                        std::to_string(points_[i].frame));
    }
  }
}

std::vector<double> GroundTruth::times() const {
  std::vector<double> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(p.frame);
  return out;
}

void GroundTruth::check_range(std::int64_t f_max) const {
  check_points_in_range(times(), f_max, "ground truth '" + recording_name_ + "'");
}

SegmentationResult::SegmentationResult(std::string recording_name, std::vector<double> points)
    : recording_name_(std::move(recording_name)), points_(canonicalize_points(std::move(points))) {
  for (double p : points_) {
    if (!std::isfinite(p)) {
      throw DomainError("segmentation '" + recording_name_ + "' contains a non-finite point");
    }
  }
}

double time_ms_to_frames(double t_ms, double frame_rate_hz) {
  if (!(frame_rate_hz > 0)) throw DomainError("frame_rate_hz must be positive");
  return t_ms * frame_rate_hz / 1000.0;
}

double frames_to_ms(double frames, double frame_rate_hz) {
  if (!(frame_rate_hz > 0)) throw DomainError("frame_rate_hz must be positive");
  return frames * 1000.0 / frame_rate_hz;
}

std::vector<double> canonicalize_points(std::vector<double> points) {
  std::sort(points.begin(), points.end());
  std::vector<double> out;
  out.reserve(points.size());
  std::size_t i = 0;
  while (i < points.size()) {
    std::size_t j = i + 1;
    double sum = points[i];
    while (j < points.size() && points[j] - points[j - 1] < kMergeTolerance) {
      sum += points[j];
      ++j;
    }
    out.push_back(j - i == 1 ? points[i] : sum / static_cast<double>(j - i));
    i = j;
  }
  return out;
}

void check_points_in_range(std::span<const double> points, std::int64_t f_max,
                           std::string_view what) {
  const auto upper = static_cast<double>(f_max);
  for (double p : points) {
    if (!(p >= 0 && p <= upper)) {
      throw DomainError(std::string(what) + ": point " + std::to_string(p) +
                        " outside [0, " + std::to_string(f_max) + "]");
    }
  }
}

}  // namespace segeval
