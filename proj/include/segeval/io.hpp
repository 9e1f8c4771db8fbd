#pragma once

#include <filesystem>
#include <string_view>

#include <nlohmann/json.hpp>

#include "segeval/types.hpp"

namespace segeval {

enum class RecordingFormat { Json, Csv };

RecordingFormat parse_recording_format(std::string_view s);

/// Infers the format from the extension (".csv" or anything else as JSON).
RecordingFormat format_from_path(const std::filesystem::path& path);

/// Loads a recording. For CSV the frame rate comes from the sidecar
/// `<name>.meta.json` next to `<name>.csv`, and the name is the file stem.
Recording load_recording(const std::filesystem::path& path, RecordingFormat format);
void write_recording(const std::filesystem::path& path, const Recording& rec,
                     RecordingFormat format);

nlohmann::json to_json(const Recording& rec);
Recording recording_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GroundTruth& gt);
GroundTruth ground_truth_from_json(const nlohmann::json& j);
GroundTruth load_ground_truth(const std::filesystem::path& path);
void write_ground_truth(const std::filesystem::path& path, const GroundTruth& gt);

nlohmann::json to_json(const SegmentationResult& seg);
SegmentationResult segmentation_from_json(const nlohmann::json& j);
SegmentationResult load_segmentation(const std::filesystem::path& path);
void write_segmentation(const std::filesystem::path& path, const SegmentationResult& seg);

/// Reads and parses a JSON file, mapping failures to ParseError.
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

}  // namespace segeval

namespace segeval {

/// Current UTC time as ISO 8601 ("2024-01-31T12:00:00Z").
std::string utc_timestamp();

}  // namespace segeval
