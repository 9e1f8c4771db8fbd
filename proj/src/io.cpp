#include "segeval/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "segeval/errors.hpp"

namespace segeval {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double parse_double(std::string_view field, const fs::path& path, std::size_t line) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
    field.remove_suffix(1);
  }
  double value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError(path.string() + ":" + std::to_string(line) + ": bad number '" +
                     std::string(field) + "'");
  }
  return value;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

fs::path csv_sidecar(const fs::path& csv_path) {
  return csv_path.parent_path() / (csv_path.stem().string() + ".meta.json");
}

Recording load_recording_csv(const fs::path& path) {
  const std::string text = read_text_file(path);
  const json meta = read_json_file(csv_sidecar(path));
  if (!meta.contains("frame_rate_hz") || !meta["frame_rate_hz"].is_number()) {
    throw ParseError(csv_sidecar(path).string() + ": missing numeric frame_rate_hz");
  }
  const double rate = meta["frame_rate_hz"].get<double>();

  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> channels;
  std::vector<double> samples;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_commas(line);
    if (channels.empty()) {
      if (fields.size() < 2 || fields.front() != "t") {
        throw ParseError(path.string() + ": header must be 't,<ch0>,...'");
      }
      for (std::size_t i = 1; i < fields.size(); ++i) channels.emplace_back(fields[i]);
      continue;
    }
    if (fields.size() != channels.size() + 1) {
      throw DimensionError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                           std::to_string(channels.size()) + " channel values, got " +
                           std::to_string(fields.size() - 1));
    }
    parse_double(fields[0], path, line_no);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      samples.push_back(parse_double(fields[i], path, line_no));
    }
  }
  if (channels.empty()) throw ParseError(path.string() + ": empty file");
  return Recording(path.stem().string(), rate, std::move(channels), std::move(samples));
}

void write_recording_csv(const fs::path& path, const Recording& rec) {
  std::string out = "t";
  for (const auto& c : rec.channels()) out += "," + c;
  out += "\n";
  for (std::size_t f = 0; f < rec.frame_count(); ++f) {
    out += format_double(static_cast<double>(f) / rec.frame_rate_hz());
    for (double v : rec.frame(f)) {
      out += ",";
      out += format_double(v);
    }
    out += "\n";
  }
  write_text_file(path, out);
  write_text_file(csv_sidecar(path), json{{"frame_rate_hz", rec.frame_rate_hz()}}.dump(2) + "\n");
}

template <typename T>
T require(const json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) {
    throw ParseError(std::string(what) + ": missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": field '" + key + "': " + e.what());
  }
}

}  // namespace

RecordingFormat parse_recording_format(std::string_view s) {
  if (s == "json") return RecordingFormat::Json;
  if (s == "csv") return RecordingFormat::Csv;
  throw ParseError("unknown recording format '" + std::string(s) + "'");
}

RecordingFormat format_from_path(const fs::path& path) {
  return path.extension() == ".csv" ? RecordingFormat::Csv : RecordingFormat::Json;
}

json read_json_file(const fs::path& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_text_file(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

json to_json(const Recording& rec) {
  json frames = json::array();
  for (std::size_t f = 0; f < rec.frame_count(); ++f) {
    auto row = rec.frame(f);
    frames.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return json{{"name", rec.name()},
              {"frame_rate_hz", rec.frame_rate_hz()},
              {"channels", rec.channels()},
              {"frames", std::move(frames)}};
}

Recording recording_from_json(const json& j) {
  constexpr const char* what = "recording";
  auto name = require<std::string>(j, "name", what);
  auto rate = require<double>(j, "frame_rate_hz", what);
  auto channels = require<std::vector<std::string>>(j, "channels", what);
  auto rows = require<std::vector<std::vector<double>>>(j, "frames", what);
  return Recording::from_rows(std::move(name), rate, std::move(channels), rows);
}

Recording load_recording(const fs::path& path, RecordingFormat format) {
  if (format == RecordingFormat::Csv) return load_recording_csv(path);
  return recording_from_json(read_json_file(path));
}

void write_recording(const fs::path& path, const Recording& rec, RecordingFormat format) {
  if (format == RecordingFormat::Csv) {
    write_recording_csv(path, rec);
  } else {
    write_text_file(path, to_json(rec).dump() + "\n");
  }
}

json to_json(const GroundTruth& gt) {
  json points = json::array();
  for (const auto& p : gt.points()) {
    points.push_back({{"frame", p.frame}, {"granularity", to_string(p.granularity)}});
  }
  return json{{"recording", gt.recording_name()}, {"points", std::move(points)}};
}

GroundTruth ground_truth_from_json(const json& j) {
  constexpr const char* what = "ground truth";
  auto name = require<std::string>(j, "recording", what);
  auto raw = require<json>(j, "points", what);
  if (!raw.is_array()) throw ParseError("ground truth: 'points' must be an array");
  std::vector<LabelledPoint> points;
  for (const auto& p : raw) {
    points.push_back({require<double>(p, "frame", what),
                      parse_granularity(require<std::string>(p, "granularity", what))});
  }
  return GroundTruth(std::move(name), std::move(points));
}

GroundTruth load_ground_truth(const fs::path& path) {
  return ground_truth_from_json(read_json_file(path));
}

void write_ground_truth(const fs::path& path, const GroundTruth& gt) {
  write_text_file(path, to_json(gt).dump(2) + "\n");
}

json to_json(const SegmentationResult& seg) {
  return json{{"recording", seg.recording_name()}, {"points", seg.points()}};
}

SegmentationResult segmentation_from_json(const json& j) {
  constexpr const char* what = "segmentation";
  return SegmentationResult(require<std::string>(j, "recording", what),
                            require<std::vector<double>>(j, "points", what));
}

SegmentationResult load_segmentation(const fs::path& path) {
  return segmentation_from_json(read_json_file(path));
}

void write_segmentation(const fs::path& path, const SegmentationResult& seg) {
  write_text_file(path, to_json(seg).dump(2) + "\n");
}

}  // namespace segeval

#include <chrono>
#include <ctime>

namespace segeval {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace segeval
