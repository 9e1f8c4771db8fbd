#include "segeval/dataset.hpp"

#include <algorithm>
#include <future>
#include <optional>
#include <string>

#include "segeval/errors.hpp"
#include "segeval/io.hpp"

namespace segeval {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kGtSuffix = ".gt.json";

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

const DatasetEntry* Dataset::find(std::string_view recording) const {
  for (const auto& e : entries) {
    if (e.recording.name() == recording) return &e;
  }
  return nullptr;
}

std::vector<std::string> Dataset::names() const {
  std::vector<std::string> out;
  for (const auto& e : entries) out.push_back(e.recording.name());
  return out;
}

Dataset load_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ParseError("dataset directory '" + dir.string() + "' not found");
  Dataset ds;
  ds.name = dir.filename().string();
  if (fs::exists(dir / "dataset.json")) {
    const auto meta = read_json_file(dir / "dataset.json");
    ds.name = meta.value("name", ds.name);
    ds.version = meta.value("version", ds.version);
  }

  std::vector<std::string> stems;
  std::vector<std::string> recording_stems;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto file = entry.path().filename().string();
    if (ends_with(file, kGtSuffix)) {
      stems.push_back(file.substr(0, file.size() - kGtSuffix.size()));
    } else if (ends_with(file, ".rec.json")) {
      recording_stems.push_back(file.substr(0, file.size() - 9));
    } else if (ends_with(file, ".csv")) {
      recording_stems.push_back(file.substr(0, file.size() - 4));
    }
  }
  std::sort(stems.begin(), stems.end());
  for (const auto& stem : recording_stems) {
    if (!std::binary_search(stems.begin(), stems.end(), stem)) {
      throw ParseError("dataset '" + dir.string() + "': no ground truth for '" + stem + "'");
    }
  }

  for (const auto& stem : stems) {
    auto gt = load_ground_truth(dir / (stem + std::string(kGtSuffix)));
    const auto json_path = dir / (stem + ".rec.json");
    const auto csv_path = dir / (stem + ".csv");
    std::optional<Recording> rec;
    if (fs::exists(json_path)) {
      rec = load_recording(json_path, RecordingFormat::Json);
    } else if (fs::exists(csv_path)) {
      rec = load_recording(csv_path, RecordingFormat::Csv);
    } else {
      throw ParseError("dataset '" + dir.string() + "': no recording for '" + stem + "'");
    }
    if (rec->name() != gt.recording_name()) {
      throw MismatchError("dataset '" + dir.string() + "': recording '" + rec->name() +
                          "' labelled as '" + gt.recording_name() + "'");
    }
    gt.check_range(rec->f_max());
    ds.entries.push_back({std::move(*rec), std::move(gt)});
  }
  if (ds.entries.empty()) throw InsufficientDataError("dataset '" + dir.string() + "' is empty");
  std::sort(ds.entries.begin(), ds.entries.end(), [](const auto& a, const auto& b) {
    return a.recording.name() < b.recording.name();
  });
  return ds;
}

void write_dataset(const fs::path& dir, const Dataset& dataset) {
  fs::create_directories(dir);
  write_text_file(dir / "dataset.json",
                  nlohmann::json{{"name", dataset.name}, {"version", dataset.version}}.dump(2) +
                      "\n");
  for (const auto& e : dataset.entries) {
    const auto& name = e.recording.name();
    write_recording(dir / (name + ".rec.json"), e.recording, RecordingFormat::Json);
    write_ground_truth(dir / (name + std::string(kGtSuffix)), e.ground_truth);
  }
}

std::vector<EvaluationReport> evaluate_dataset(const Dataset& dataset, const Segmenter& segmenter,
                                               const EvalConfig& cfg, Provenance base) {
  if (base.dataset_version.empty() || base.dataset_version == Provenance{}.dataset_version) {
    base.dataset_version = dataset.version;
  }
  std::vector<std::future<EvaluationReport>> jobs;
  jobs.reserve(dataset.entries.size());
  for (const auto& entry : dataset.entries) {
    jobs.push_back(std::async(std::launch::async, [&entry, &segmenter, &cfg, &base] {
      auto seg = segmenter(entry.recording);
      return evaluate_recording(entry.recording, entry.ground_truth, seg, cfg, base);
    }));
  }
  std::vector<EvaluationReport> reports;
  reports.reserve(jobs.size());
  for (auto& job : jobs) reports.push_back(job.get());
  std::sort(reports.begin(), reports.end(),
            [](const auto& a, const auto& b) { return a.recording_name < b.recording_name; });
  return reports;
}

}  // namespace segeval
