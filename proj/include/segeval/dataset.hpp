#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "segeval/pipeline.hpp"
#include "segeval/types.hpp"

namespace segeval {

struct DatasetEntry {
  Recording recording;
  GroundTruth ground_truth;
};

/// Recordings with ground truth, sorted by name.
///
/// On disk a dataset is a directory holding `<name>.gt.json` for every
/// recording plus either `<name>.rec.json` or `<name>.csv` (with its
/// `<name>.meta.json` sidecar). An optional `dataset.json` carries
/// `{"name": ..., "version": ...}`.
struct Dataset {
  std::string name = "dataset";
  std::string version = "unversioned";
  std::vector<DatasetEntry> entries;

  const DatasetEntry* find(std::string_view recording) const;
  std::vector<std::string> names() const;
};

Dataset load_dataset(const std::filesystem::path& dir);
void write_dataset(const std::filesystem::path& dir, const Dataset& dataset);

using Segmenter = std::function<SegmentationResult(const Recording&)>;

/// Segments and evaluates every recording. Recordings are processed
/// concurrently; the result is ordered by recording name. An unset dataset
/// version in `base` is taken from the dataset.
std::vector<EvaluationReport> evaluate_dataset(const Dataset& dataset, const Segmenter& segmenter,
                                               const EvalConfig& cfg, Provenance base);

}  // namespace segeval
