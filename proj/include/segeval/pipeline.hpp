#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "segeval/classifiers.hpp"
#include "segeval/measures.hpp"
#include "segeval/types.hpp"

namespace segeval {

enum class Approach { Conventional = 0, Margin = 1, Ink = 2 };

inline constexpr Approach kApproaches[] = {Approach::Conventional, Approach::Margin,
                                           Approach::Ink};

std::string_view to_string(Approach a);
Approach parse_approach(std::string_view s);

/// Ground-truth point sets per evaluation level: rough ⊆ medium ⊆ fine.
struct GranularityCascade {
  std::vector<double> rough;
  std::vector<double> medium;
  std::vector<double> fine;

  const std::vector<double>& at(Granularity g) const;
};

GranularityCascade cascade(const GroundTruth& gt);

/// Evaluation settings. Times are in milliseconds and converted with the
/// recording's frame rate when a recording is evaluated.
struct EvalConfig {
  double margin_ms = 200.0;
  double sigma_ms = 66.67;
  double psme_p = 100.0;
  Kernel kernel = Kernel::Gaussian;
  bool strict_margin = false;
  CountingSource psme_source = CountingSource::Margin;
  /// Quadrature step is sigma / quadrature_divisor.
  double quadrature_divisor = 100.0;
  /// Support radius in multiples of sigma.
  double support_sigmas = 6.0;

  void validate() const;
  MarginConfig margin_for(double frame_rate_hz) const;
  KernelConfig kernel_for(double frame_rate_hz) const;

  bool operator==(const EvalConfig&) const = default;
};

nlohmann::json to_json(const EvalConfig& cfg);
EvalConfig eval_config_from_json(const nlohmann::json& j);

/// Where a report came from. Serialized verbatim into every report.
struct Provenance {
  std::string toolkit_version;
  std::string dataset_version = "unversioned";
  std::string algorithm = "external";
  nlohmann::json algorithm_params = nlohmann::json::object();
  /// "full" or "frame_by_frame".
  std::string data_access = "full";
  bool training_api_used = false;
  bool trained = false;
  std::optional<int> fold;

  bool operator==(const Provenance&) const = default;
};

nlohmann::json to_json(const Provenance& p);
Provenance provenance_from_json(const nlohmann::json& j);

struct Cell {
  ConfusionCounts counts;
  MeasureSet measures;

  bool operator==(const Cell&) const = default;
};

using CellGrid = std::array<std::array<Cell, 3>, 3>;

struct EvaluationReport {
  std::string recording_name;
  std::int64_t f_max = 0;
  double frame_rate_hz = 0;
  std::size_t algorithm_points = 0;
  EvalConfig config;
  Provenance provenance;
  /// Indexed [granularity][approach].
  CellGrid cells{};
  std::array<PsmeResult, 3> psme{};
  /// UTC timestamp stamped when the report is written; empty until then.
  std::string generated_at;

  const Cell& cell(Granularity g, Approach a) const {
    return cells[static_cast<std::size_t>(g)][static_cast<std::size_t>(a)];
  }
  const PsmeResult& psme_at(Granularity g) const { return psme[static_cast<std::size_t>(g)]; }

  bool operator==(const EvaluationReport&) const = default;
};

/// Runs conventional, Margin and InK matching plus PSME at every granularity.
/// Throws MismatchError if the three inputs name different recordings and
/// DomainError if a point lies outside [0, f_max].
EvaluationReport evaluate_recording(const Recording& rec, const GroundTruth& gt,
                                    const SegmentationResult& seg, const EvalConfig& cfg,
                                    Provenance provenance);

nlohmann::json to_json(const EvaluationReport& r);
EvaluationReport report_from_json(const nlohmann::json& j);

inline constexpr const char* kReportCsvHeader =
    "recording,granularity,approach,tp,tn,fp,fn,precision,recall,accuracy,f1,f1_class,mcc,psme";

/// One row per granularity and approach, header included.
std::string report_to_csv(std::span<const EvaluationReport> reports);

/// Static five-fold split over lexicographically sorted recording names.
class FoldAssignment {
 public:
  static constexpr int kFolds = 5;

  explicit FoldAssignment(std::map<std::string, int> folds) : folds_(std::move(folds)) {}

  int fold_of(const std::string& name) const;
  std::vector<std::string> members(int fold) const;
  std::array<std::size_t, kFolds> sizes() const;
  const std::map<std::string, int>& assignment() const { return folds_; }

  bool operator==(const FoldAssignment&) const = default;

 private:
  std::map<std::string, int> folds_;
};

/// Round-robin over sorted names. Throws InsufficientDataError for fewer than
/// five recordings and DomainError on duplicate names.
FoldAssignment make_folds(std::vector<std::string> names);

/// Dataset-level view over several reports.
struct DatasetSummary {
  std::vector<std::string> recordings;
  /// Counts summed over recordings, measures recomputed from the sums.
  CellGrid pooled{};
  /// Arithmetic mean of per-recording measures.
  std::array<std::array<MeasureSet, 3>, 3> mean{};
  std::array<double, 3> psme_sum{};
  std::array<double, 3> psme_mean{};
};

DatasetSummary aggregate(std::span<const EvaluationReport> reports);
nlohmann::json to_json(const DatasetSummary& s);

}  // namespace segeval
