#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "segeval/classifiers.hpp"
#include "segeval/types.hpp"

namespace segeval {

/// The six ratio measures of a confusion matrix. MCC lies in [-1, 1], the rest in [0, 1].
struct MeasureSet {
  double precision = 0;
  double recall = 0;
  double accuracy = 0;
  double f1 = 0;
  double f1_class = 0;
  double mcc = 0;

  bool operator==(const MeasureSet&) const = default;
};

/// Zero denominators never fail: precision, F1, F1^Class and accuracy fall back
/// to 0; recall is 1 when tp + fn = 0 (no ground truth); MCC is 0 when any
/// factor of its radicand is zero.
MeasureSet compute_measures(const ConfusionCounts& counts);

enum class CountingSource { Margin, Conventional };

std::string_view to_string(CountingSource s);
CountingSource parse_counting_source(std::string_view s);

struct PsmeConfig {
  double penalty = 100.0;
  CountingSource source = CountingSource::Margin;

  void validate() const;
};

struct PsmeResult {
  double value = 0;
  /// Set when the ground truth is empty but the algorithm reported points; the
  /// squared-distance term is then dropped and value = p * |alg|.
  bool min_term_undefined = false;

  bool operator==(const PsmeResult&) const = default;
};

/// p * (fp + fn) + sum over algorithm points of the squared distance (frames^2)
/// to the nearest ground-truth point.
PsmeResult compute_psme(std::span<const double> gt, std::span<const double> alg,
                        std::int64_t f_max, const PsmeConfig& cfg,
                        const MarginConfig& margin_cfg);

/// Presentation rounding (half away from zero).
double round_to(double value, int decimals);

}  // namespace segeval
