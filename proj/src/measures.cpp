#include "segeval/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "segeval/errors.hpp"

namespace segeval {

namespace {

double ratio(double num, double den) { return den > 0 ? num / den : 0.0; }

double unit(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

MeasureSet compute_measures(const ConfusionCounts& c) {
  MeasureSet m;
  m.precision = unit(ratio(c.tp, c.tp + c.fp));
  m.recall = (c.tp + c.fn) > 0 ? unit(c.tp / (c.tp + c.fn)) : 1.0;
  m.accuracy = unit(ratio(c.tp + c.tn, c.tp + c.tn + c.fp + c.fn));
  m.f1 = unit(ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn));
  m.f1_class = unit(ratio(2 * (c.tp + c.tn), 2 * (c.tp + c.tn) + c.fp + c.fn));

  const double a = c.tp + c.fp;
  const double b = c.tp + c.fn;
  const double d = c.tn + c.fp;
  const double e = c.tn + c.fn;
  if (a > 0 && b > 0 && d > 0 && e > 0) {
    // Take the root factor-wise; the plain product overflows for large counts.
    const double den = std::sqrt(a) * std::sqrt(b) * std::sqrt(d) * std::sqrt(e);
    m.mcc = std::clamp((c.tp * c.tn - c.fp * c.fn) / den, -1.0, 1.0);
  }
  return m;
}

std::string_view to_string(CountingSource s) {
  return s == CountingSource::Margin ? "margin" : "conventional";
}

CountingSource parse_counting_source(std::string_view s) {
  if (s == "margin") return CountingSource::Margin;
  if (s == "conventional") return CountingSource::Conventional;
  throw ConfigError("unknown PSME counting source '" + std::string(s) + "'");
}

void PsmeConfig::validate() const {
  if (!(penalty >= 0) || !std::isfinite(penalty)) {
    throw ConfigError("PSME penalty must be non-negative");
  }
}

PsmeResult compute_psme(std::span<const double> gt, std::span<const double> alg,
                        std::int64_t f_max, const PsmeConfig& cfg,
                        const MarginConfig& margin_cfg) {
  cfg.validate();
  const auto counts = cfg.source == CountingSource::Margin
                          ? classify_margin(gt, alg, f_max, margin_cfg)
                          : classify_conventional(gt, alg, f_max);
  const auto g = canonicalize_points({gt.begin(), gt.end()});
  const auto s = canonicalize_points({alg.begin(), alg.end()});

  PsmeResult r;
  if (g.empty()) {
    r.min_term_undefined = !s.empty();
    r.value = cfg.penalty * static_cast<double>(s.size());
    return r;
  }
  double squared = 0;
  for (double x : s) {
    auto it = std::lower_bound(g.begin(), g.end(), x);
    double best = std::numeric_limits<double>::infinity();
    if (it != g.end()) best = std::min(best, (*it - x) * (*it - x));
    if (it != g.begin()) best = std::min(best, (*std::prev(it) - x) * (*std::prev(it) - x));
    squared += best;
  }
  r.value = cfg.penalty * (counts.fp + counts.fn) + squared;
  return r;
}

double round_to(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(value * scale) / scale;
}

}  // namespace segeval
