#pragma once

// Reference implementations used only by tests. Deliberately naive.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace segeval::test {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Overlap mass of two opposed unit Gaussians d apart.
inline double analytic_pair_tp(double d, double sigma) {
  return 2.0 * normal_cdf(-std::abs(d) / (2.0 * sigma));
}

struct OracleAreas {
  double fp = 0;
  double fn = 0;
};

/// Midpoint-rule integral of the positive and negative parts of e_c on a fine
/// uniform grid spanning every point by 12 sigma. Every kernel is summed
/// directly.
inline OracleAreas brute_force_areas(const std::vector<double>& gt, const std::vector<double>& alg,
                                     double sigma, int cells_per_sigma = 400) {
  OracleAreas out;
  if (gt.empty() && alg.empty()) return out;
  double lo = 1e300, hi = -1e300;
  for (double p : gt) lo = std::min(lo, p), hi = std::max(hi, p);
  for (double p : alg) lo = std::min(lo, p), hi = std::max(hi, p);
  lo -= 12 * sigma;
  hi += 12 * sigma;
  const double h = sigma / cells_per_sigma;
  const long n = static_cast<long>(std::ceil((hi - lo) / h));
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  for (long i = 0; i < n; ++i) {
    const double t = lo + (i + 0.5) * h;
    double e = 0;
    for (double p : alg) e += norm * std::exp(-0.5 * ((t - p) / sigma) * ((t - p) / sigma));
    for (double p : gt) e -= norm * std::exp(-0.5 * ((t - p) / sigma) * ((t - p) / sigma));
    if (e > 0) out.fp += e * h;
    else out.fn -= e * h;
  }
  return out;
}

}  // namespace segeval::test
