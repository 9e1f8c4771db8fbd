#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "segeval/types.hpp"

namespace segeval {

/// Tolerance window for the Margin approach, in frames.
struct MarginConfig {
  double margin = 20.0;
  /// Use |s - g| < margin instead of the default inclusive |s - g| <= margin.
  bool strict = false;

  void validate() const;
};

enum class Kernel { Gaussian, Dirac };

std::string_view to_string(Kernel k);
Kernel parse_kernel(std::string_view s);

/// Kernel and quadrature settings for the Integrated Kernel approach, in frames.
struct KernelConfig {
  Kernel kernel = Kernel::Gaussian;
  double sigma = 6.667;
  double quadrature_step = 6.667 / 100.0;
  double support_radius = 6.0 * 6.667;

  /// Gaussian kernel with step sigma/100 and a 6 sigma support radius.
  static KernelConfig gaussian(double sigma);
  static KernelConfig dirac();

  void validate() const;
};

/// Exact-frame matching: any offset counts as one fp and one fn.
ConfusionCounts classify_conventional(std::span<const double> gt, std::span<const double> alg,
                                      std::int64_t f_max);

/// Margin matching. For every ground-truth point g with matches M_g (algorithm
/// points within the margin): an empty M_g is one fn, otherwise one tp plus
/// |M_g| - 1 fp. Algorithm points near no ground-truth point are fp as well.
/// An algorithm point inside two overlapping ground-truth margins therefore
/// yields two tp. tn is clamped at zero.
ConfusionCounts classify_margin(std::span<const double> gt, std::span<const double> alg,
                                std::int64_t f_max, const MarginConfig& cfg);

/// Integrated Kernel matching.
///
/// Places a unit-mass kernel on every algorithm point (positive) and every
/// ground-truth point (negative) and integrates the positive and negative parts
/// of the sum e_c over the real line:
///
///   A_fp = int max(0, e_c),  A_fn = -int min(0, e_c),
///   A_tp = |alg| - A_fp,     A_tn = f_max - A_tp - A_fp - A_fn.
///
/// The Gaussian case uses a composite trapezoid rule on the union of the point
/// supports; segments containing a sign change are split at the interpolated
/// root. The Dirac kernel reduces to classify_conventional.
ConfusionCounts classify_ink(std::span<const double> gt, std::span<const double> alg,
                             std::int64_t f_max, const KernelConfig& cfg);

struct ErrorSample {
  double t;
  double f_s;
  double f_gt;
  double e_c;
};

/// Uniform samples of f_s, f_gt (non-positive) and e_c = f_s + f_gt on [t0, t1].
std::vector<ErrorSample> sample_error_function(std::span<const double> gt,
                                               std::span<const double> alg,
                                               const KernelConfig& cfg, double t0, double t1,
                                               double step);

/// Gaussian density with standard deviation sigma, evaluated at x.
double gaussian_kernel(double x, double sigma);

}  // namespace segeval
