#include "segeval/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "segeval/errors.hpp"

namespace segeval {

namespace {

constexpr double kNegativeSlack = 1e-9;

double clamp_area(double a) { return (a < 0 && a >= -kNegativeSlack) ? 0.0 : a; }

struct Prepared {
  std::vector<double> gt;
  std::vector<double> alg;
};

Prepared prepare(std::span<const double> gt, std::span<const double> alg, std::int64_t f_max) {
  if (f_max <= 0) throw DomainError("f_max must be positive");
  Prepared p{canonicalize_points({gt.begin(), gt.end()}),
             canonicalize_points({alg.begin(), alg.end()})};
  check_points_in_range(p.gt, f_max, "ground truth");
  check_points_in_range(p.alg, f_max, "segmentation");
  return p;
}

ConfusionCounts close_counts(double tp, double fp, double fn, std::int64_t f_max) {
  ConfusionCounts c;
  c.tp = tp;
  c.fp = fp;
  c.fn = fn;
  c.f_max = f_max;
  c.tn = static_cast<double>(f_max) - tp - fp - fn;
  return c;
}

/// Sum of kernels centred on `points` (sorted) at t, considering only points
/// in [lo, hi) which the caller keeps within the support radius.
double kernel_sum(const std::vector<double>& points, std::size_t lo, std::size_t hi, double t,
                  double sigma, double radius) {
  double s = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    const double d = t - points[i];
    if (std::abs(d) <= radius) s += gaussian_kernel(d, sigma);
  }
  return s;
}

/// Keeps [lo, hi) as the index range of sorted points within radius of t, for
/// non-decreasing t.
struct SlidingWindow {
  const std::vector<double>* points;
  std::size_t lo = 0;
  std::size_t hi = 0;

  void advance(double t, double radius) {
    while (hi < points->size() && (*points)[hi] <= t + radius) ++hi;
    while (lo < hi && (*points)[lo] < t - radius) ++lo;
  }
};

struct Interval {
  double a;
  double b;
};

std::vector<Interval> support_union(const std::vector<double>& gt, const std::vector<double>& alg,
                                    double radius) {
  std::vector<double> all(gt);
  all.insert(all.end(), alg.begin(), alg.end());
  std::sort(all.begin(), all.end());
  std::vector<Interval> out;
  for (double p : all) {
    if (!out.empty() && p - radius <= out.back().b) {
      out.back().b = std::max(out.back().b, p + radius);
    } else {
      out.push_back({p - radius, p + radius});
    }
  }
  return out;
}

}  // namespace

void MarginConfig::validate() const {
  if (!(margin > 0) || !std::isfinite(margin)) throw ConfigError("margin must be positive");
}

std::string_view to_string(Kernel k) { return k == Kernel::Gaussian ? "gaussian" : "dirac"; }

Kernel parse_kernel(std::string_view s) {
  if (s == "gaussian") return Kernel::Gaussian;
  if (s == "dirac") return Kernel::Dirac;
  throw ConfigError("unknown kernel '" + std::string(s) + "'");
}

KernelConfig KernelConfig::gaussian(double sigma) {
  KernelConfig c;
  c.kernel = Kernel::Gaussian;
  c.sigma = sigma;
  c.quadrature_step = sigma / 100.0;
  c.support_radius = 6.0 * sigma;
  return c;
}

KernelConfig KernelConfig::dirac() {
  KernelConfig c = gaussian(1.0);
  c.kernel = Kernel::Dirac;
  return c;
}

void KernelConfig::validate() const {
  if (kernel == Kernel::Dirac) return;
  if (!(sigma > 0) || !std::isfinite(sigma)) throw ConfigError("sigma must be positive");
  if (!(quadrature_step > 0)) throw ConfigError("quadrature step must be positive");
  if (quadrature_step >= sigma) throw ConfigError("quadrature step must be smaller than sigma");
  if (support_radius < 4.0 * sigma) throw ConfigError("support radius must be at least 4 sigma");
}

double gaussian_kernel(double x, double sigma) {
  const double z = x / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

ConfusionCounts classify_conventional(std::span<const double> gt, std::span<const double> alg,
                                      std::int64_t f_max) {
  const auto p = prepare(gt, alg, f_max);
  std::size_t tp = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < p.gt.size() && j < p.alg.size()) {
    if (p.gt[i] == p.alg[j]) {
      ++tp;
      ++i;
      ++j;
    } else if (p.gt[i] < p.alg[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  const auto tpd = static_cast<double>(tp);
  return close_counts(tpd, static_cast<double>(p.alg.size()) - tpd,
                      static_cast<double>(p.gt.size()) - tpd, f_max);
}

ConfusionCounts classify_margin(std::span<const double> gt, std::span<const double> alg,
                                std::int64_t f_max, const MarginConfig& cfg) {
  cfg.validate();
  const auto p = prepare(gt, alg, f_max);
  auto within = [&](double a, double b) {
    const double d = std::abs(a - b);
    return cfg.strict ? d < cfg.margin : d <= cfg.margin;
  };

  double tp = 0;
  double fp = 0;
  double fn = 0;
  std::vector<bool> near_gt(p.alg.size(), false);
  for (double g : p.gt) {
    // Sorted input: matches of g form a contiguous run.
    auto first = std::lower_bound(p.alg.begin(), p.alg.end(), g - cfg.margin);
    std::size_t matches = 0;
    for (auto it = first; it != p.alg.end() && *it <= g + cfg.margin; ++it) {
      if (within(*it, g)) {
        ++matches;
        near_gt[static_cast<std::size_t>(it - p.alg.begin())] = true;
      }
    }
    if (matches == 0) {
      fn += 1;
    } else {
      tp += 1;
      fp += static_cast<double>(matches - 1);
    }
  }
  fp += static_cast<double>(std::count(near_gt.begin(), near_gt.end(), false));

  auto c = close_counts(tp, fp, fn, f_max);
  c.tn = std::max(0.0, c.tn);
  return c;
}

ConfusionCounts classify_ink(std::span<const double> gt, std::span<const double> alg,
                             std::int64_t f_max, const KernelConfig& cfg) {
  cfg.validate();
  if (cfg.kernel == Kernel::Dirac) return classify_conventional(gt, alg, f_max);
  const auto p = prepare(gt, alg, f_max);

  const double radius = cfg.support_radius;
  double positive = 0;
  double negative = 0;
  SlidingWindow gt_win{&p.gt};
  SlidingWindow alg_win{&p.alg};
  auto e_c = [&](double t) {
    gt_win.advance(t, radius);
    alg_win.advance(t, radius);
    return kernel_sum(p.alg, alg_win.lo, alg_win.hi, t, cfg.sigma, radius) -
           kernel_sum(p.gt, gt_win.lo, gt_win.hi, t, cfg.sigma, radius);
  };

  for (const auto& iv : support_union(p.gt, p.alg, radius)) {
    const auto n = static_cast<std::size_t>(std::ceil((iv.b - iv.a) / cfg.quadrature_step));
    const double h = (iv.b - iv.a) / static_cast<double>(n);
    double y0 = e_c(iv.a);
    for (std::size_t k = 1; k <= n; ++k) {
      const double y1 = e_c(iv.a + static_cast<double>(k) * h);
      if ((y0 >= 0 && y1 >= 0) || (y0 <= 0 && y1 <= 0)) {
        const double area = 0.5 * h * (y0 + y1);
        (area > 0 ? positive : negative) += area;
      } else {
        // Split at the linearly interpolated root.
        const double w0 = h * y0 / (y0 - y1);
        const double a0 = 0.5 * w0 * y0;
        const double a1 = 0.5 * (h - w0) * y1;
        (y0 > 0 ? positive : negative) += a0;
        (y1 > 0 ? positive : negative) += a1;
      }
      y0 = y1;
    }
  }

  const double a_fp = clamp_area(positive);
  const double a_fn = clamp_area(-negative);
  const double a_tp = clamp_area(static_cast<double>(p.alg.size()) - a_fp);
  return close_counts(a_tp, a_fp, a_fn, f_max);
}

std::vector<ErrorSample> sample_error_function(std::span<const double> gt,
                                               std::span<const double> alg,
                                               const KernelConfig& cfg, double t0, double t1,
                                               double step) {
  if (!(t0 < t1)) throw DomainError("sample range must satisfy t0 < t1");
  if (!(step > 0)) throw DomainError("sample step must be positive");
  if (cfg.kernel != Kernel::Gaussian) throw ConfigError("error function sampling needs a Gaussian kernel");
  if (!(cfg.sigma > 0)) throw ConfigError("sigma must be positive");

  const auto g = canonicalize_points({gt.begin(), gt.end()});
  const auto s = canonicalize_points({alg.begin(), alg.end()});
  const auto n = static_cast<std::size_t>(std::floor((t1 - t0) / step + 1e-9));
  std::vector<ErrorSample> out;
  out.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = t0 + static_cast<double>(k) * step;
    const double f_s = kernel_sum(s, 0, s.size(), t, cfg.sigma, cfg.support_radius);
    const double f_gt = -kernel_sum(g, 0, g.size(), t, cfg.sigma, cfg.support_radius);
    out.push_back({t, f_s, f_gt, f_s + f_gt});
  }
  return out;
}

}  // namespace segeval
