#include "segeval/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "segeval/errors.hpp"

namespace segeval {

using nlohmann::json;

namespace {

constexpr double kRankEpsilon = 1e-12;
constexpr double kAbsoluteErrorFloor = 1e-9;

}  // namespace

void ZvcParams::validate() const {
  if (!(noise_floor >= 0)) throw ConfigError("zvc: noise_floor must be non-negative");
  if (min_crossing_channels < 1) throw ConfigError("zvc: min_crossing_channels must be >= 1");
  if (!(refractory >= 0)) throw ConfigError("zvc: refractory must be non-negative");
}

void SsavParams::validate() const {
  if (window < 3) throw ConfigError("ssav: window must be >= 3 frames");
  if (!(noise_threshold >= 0) || !(noise_threshold < threshold)) {
    throw ConfigError("ssav: need 0 <= noise_threshold < threshold");
  }
}

void PcaParams::validate() const {
  if (init_window < 2) throw ConfigError("pca: init_window must be >= 2");
  if (!(retained_energy > 0 && retained_energy <= 1)) {
    throw ConfigError("pca: retained_energy must lie in (0, 1]");
  }
  if (!(error_ratio_threshold > 1)) throw ConfigError("pca: error_ratio_threshold must exceed 1");
}

std::vector<double> joint_velocities(const Recording& rec) {
  const std::size_t n = rec.frame_count();
  const std::size_t d = rec.channel_count();
  if (n < 2) throw DegenerateInputError("velocities need at least 2 frames");
  const double rate = rec.frame_rate_hz();
  std::vector<double> v(n * d);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t lo = t == 0 ? 0 : t - 1;
    const std::size_t hi = t + 1 == n ? t : t + 1;
    const double dt = static_cast<double>(hi - lo) / rate;
    for (std::size_t c = 0; c < d; ++c) {
      v[t * d + c] = (rec.at(hi, c) - rec.at(lo, c)) / dt;
    }
  }
  return v;
}

std::vector<double> ssav_series(const Recording& rec) {
  const auto v = joint_velocities(rec);
  const std::size_t d = rec.channel_count();
  std::vector<double> s(rec.frame_count(), 0.0);
  for (std::size_t t = 0; t < s.size(); ++t) {
    for (std::size_t c = 0; c < d; ++c) s[t] += v[t * d + c] * v[t * d + c];
  }
  return s;
}

SegmentationResult zvc_segment(const Recording& rec, const ZvcParams& params) {
  params.validate();
  const std::size_t n = rec.frame_count();
  const std::size_t d = rec.channel_count();
  if (n < 2) throw DegenerateInputError("zvc: recording '" + rec.name() + "' has a single frame");
  const auto v = joint_velocities(rec);

  // A channel crosses at frame t when its velocity is significant and of
  // opposite sign on both neighbours.
  struct Candidate {
    std::size_t frame;
    double speed;
  };
  std::vector<Candidate> candidates;
  for (std::size_t t = 1; t + 1 < n; ++t) {
    int crossing = 0;
    double speed = 0;
    for (std::size_t c = 0; c < d; ++c) {
      const double before = v[(t - 1) * d + c];
      const double after = v[(t + 1) * d + c];
      if (std::abs(before) > params.noise_floor && std::abs(after) > params.noise_floor &&
          (before > 0) != (after > 0)) {
        ++crossing;
        speed += std::abs(v[t * d + c]);
      }
    }
    if (crossing >= params.min_crossing_channels) candidates.push_back({t, speed});
  }

  // Adjacent candidate frames describe one crossing: keep the slowest frame.
  std::vector<double> crossings;
  for (std::size_t i = 0; i < candidates.size();) {
    std::size_t j = i;
    std::size_t best = i;
    while (j + 1 < candidates.size() && candidates[j + 1].frame == candidates[j].frame + 1) {
      ++j;
      if (candidates[j].speed < candidates[best].speed) best = j;
    }
    crossings.push_back(static_cast<double>(candidates[best].frame));
    i = j + 1;
  }

  std::vector<double> points;
  for (double p : crossings) {
    if (points.empty() || p - points.back() >= params.refractory) points.push_back(p);
  }
  return SegmentationResult(rec.name(), std::move(points));
}

SegmentationResult ssav_segment(const Recording& rec, const SsavParams& params) {
  params.validate();
  const std::size_t n = rec.frame_count();
  if (n < 2 || n < static_cast<std::size_t>(params.window)) {
    throw DegenerateInputError("ssav: recording '" + rec.name() + "' is shorter than the window");
  }
  const auto s = ssav_series(rec);
  const std::size_t half = static_cast<std::size_t>(params.window) / 2;

  std::vector<double> points;
  std::size_t last = std::numeric_limits<std::size_t>::max();
  for (std::size_t t = 0; t < n; ++t) {
    if (!(s[t] < params.threshold && s[t] > params.noise_threshold)) continue;
    const std::size_t lo = t >= half ? t - half : 0;
    const std::size_t hi = std::min(n - 1, t + half);
    const double window_min = *std::min_element(s.begin() + static_cast<std::ptrdiff_t>(lo),
                                                s.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
    if (s[t] != window_min) continue;
    // A plateau of equal minima is one minimum.
    if (last != std::numeric_limits<std::size_t>::max() && t == last + 1) {
      last = t;
      continue;
    }
    points.push_back(static_cast<double>(t));
    last = t;
  }
  return SegmentationResult(rec.name(), std::move(points));
}

namespace {

struct Subspace {
  Eigen::VectorXd mean;
  Eigen::MatrixXd basis;  // d x r, orthonormal columns
};

Subspace fit_subspace(const Recording& rec, std::size_t begin, std::size_t window,
                      double retained_energy) {
  const auto d = static_cast<Eigen::Index>(rec.channel_count());
  Eigen::MatrixXd x(static_cast<Eigen::Index>(window), d);
  for (std::size_t i = 0; i < window; ++i) {
    for (Eigen::Index c = 0; c < d; ++c) {
      x(static_cast<Eigen::Index>(i), c) = rec.at(begin + i, static_cast<std::size_t>(c));
    }
  }
  Subspace s;
  s.mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centred = x.rowwise() - s.mean.transpose();
  const Eigen::MatrixXd cov = centred.transpose() * centred / static_cast<double>(window);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  // Eigen returns ascending eigenvalues; walk them in descending order.
  const Eigen::VectorXd values = eig.eigenvalues().cwiseMax(0.0);
  const double total = values.sum();
  s.basis = Eigen::MatrixXd(d, 0);
  if (total <= kRankEpsilon) return s;

  double kept = 0;
  Eigen::Index r = 0;
  while (r < d && kept < retained_energy * total) {
    kept += values(d - 1 - r);
    ++r;
  }
  s.basis.resize(d, r);
  for (Eigen::Index k = 0; k < r; ++k) {
    Eigen::VectorXd vec = eig.eigenvectors().col(d - 1 - k);
    for (Eigen::Index c = 0; c < d; ++c) {
      if (std::abs(vec(c)) > kRankEpsilon) {
        if (vec(c) < 0) vec = -vec;
        break;
      }
    }
    s.basis.col(k) = vec;
  }
  return s;
}

double reconstruction_error(const Subspace& s, std::span<const double> frame) {
  const Eigen::Map<const Eigen::VectorXd> x(frame.data(), static_cast<Eigen::Index>(frame.size()));
  const Eigen::VectorXd y = x - s.mean;
  const Eigen::VectorXd residual = y - s.basis * (s.basis.transpose() * y);
  return residual.squaredNorm();
}

}  // namespace

std::vector<double> pca_reconstruction_error(const Recording& rec, std::size_t fit_begin,
                                             std::size_t window, double retained_energy) {
  if (window < 2 || fit_begin + window > rec.frame_count()) {
    throw DegenerateInputError("pca: fit window exceeds the recording");
  }
  const auto s = fit_subspace(rec, fit_begin, window, retained_energy);
  std::vector<double> e(rec.frame_count());
  for (std::size_t t = 0; t < e.size(); ++t) e[t] = reconstruction_error(s, rec.frame(t));
  return e;
}

SegmentationResult pca_segment(const Recording& rec, const PcaParams& params) {
  params.validate();
  const std::size_t n = rec.frame_count();
  const auto k = static_cast<std::size_t>(params.init_window);
  if (n < 2 * k) {
    throw DegenerateInputError("pca: recording '" + rec.name() + "' has " + std::to_string(n) +
                               " frames, need at least " + std::to_string(2 * k));
  }
  const std::size_t trailing = std::max<std::size_t>(1, k / 4);

  std::vector<double> points;
  std::size_t start = 0;
  while (start + k + trailing <= n) {
    const auto s = fit_subspace(rec, start, k, params.retained_energy);
    double baseline = 0;
    for (std::size_t t = start; t < start + k; ++t) baseline += reconstruction_error(s, rec.frame(t));
    baseline /= static_cast<double>(k);
    const double level = std::max(params.error_ratio_threshold * baseline, kAbsoluteErrorFloor);

    const std::size_t first = start + k;
    std::vector<double> e;
    std::optional<std::size_t> cut;
    double window_sum = 0;
    for (std::size_t t = first; t < n; ++t) {
      e.push_back(reconstruction_error(s, rec.frame(t)));
      window_sum += e.back();
      if (e.size() > trailing) window_sum -= e[e.size() - 1 - trailing];
      if (e.size() < trailing || window_sum / static_cast<double>(trailing) <= level) continue;

      // Onset: first frame of the trailing window above the level, extended
      // back through the preceding run of exceedances.
      std::size_t j = e.size() - trailing;
      while (j + 1 < e.size() && e[j] <= level) ++j;
      while (j > 0 && e[j - 1] > level) --j;
      cut = first + j;
      break;
    }
    if (!cut) break;
    points.push_back(static_cast<double>(*cut));
    start = *cut;
  }
  return SegmentationResult(rec.name(), std::move(points));
}

std::string_view to_string(BaselineKind k) {
  switch (k) {
    case BaselineKind::Zvc:
      return "zvc";
    case BaselineKind::Ssav:
      return "ssav";
    case BaselineKind::Pca:
      return "pca";
  }
  return "unknown";
}

BaselineKind parse_baseline_kind(std::string_view s) {
  if (s == "zvc") return BaselineKind::Zvc;
  if (s == "ssav") return BaselineKind::Ssav;
  if (s == "pca") return BaselineKind::Pca;
  throw ConfigError("unknown algorithm '" + std::string(s) + "' (expected zvc, ssav or pca)");
}

json to_json(const ZvcParams& p) {
  return {{"noise_floor", p.noise_floor},
          {"min_crossing_channels", p.min_crossing_channels},
          {"refractory", p.refractory}};
}

json to_json(const SsavParams& p) {
  return {{"window", p.window}, {"threshold", p.threshold}, {"noise_threshold", p.noise_threshold}};
}

json to_json(const PcaParams& p) {
  return {{"init_window", p.init_window},
          {"retained_energy", p.retained_energy},
          {"error_ratio_threshold", p.error_ratio_threshold}};
}

namespace {

void reject_unknown_keys(const json& j, const json& known, std::string_view algo) {
  if (!j.is_object()) throw ConfigError(std::string(algo) + ": parameters must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) {
      throw ConfigError(std::string(algo) + ": unknown parameter '" + key + "'");
    }
  }
}

template <typename Params>
Params read_params(const json& j, Params p, std::string_view algo,
                   void (*assign)(Params&, const json&)) {
  reject_unknown_keys(j, to_json(p), algo);
  try {
    assign(p, j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string(algo) + ": " + e.what());
  }
  p.validate();
  return p;
}

}  // namespace

ZvcParams zvc_params_from_json(const json& j) {
  return read_params<ZvcParams>(j, {}, "zvc", [](ZvcParams& p, const json& in) {
    p.noise_floor = in.value("noise_floor", p.noise_floor);
    p.min_crossing_channels = in.value("min_crossing_channels", p.min_crossing_channels);
    p.refractory = in.value("refractory", p.refractory);
  });
}

SsavParams ssav_params_from_json(const json& j) {
  return read_params<SsavParams>(j, {}, "ssav", [](SsavParams& p, const json& in) {
    p.window = in.value("window", p.window);
    p.threshold = in.value("threshold", p.threshold);
    p.noise_threshold = in.value("noise_threshold", p.noise_threshold);
  });
}

PcaParams pca_params_from_json(const json& j) {
  return read_params<PcaParams>(j, {}, "pca", [](PcaParams& p, const json& in) {
    p.init_window = in.value("init_window", p.init_window);
    p.retained_energy = in.value("retained_energy", p.retained_energy);
    p.error_ratio_threshold = in.value("error_ratio_threshold", p.error_ratio_threshold);
  });
}

Baseline make_baseline(BaselineKind kind, const json& overrides) {
  switch (kind) {
    case BaselineKind::Zvc: {
      auto p = zvc_params_from_json(overrides);
      return {kind, to_json(p), [p](const Recording& r) { return zvc_segment(r, p); }};
    }
    case BaselineKind::Ssav: {
      auto p = ssav_params_from_json(overrides);
      return {kind, to_json(p), [p](const Recording& r) { return ssav_segment(r, p); }};
    }
    case BaselineKind::Pca: {
      auto p = pca_params_from_json(overrides);
      return {kind, to_json(p), [p](const Recording& r) { return pca_segment(r, p); }};
    }
  }
  throw ConfigError("unknown baseline");
}

}  // namespace segeval
