#include "segeval/synthgen.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "segeval/classifiers.hpp"
#include "segeval/errors.hpp"
#include "segeval/measures.hpp"

namespace segeval {

using nlohmann::json;

std::vector<ScenarioSpec> make_scenarios() {
  const std::vector<double> gt{20, 50, 80};
  constexpr std::int64_t f_max = 100;
  // Offsets of the three paired points (the last one carries the extra 10
  // frames from d on); each step adds to the preceding scenario.
  auto shifted = [](double paired, double last) {
    return std::vector<double>{20 + paired, 35, 50 + paired, 80 + last};
  };
  return {
      {'a', gt, {20, 50, 80}, f_max, false},
      {'b', gt, {21, 51, 81}, f_max, false},
      {'c', gt, {21, 35, 51, 81}, f_max, true},
      {'d', gt, shifted(1, 10), f_max, true},
      {'e', gt, shifted(2, 11), f_max, true},
      {'f', gt, shifted(6, 15), f_max, true},
      {'g', gt, shifted(11, 20), f_max, false},
  };
}

std::vector<ScenarioScores> score_scenarios(double margin_frames, double sigma_frames) {
  const MarginConfig margin{margin_frames, false};
  const auto kernel = KernelConfig::gaussian(sigma_frames);
  std::vector<ScenarioScores> out;
  for (const auto& s : make_scenarios()) {
    out.push_back(
        {s.id,
         compute_measures(classify_conventional(s.gt_points, s.alg_points, s.f_max)).f1,
         compute_measures(classify_margin(s.gt_points, s.alg_points, s.f_max, margin)).f1,
         compute_measures(classify_ink(s.gt_points, s.alg_points, s.f_max, kernel)).f1,
         s.reconstructed});
  }
  return out;
}

namespace {

bool is_periodic(const std::string& kind) { return kind != "still" && kind != "ramp"; }

const std::set<std::string>& known_kinds() {
  static const std::set<std::string> kinds{"still", "ramp",  "jump",  "walk",    "wave",
                                           "kick",  "punch", "squat", "periodic"};
  return kinds;
}

}  // namespace

void SynthSpec::validate() const {
  if (!(frame_rate_hz > 0)) throw ConfigError("synth '" + name + "': frame_rate_hz must be positive");
  if (!(noise_std >= 0)) throw ConfigError("synth '" + name + "': noise_std must be non-negative");
  if (activities.empty()) throw ConfigError("synth '" + name + "': no activities");
  const std::size_t channels = activities.front().amplitudes.size();
  if (channels == 0) throw ConfigError("synth '" + name + "': activities need amplitudes");
  for (const auto& a : activities) {
    if (!known_kinds().contains(a.kind)) {
      throw ConfigError("synth '" + name + "': unknown activity kind '" + a.kind + "'");
    }
    if (a.amplitudes.size() != channels) {
      throw ConfigError("synth '" + name + "': every activity needs " + std::to_string(channels) +
                        " amplitudes");
    }
    if (a.repetitions < 1) throw ConfigError("synth '" + name + "': repetitions must be >= 1");
    if (a.frames < 2 * a.repetitions || a.frames < 2) {
      throw ConfigError("synth '" + name + "': activity '" + a.kind + "' too short (" +
                        std::to_string(a.frames) + " frames)");
    }
  }
}

SyntheticRecording make_recording(const SynthSpec& spec) {
  spec.validate();
  const std::size_t d = spec.activities.front().amplitudes.size();
  std::size_t total = 0;
  for (const auto& a : spec.activities) total += static_cast<std::size_t>(a.frames);

  std::vector<double> samples;
  samples.reserve(total * d);
  std::vector<double> pose(d, 0.0);
  std::vector<LabelledPoint> labels;

  std::size_t offset = 0;
  for (std::size_t ai = 0; ai < spec.activities.size(); ++ai) {
    const auto& a = spec.activities[ai];
    if (ai > 0) labels.push_back({static_cast<double>(offset), Granularity::Rough});
    const auto frames = static_cast<std::size_t>(a.frames);
    const double reps = a.repetitions;
    for (std::size_t t = 0; t < frames; ++t) {
      const double u = static_cast<double>(t) / static_cast<double>(frames);
      for (std::size_t c = 0; c < d; ++c) {
        double q = pose[c];
        if (a.kind == "ramp") {
          q += a.amplitudes[c] * u;
        } else if (is_periodic(a.kind)) {
          q += a.amplitudes[c] * 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * reps * u));
        }
        samples.push_back(q);
      }
    }
    if (a.kind == "ramp") {
      for (std::size_t c = 0; c < d; ++c) pose[c] += a.amplitudes[c];
    }
    if (is_periodic(a.kind)) {
      for (int r = 0; r < a.repetitions; ++r) {
        const double start = static_cast<double>(frames) * r / reps;
        const double mid = static_cast<double>(frames) * (r + 0.5) / reps;
        if (r > 0) {
          labels.push_back(
              {static_cast<double>(offset) + std::round(start), Granularity::Medium});
        }
        labels.push_back({static_cast<double>(offset) + std::round(mid), Granularity::Fine});
      }
    }
    offset += frames;
  }

  if (spec.noise_std > 0) {
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, spec.noise_std);
    for (double& s : samples) s += noise(rng);
  }

  std::vector<std::string> channels;
  for (std::size_t c = 0; c < d; ++c) channels.push_back("q" + std::to_string(c));
  return {Recording(spec.name, spec.frame_rate_hz, std::move(channels), std::move(samples)),
          GroundTruth(spec.name, std::move(labels))};
}

namespace {

Activity activity_from_json(const json& j) {
  Activity a;
  a.kind = j.at("kind").get<std::string>();
  a.frames = j.at("frames").get<int>();
  a.repetitions = j.value("repetitions", 1);
  a.amplitudes = j.at("amplitudes").get<std::vector<double>>();
  return a;
}

}  // namespace

SynthSpec synth_spec_from_json(const json& j) {
  SynthSpec s;
  try {
    s.name = j.value("name", s.name);
    s.seed = j.value("seed", s.seed);
    s.frame_rate_hz = j.value("frame_rate_hz", s.frame_rate_hz);
    s.noise_std = j.value("noise_std", s.noise_std);
    for (const auto& a : j.at("activities")) s.activities.push_back(activity_from_json(a));
  } catch (const json::exception& e) {
    throw ConfigError("synth spec: " + std::string(e.what()));
  }
  s.validate();
  return s;
}

json to_json(const SynthSpec& spec) {
  json acts = json::array();
  for (const auto& a : spec.activities) {
    acts.push_back({{"kind", a.kind},
                    {"frames", a.frames},
                    {"repetitions", a.repetitions},
                    {"amplitudes", a.amplitudes}});
  }
  return {{"name", spec.name},
          {"seed", spec.seed},
          {"frame_rate_hz", spec.frame_rate_hz},
          {"noise_std", spec.noise_std},
          {"activities", std::move(acts)}};
}

Dataset make_dataset(const json& generate_spec) {
  Dataset ds;
  try {
    ds.name = generate_spec.value("name", ds.name);
    ds.version = generate_spec.value("version", ds.version);
    const auto& recs = generate_spec.at("recordings");
    if (!recs.is_array() || recs.empty()) throw ConfigError("generate spec: no recordings");
    std::uint64_t index = 0;
    for (const auto& r : recs) {
      json merged = r;
      const std::uint64_t base_seed = generate_spec.value("seed", std::uint64_t{0});
      if (!merged.contains("seed")) merged["seed"] = base_seed + index;
      for (const char* key : {"frame_rate_hz", "noise_std"}) {
        if (!merged.contains(key) && generate_spec.contains(key)) merged[key] = generate_spec[key];
      }
      if (!merged.contains("name")) merged["name"] = "rec" + std::to_string(index);
      auto synth = make_recording(synth_spec_from_json(merged));
      ds.entries.push_back({std::move(synth.recording), std::move(synth.ground_truth)});
      ++index;
    }
  } catch (const json::exception& e) {
    throw ConfigError("generate spec: " + std::string(e.what()));
  }
  std::set<std::string> names;
  for (const auto& e : ds.entries) {
    if (!names.insert(e.recording.name()).second) {
      throw ConfigError("generate spec: duplicate recording name '" + e.recording.name() + "'");
    }
  }
  std::sort(ds.entries.begin(), ds.entries.end(), [](const auto& a, const auto& b) {
    return a.recording.name() < b.recording.name();
  });
  return ds;
}

Dataset make_demo_dataset(std::size_t recordings, std::uint64_t seed, double noise_std) {
  // Activity templates cycled across recordings; three channels each.
  const std::vector<std::vector<Activity>> templates{
      {{"jump", 100, 1, {0.8, 0.4, 0.0}},
       {"walk", 300, 3, {0.5, 0.0, 0.6}},
       {"still", 80, 1, {0, 0, 0}},
       {"wave", 240, 4, {0.0, 0.9, 0.3}}},
      {{"still", 60, 1, {0, 0, 0}},
       {"squat", 200, 2, {0.7, 0.7, 0.0}},
       {"ramp", 60, 1, {0.3, -0.2, 0.1}},
       {"kick", 300, 3, {0.0, 0.4, 0.9}}},
      {{"punch", 240, 4, {0.6, 0.0, 0.2}},
       {"still", 80, 1, {0, 0, 0}},
       {"walk", 360, 3, {0.4, 0.5, 0.0}}},
  };
  json spec{{"name", "demo"}, {"version", "demo-1"}, {"seed", seed}, {"noise_std", noise_std}};
  json recs = json::array();
  for (std::size_t i = 0; i < recordings; ++i) {
    SynthSpec s;
    s.name = "demo" + std::string(i < 10 ? "0" : "") + std::to_string(i);
    s.activities = templates[i % templates.size()];
    json r = to_json(s);
    r.erase("seed");
    r.erase("noise_std");
    r.erase("frame_rate_hz");
    recs.push_back(std::move(r));
  }
  spec["recordings"] = std::move(recs);
  return make_dataset(spec);
}

}  // namespace segeval
