#include "segeval/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "segeval/errors.hpp"
#include "segeval/io.hpp"
#include "segeval/version.hpp"

namespace segeval {

using nlohmann::json;

std::string_view to_string(Approach a) {
  switch (a) {
    case Approach::Conventional:
      return "conventional";
    case Approach::Margin:
      return "margin";
    case Approach::Ink:
      return "ink";
  }
  return "unknown";
}

Approach parse_approach(std::string_view s) {
  for (auto a : kApproaches) {
    if (to_string(a) == s) return a;
  }
  throw ParseError("unknown approach '" + std::string(s) + "'");
}

const std::vector<double>& GranularityCascade::at(Granularity g) const {
  switch (g) {
    case Granularity::Rough:
      return rough;
    case Granularity::Medium:
      return medium;
    case Granularity::Fine:
      break;
  }
  return fine;
}

GranularityCascade cascade(const GroundTruth& gt) {
  GranularityCascade c;
  for (const auto& p : gt.points()) {
    if (p.granularity == Granularity::Rough) c.rough.push_back(p.frame);
    if (p.granularity <= Granularity::Medium) c.medium.push_back(p.frame);
    c.fine.push_back(p.frame);
  }
  return c;
}

void EvalConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
  };
  positive(margin_ms, "margin_ms");
  positive(sigma_ms, "sigma_ms");
  positive(quadrature_divisor, "quadrature_divisor");
  if (quadrature_divisor <= 1) throw ConfigError("quadrature_divisor must exceed 1");
  if (support_sigmas < 4) throw ConfigError("support_sigmas must be at least 4");
  if (!(psme_p >= 0) || !std::isfinite(psme_p)) throw ConfigError("psme_p must be non-negative");
}

MarginConfig EvalConfig::margin_for(double frame_rate_hz) const {
  return MarginConfig{time_ms_to_frames(margin_ms, frame_rate_hz), strict_margin};
}

KernelConfig EvalConfig::kernel_for(double frame_rate_hz) const {
  KernelConfig k;
  k.kernel = kernel;
  k.sigma = time_ms_to_frames(sigma_ms, frame_rate_hz);
  k.quadrature_step = k.sigma / quadrature_divisor;
  k.support_radius = k.sigma * support_sigmas;
  return k;
}

json to_json(const EvalConfig& cfg) {
  return json{{"margin_ms", cfg.margin_ms},
              {"sigma_ms", cfg.sigma_ms},
              {"psme_p", cfg.psme_p},
              {"kernel", to_string(cfg.kernel)},
              {"strict_margin", cfg.strict_margin},
              {"psme_source", to_string(cfg.psme_source)},
              {"quadrature_divisor", cfg.quadrature_divisor},
              {"support_sigmas", cfg.support_sigmas},
              {"psme_distance_unit", "frames^2"}};
}

EvalConfig eval_config_from_json(const json& j) {
  EvalConfig cfg;
  try {
    cfg.margin_ms = j.value("margin_ms", cfg.margin_ms);
    cfg.sigma_ms = j.value("sigma_ms", cfg.sigma_ms);
    cfg.psme_p = j.value("psme_p", cfg.psme_p);
    cfg.kernel = parse_kernel(j.value("kernel", std::string(to_string(cfg.kernel))));
    cfg.strict_margin = j.value("strict_margin", cfg.strict_margin);
    cfg.psme_source =
        parse_counting_source(j.value("psme_source", std::string(to_string(cfg.psme_source))));
    cfg.quadrature_divisor = j.value("quadrature_divisor", cfg.quadrature_divisor);
    cfg.support_sigmas = j.value("support_sigmas", cfg.support_sigmas);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

json to_json(const Provenance& p) {
  json j{{"toolkit_version", p.toolkit_version},
         {"dataset_version", p.dataset_version},
         {"algorithm", p.algorithm},
         {"algorithm_params", p.algorithm_params},
         {"data_access", p.data_access},
         {"training_api_used", p.training_api_used},
         {"trained", p.trained},
         {"fold", nullptr}};
  if (p.fold) j["fold"] = *p.fold;
  return j;
}

Provenance provenance_from_json(const json& j) {
  Provenance p;
  try {
    p.toolkit_version = j.at("toolkit_version").get<std::string>();
    p.dataset_version = j.at("dataset_version").get<std::string>();
    p.algorithm = j.at("algorithm").get<std::string>();
    p.algorithm_params = j.value("algorithm_params", json::object());
    p.data_access = j.at("data_access").get<std::string>();
    p.training_api_used = j.value("training_api_used", false);
    p.trained = j.value("trained", false);
    if (j.contains("fold") && !j["fold"].is_null()) p.fold = j["fold"].get<int>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("provenance: ") + e.what());
  }
  return p;
}

EvaluationReport evaluate_recording(const Recording& rec, const GroundTruth& gt,
                                    const SegmentationResult& seg, const EvalConfig& cfg,
                                    Provenance provenance) {
  cfg.validate();
  if (gt.recording_name() != rec.name() || seg.recording_name() != rec.name()) {
    throw MismatchError("recording '" + rec.name() + "', ground truth '" +
                        gt.recording_name() + "' and segmentation '" + seg.recording_name() +
                        "' do not match");
  }
  const auto f_max = rec.f_max();
  gt.check_range(f_max);
  check_points_in_range(seg.points(), f_max, "segmentation '" + seg.recording_name() + "'");

  if (provenance.toolkit_version.empty()) provenance.toolkit_version = kToolkitVersion;
  if (provenance.dataset_version.empty()) provenance.dataset_version = "unversioned";
  if (provenance.algorithm.empty()) provenance.algorithm = "external";
  if (provenance.data_access.empty()) provenance.data_access = "full";

  EvaluationReport r;
  r.recording_name = rec.name();
  r.f_max = f_max;
  r.frame_rate_hz = rec.frame_rate_hz();
  r.algorithm_points = seg.points().size();
  r.config = cfg;
  r.provenance = std::move(provenance);

  const auto margin = cfg.margin_for(rec.frame_rate_hz());
  const auto kernel = cfg.kernel_for(rec.frame_rate_hz());
  const PsmeConfig psme_cfg{cfg.psme_p, cfg.psme_source};
  const auto levels = cascade(gt);
  const auto& alg = seg.points();

  for (auto g : kGranularities) {
    const auto& truth = levels.at(g);
    auto& row = r.cells[static_cast<std::size_t>(g)];
    row[0].counts = classify_conventional(truth, alg, f_max);
    row[1].counts = classify_margin(truth, alg, f_max, margin);
    row[2].counts = classify_ink(truth, alg, f_max, kernel);
    for (auto& cell : row) cell.measures = compute_measures(cell.counts);
    r.psme[static_cast<std::size_t>(g)] = compute_psme(truth, alg, f_max, psme_cfg, margin);
  }
  return r;
}

namespace {

json counts_json(const ConfusionCounts& c) {
  return json{{"tp", c.tp}, {"tn", c.tn}, {"fp", c.fp}, {"fn", c.fn}, {"f_max", c.f_max}};
}

json measures_json(const MeasureSet& m) {
  return json{{"precision", m.precision}, {"recall", m.recall},
              {"accuracy", m.accuracy},   {"f1", m.f1},
              {"f1_class", m.f1_class},   {"mcc", m.mcc}};
}

json grid_json(const CellGrid& grid) {
  json cells = json::object();
  for (auto g : kGranularities) {
    json row = json::object();
    for (auto a : kApproaches) {
      const auto& c = grid[static_cast<std::size_t>(g)][static_cast<std::size_t>(a)];
      row[std::string(to_string(a))] = {{"counts", counts_json(c.counts)},
                                        {"measures", measures_json(c.measures)}};
    }
    cells[std::string(to_string(g))] = std::move(row);
  }
  return cells;
}

ConfusionCounts counts_from_json(const json& j) {
  ConfusionCounts c;
  c.tp = j.at("tp").get<double>();
  c.tn = j.at("tn").get<double>();
  c.fp = j.at("fp").get<double>();
  c.fn = j.at("fn").get<double>();
  c.f_max = j.at("f_max").get<std::int64_t>();
  return c;
}

MeasureSet measures_from_json(const json& j) {
  MeasureSet m;
  m.precision = j.at("precision").get<double>();
  m.recall = j.at("recall").get<double>();
  m.accuracy = j.at("accuracy").get<double>();
  m.f1 = j.at("f1").get<double>();
  m.f1_class = j.at("f1_class").get<double>();
  m.mcc = j.at("mcc").get<double>();
  return m;
}

}  // namespace

json to_json(const EvaluationReport& r) {
  const auto margin = r.config.margin_for(r.frame_rate_hz);
  const auto kernel = r.config.kernel_for(r.frame_rate_hz);
  json config = to_json(r.config);
  config["resolved"] = {{"margin_frames", margin.margin},
                        {"sigma_frames", kernel.sigma},
                        {"quadrature_step_frames", kernel.quadrature_step},
                        {"support_radius_frames", kernel.support_radius}};

  json psme = json::object();
  json psme_flags = json::object();
  for (auto g : kGranularities) {
    psme[std::string(to_string(g))] = r.psme_at(g).value;
    psme_flags[std::string(to_string(g))] = r.psme_at(g).min_term_undefined;
  }
  return json{{"schema_version", kReportSchemaVersion},
              {"toolkit_version", r.provenance.toolkit_version},
              {"dataset_version", r.provenance.dataset_version},
              {"recording", r.recording_name},
              {"f_max", r.f_max},
              {"frame_rate_hz", r.frame_rate_hz},
              {"algorithm_points", r.algorithm_points},
              {"generated_at", r.generated_at},
              {"config", std::move(config)},
              {"provenance", to_json(r.provenance)},
              {"cells", grid_json(r.cells)},
              {"psme", std::move(psme)},
              {"psme_min_term_undefined", std::move(psme_flags)}};
}

EvaluationReport report_from_json(const json& j) {
  EvaluationReport r;
  try {
    if (j.at("schema_version").get<int>() != kReportSchemaVersion) {
      throw ParseError("unsupported report schema version");
    }
    r.recording_name = j.at("recording").get<std::string>();
    r.f_max = j.at("f_max").get<std::int64_t>();
    r.frame_rate_hz = j.at("frame_rate_hz").get<double>();
    r.algorithm_points = j.value("algorithm_points", std::size_t{0});
    r.generated_at = j.value("generated_at", std::string());
    r.config = eval_config_from_json(j.at("config"));
    r.provenance = provenance_from_json(j.at("provenance"));
    for (auto g : kGranularities) {
      const auto gname = std::string(to_string(g));
      for (auto a : kApproaches) {
        const auto& cj = j.at("cells").at(gname).at(std::string(to_string(a)));
        auto& cell = r.cells[static_cast<std::size_t>(g)][static_cast<std::size_t>(a)];
        cell.counts = counts_from_json(cj.at("counts"));
        cell.measures = measures_from_json(cj.at("measures"));
      }
      auto& p = r.psme[static_cast<std::size_t>(g)];
      p.value = j.at("psme").at(gname).get<double>();
      p.min_term_undefined = j.value("psme_min_term_undefined", json::object()).value(gname, false);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("report: ") + e.what());
  }
  return r;
}

std::string report_to_csv(std::span<const EvaluationReport> reports) {
  std::string out = kReportCsvHeader;
  out += "\n";
  for (const auto& r : reports) {
    for (auto g : kGranularities) {
      for (auto a : kApproaches) {
        const auto& c = r.cell(g, a);
        const double fields[] = {c.counts.tp,          c.counts.tn,         c.counts.fp,
                                 c.counts.fn,          c.measures.precision, c.measures.recall,
                                 c.measures.accuracy,  c.measures.f1,        c.measures.f1_class,
                                 c.measures.mcc,       r.psme_at(g).value};
        out += r.recording_name;
        out += ",";
        out += to_string(g);
        out += ",";
        out += to_string(a);
        for (double v : fields) {
          out += ",";
          out += format_double(v);
        }
        out += "\n";
      }
    }
  }
  return out;
}

int FoldAssignment::fold_of(const std::string& name) const {
  auto it = folds_.find(name);
  if (it == folds_.end()) throw DomainError("recording '" + name + "' has no fold");
  return it->second;
}

std::vector<std::string> FoldAssignment::members(int fold) const {
  std::vector<std::string> out;
  for (const auto& [name, f] : folds_) {
    if (f == fold) out.push_back(name);
  }
  return out;
}

std::array<std::size_t, FoldAssignment::kFolds> FoldAssignment::sizes() const {
  std::array<std::size_t, kFolds> s{};
  for (const auto& entry : folds_) ++s[static_cast<std::size_t>(entry.second)];
  return s;
}

FoldAssignment make_folds(std::vector<std::string> names) {
  if (names.size() < FoldAssignment::kFolds) {
    throw InsufficientDataError("five-fold cross-validation needs at least 5 recordings, got " +
                                std::to_string(names.size()));
  }
  std::sort(names.begin(), names.end());
  if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
    throw DomainError("duplicate recording names in dataset");
  }
  std::map<std::string, int> folds;
  for (std::size_t i = 0; i < names.size(); ++i) {
    folds.emplace(names[i], static_cast<int>(i % FoldAssignment::kFolds));
  }
  return FoldAssignment(std::move(folds));
}

DatasetSummary aggregate(std::span<const EvaluationReport> reports) {
  if (reports.empty()) throw InsufficientDataError("cannot aggregate an empty report list");
  DatasetSummary s;
  const auto n = static_cast<double>(reports.size());
  for (const auto& r : reports) {
    s.recordings.push_back(r.recording_name);
    for (std::size_t g = 0; g < 3; ++g) {
      for (std::size_t a = 0; a < 3; ++a) {
        auto& pooled = s.pooled[g][a].counts;
        const auto& c = r.cells[g][a].counts;
        pooled.tp += c.tp;
        pooled.tn += c.tn;
        pooled.fp += c.fp;
        pooled.fn += c.fn;
        pooled.f_max += c.f_max;
        auto& mean = s.mean[g][a];
        const auto& m = r.cells[g][a].measures;
        mean.precision += m.precision / n;
        mean.recall += m.recall / n;
        mean.accuracy += m.accuracy / n;
        mean.f1 += m.f1 / n;
        mean.f1_class += m.f1_class / n;
        mean.mcc += m.mcc / n;
      }
      s.psme_sum[g] += r.psme[g].value;
    }
  }
  for (std::size_t g = 0; g < 3; ++g) {
    for (auto& cell : s.pooled[g]) cell.measures = compute_measures(cell.counts);
    s.psme_mean[g] = s.psme_sum[g] / n;
  }
  return s;
}

json to_json(const DatasetSummary& s) {
  json mean = json::object();
  json psme = json::object();
  for (auto g : kGranularities) {
    const auto gi = static_cast<std::size_t>(g);
    json row = json::object();
    for (auto a : kApproaches) {
      row[std::string(to_string(a))] = measures_json(s.mean[gi][static_cast<std::size_t>(a)]);
    }
    mean[std::string(to_string(g))] = std::move(row);
    psme[std::string(to_string(g))] = {{"sum", s.psme_sum[gi]}, {"mean", s.psme_mean[gi]}};
  }
  return json{{"schema_version", kReportSchemaVersion},
              {"recordings", s.recordings},
              {"pooled_counts", grid_json(s.pooled)},
              {"mean_of_scores", std::move(mean)},
              {"psme", std::move(psme)}};
}

}  // namespace segeval
