#include "segeval/cli.hpp"

#include <algorithm>
#include <csignal>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "segeval/baselines.hpp"
#include "segeval/dataset.hpp"
#include "segeval/errors.hpp"
#include "segeval/io.hpp"
#include "segeval/pipeline.hpp"
#include "segeval/server.hpp"
#include "segeval/synthgen.hpp"
#include "segeval/version.hpp"

namespace segeval::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOptions {
  double margin_ms = 200.0;
  double sigma_ms = 66.67;
  double psme_p = 100.0;
  std::string kernel = "gaussian";
  std::string format = "json";
  std::string out;
  bool strict_margin = false;
  std::string psme_source = "margin";

  EvalConfig eval_config() const {
    EvalConfig cfg;
    cfg.margin_ms = margin_ms;
    cfg.sigma_ms = sigma_ms;
    cfg.psme_p = psme_p;
    cfg.kernel = parse_kernel(kernel);
    cfg.strict_margin = strict_margin;
    cfg.psme_source = parse_counting_source(psme_source);
    cfg.validate();
    return cfg;
  }
};

std::string fixed2(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(2) << round_to(v, 2);
  return ss.str();
}

/// Writes `text` to `<out>/<file>` when an output directory is set, else to stdout.
void emit(const GlobalOptions& g, const std::string& file, const std::string& text,
          std::ostream& out) {
  if (g.out.empty()) {
    out << text;
  } else {
    write_text_file(fs::path(g.out) / file, text);
    out << "wrote " << (fs::path(g.out) / file).string() << "\n";
  }
}

std::string serialize(const EvaluationReport& r, const std::string& format) {
  if (format == "csv") return report_to_csv(std::span(&r, 1));
  return to_json(r).dump(2) + "\n";
}

void print_summary(const std::vector<EvaluationReport>& reports, std::ostream& out) {
  out << std::left << std::setw(16) << "recording" << std::setw(8) << "level"
      << "  F1conv  F1marg  F1ink   PSME\n";
  for (const auto& r : reports) {
    for (auto g : kGranularities) {
      out << std::left << std::setw(16) << r.recording_name << std::setw(8) << to_string(g)
          << "  " << fixed2(r.cell(g, Approach::Conventional).measures.f1) << "    "
          << fixed2(r.cell(g, Approach::Margin).measures.f1) << "    "
          << fixed2(r.cell(g, Approach::Ink).measures.f1) << "    " << fixed2(r.psme_at(g).value)
          << "\n";
    }
  }
}

int cmd_evaluate(const GlobalOptions& g, const std::string& rec_path, const std::string& gt_path,
                 const std::string& seg_path, const std::string& plot_path,
                 const std::string& plot_level, double plot_step, std::ostream& out) {
  const auto cfg = g.eval_config();
  const auto rec = load_recording(rec_path, format_from_path(rec_path));
  const auto gt = load_ground_truth(gt_path);
  const auto seg = load_segmentation(seg_path);
  Provenance prov;
  prov.toolkit_version = kToolkitVersion;
  prov.algorithm = "offline";
  auto report = evaluate_recording(rec, gt, seg, cfg, prov);
  report.generated_at = utc_timestamp();
  emit(g, report.recording_name + ".report." + g.format, serialize(report, g.format), out);

  if (!plot_path.empty()) {
    const auto levels = cascade(gt);
    const auto kernel = cfg.kernel_for(rec.frame_rate_hz());
    const auto samples = sample_error_function(levels.at(parse_granularity(plot_level)),
                                               seg.points(), kernel, 0.0,
                                               static_cast<double>(rec.f_max()), plot_step);
    std::string csv = "t,f_s,f_gt,e_c\n";
    for (const auto& s : samples) {
      csv += format_double(s.t) + "," + format_double(s.f_s) + "," + format_double(s.f_gt) + "," +
             format_double(s.e_c) + "\n";
    }
    write_text_file(plot_path, csv);
  }
  return kExitOk;
}

int cmd_scenarios(const GlobalOptions& g, double margin_frames, double sigma_frames,
                  std::ostream& out) {
  const auto rows = score_scenarios(margin_frames, sigma_frames);
  std::string text;
  if (g.format == "csv") {
    text = "scenario,f1,f1_margin,f1_ink,reconstructed\n";
    for (const auto& r : rows) {
      text += std::string(1, r.id) + "," + format_double(r.f1_conventional) + "," +
              format_double(r.f1_margin) + "," + format_double(r.f1_ink) + "," +
              (r.reconstructed ? "true" : "false") + "\n";
    }
  } else {
    std::ostringstream ss;
    ss << "margin " << margin_frames << " frames, sigma " << sigma_frames << " frames\n";
    ss << "scenario  F1     F1^M   F1^InK\n";
    for (const auto& r : rows) {
      ss << r.id << ")        " << fixed2(r.f1_conventional) << "   " << fixed2(r.f1_margin)
         << "   " << fixed2(r.f1_ink) << (r.reconstructed ? "   (reconstructed)" : "") << "\n";
    }
    text = ss.str();
  }
  emit(g, g.format == "csv" ? "scenarios.csv" : "scenarios.txt", text, out);
  return kExitOk;
}

int cmd_generate(const std::string& spec_path, const std::string& out_dir, std::ostream& out) {
  if (out_dir.empty()) throw ConfigError("generate needs --out <dir>");
  const auto dataset = make_dataset(read_json_file(spec_path));
  write_dataset(out_dir, dataset);
  out << "generated " << dataset.entries.size() << " recordings in " << out_dir << "\n";
  return kExitOk;
}

json read_params_file(const std::string& path) {
  return path.empty() ? json::object() : read_json_file(path);
}

int cmd_run(const GlobalOptions& g, const std::string& algo, const std::string& data_dir,
            const std::string& params_path, std::ostream& out) {
  const auto cfg = g.eval_config();
  const auto baseline = make_baseline(parse_baseline_kind(algo), read_params_file(params_path));
  const auto dataset = load_dataset(data_dir);

  Provenance prov;
  prov.toolkit_version = kToolkitVersion;
  prov.dataset_version = dataset.version;
  prov.algorithm = std::string(to_string(baseline.kind));
  prov.algorithm_params = baseline.params;
  prov.data_access = "full";
  auto reports = evaluate_dataset(dataset, baseline.segment, cfg, prov);

  const fs::path dir = g.out.empty() ? fs::path("reports") : fs::path(g.out);
  const auto stamp = utc_timestamp();
  for (auto& r : reports) {
    r.generated_at = stamp;
    write_text_file(dir / (r.recording_name + ".report." + g.format), serialize(r, g.format));
  }
  auto summary_json = to_json(aggregate(reports));
  summary_json["config"] = to_json(cfg);
  summary_json["provenance"] = to_json(prov);
  summary_json["generated_at"] = stamp;
  write_text_file(dir / "aggregate.json", summary_json.dump(2) + "\n");

  print_summary(reports, out);
  out << "wrote " << reports.size() << " reports and aggregate.json to " << dir.string() << "\n";
  return kExitOk;
}

std::sig_atomic_t volatile g_stop = 0;

int cmd_serve(const GlobalOptions& g, const std::string& bind, const std::string& data_dir,
              const std::string& reports_dir, const std::string& params_path, std::ostream& out) {
  const auto cfg = g.eval_config();
  auto [host, port] = parse_endpoint(bind);
  ServerOptions opts;
  opts.host = host;
  opts.port = port;
  opts.report_dir = reports_dir.empty() ? (g.out.empty() ? "reports" : g.out) : reports_dir;
  opts.param_overrides = read_params_file(params_path);
  Server server(load_dataset(data_dir), cfg, opts);
  server.start();
  out << "listening on " << host << ":" << server.port() << ", reports in "
      << opts.report_dir.string() << std::endl;

  g_stop = 0;
  auto handler = [](int) { g_stop = 1; };
  std::signal(SIGINT, handler);
  std::signal(SIGTERM, handler);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  out << "stopped" << std::endl;
  return kExitOk;
}

int cmd_report(const GlobalOptions& g, const std::vector<std::string>& inputs, std::ostream& out) {
  std::vector<EvaluationReport> reports;
  for (const auto& in : inputs) reports.push_back(report_from_json(read_json_file(in)));
  if (g.format == "csv") {
    emit(g, "reports.csv", report_to_csv(reports), out);
  } else {
    for (const auto& r : reports) emit(g, r.recording_name + ".report.json", serialize(r, "json"), out);
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Evaluate time-series segmentation algorithms against hierarchical ground truth",
               "segeval"};
  app.set_version_flag("--version", std::string(kToolkitVersion));
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--margin-ms", g.margin_ms, "Margin approach tolerance in ms")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--sigma-ms", g.sigma_ms, "Gaussian kernel sigma in ms")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--psme-p", g.psme_p, "PSME penalty factor")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  app.add_option("--kernel", g.kernel, "InK kernel")
      ->capture_default_str()
      ->check(CLI::IsMember({"gaussian", "dirac"}));
  app.add_option("--format", g.format, "Output format")
      ->capture_default_str()
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", g.out, "Output directory");
  app.add_flag("--strict-margin", g.strict_margin, "Use |s - g| < margin instead of <=");
  app.add_option("--psme-source", g.psme_source, "Counts used for the PSME penalty term")
      ->capture_default_str()
      ->check(CLI::IsMember({"margin", "conventional"}));

  std::string rec_path, gt_path, seg_path, plot_path, plot_level = "fine";
  double plot_step = 0.1;
  auto* evaluate = app.add_subcommand("evaluate", "Score one segmentation offline");
  evaluate->add_option("--recording", rec_path, "Recording (.json or .csv)")->required();
  evaluate->add_option("--gt", gt_path, "Ground truth JSON")->required();
  evaluate->add_option("--seg", seg_path, "Segmentation JSON")->required();
  evaluate->add_option("--emit-plotdata", plot_path, "Write sampled t,f_s,f_gt,e_c CSV");
  evaluate->add_option("--plot-granularity", plot_level, "Ground-truth level for plot data")
      ->check(CLI::IsMember({"rough", "medium", "fine"}));
  evaluate->add_option("--plot-step", plot_step, "Plot sample spacing in frames")
      ->check(CLI::PositiveNumber);

  double scen_margin = 5.0, scen_sigma = 1.67;
  auto* scenarios = app.add_subcommand("scenarios", "Score the seven toy scenarios");
  scenarios->add_option("--margin-frames", scen_margin)->capture_default_str()->check(CLI::PositiveNumber);
  scenarios->add_option("--sigma-frames", scen_sigma)->capture_default_str()->check(CLI::PositiveNumber);

  std::string spec_path;
  auto* generate = app.add_subcommand("generate", "Write a synthetic dataset");
  generate->add_option("--spec", spec_path, "Generate spec JSON")->required();

  std::string algo, data_dir, params_path;
  auto* run_cmd = app.add_subcommand("run", "Run a baseline over a dataset and evaluate it");
  run_cmd->add_option("--algo", algo, "zvc, ssav or pca")->required();
  run_cmd->add_option("--data", data_dir, "Dataset directory")->required();
  run_cmd->add_option("--params", params_path, "Baseline parameter JSON");

  std::string bind = "127.0.0.1:7878", reports_dir, serve_params;
  auto* serve = app.add_subcommand("serve", "Serve a dataset to algorithms over TCP");
  serve->add_option("--bind", bind, "host:port")->capture_default_str();
  serve->add_option("--data", data_dir, "Dataset directory")->required();
  serve->add_option("--reports", reports_dir, "Report directory");
  serve->add_option("--algo-params", serve_params, "Parameter values pushed to clients");

  std::vector<std::string> report_inputs;
  auto* report = app.add_subcommand("report", "Re-export report JSON (e.g. to CSV)");
  report->add_option("--in", report_inputs, "Report JSON files")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << (dynamic_cast<const CLI::CallForVersion*>(&e) ? std::string(kToolkitVersion) + "\n"
                                                            : app.help());
      return kExitOk;
    }
    err << "segeval: " << e.what() << "\n";
    return kExitInvalidInput;
  }

  try {
    if (*evaluate) {
      return cmd_evaluate(g, rec_path, gt_path, seg_path, plot_path, plot_level, plot_step, out);
    }
    if (*scenarios) return cmd_scenarios(g, scen_margin, scen_sigma, out);
    if (*generate) return cmd_generate(spec_path, g.out, out);
    if (*run_cmd) return cmd_run(g, algo, data_dir, params_path, out);
    if (*serve) return cmd_serve(g, bind, data_dir, reports_dir, serve_params, out);
    if (*report) return cmd_report(g, report_inputs, out);
  } catch (const Error& e) {
    err << "segeval: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    err << "segeval: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInvalidInput;
}

}  // namespace segeval::cli
