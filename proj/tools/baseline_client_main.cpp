// Protocol client that runs one of the built-in baselines against a segeval server.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "segeval/baselines.hpp"
#include "segeval/client.hpp"
#include "segeval/io.hpp"
#include "segeval/server.hpp"

using nlohmann::json;

namespace {

json declared_params(const json& resolved) {
  json out = json::array();
  for (const auto& [name, value] : resolved.items()) {
    out.push_back({{"name", name}, {"type", value.is_number_integer() ? "int" : "float"}, {"default", value}});
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Run a segeval baseline as a protocol client", "segeval-baseline"};
  std::string algo, connect, params_path, mode = "full";
  std::vector<std::string> only;
  app.add_option("--algo", algo, "zvc, ssav or pca")->required();
  app.add_option("--connect", connect, "Server host:port")->required();
  app.add_option("--params", params_path, "Default parameter JSON");
  app.add_option("--mode", mode, "Data access mode")
      ->check(CLI::IsMember({"full", "frame_by_frame"}))
      ->capture_default_str();
  app.add_option("--recording", only, "Recordings to segment (default: all)");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto kind = segeval::parse_baseline_kind(algo);
    const json defaults = params_path.empty() ? json::object() : segeval::read_json_file(params_path);
    const auto [host, port] = segeval::parse_endpoint(connect);

    segeval::ProtocolClient client(host, port);
    const auto hello = client.hello(std::string(segeval::to_string(kind)));
    const auto resolved = segeval::make_baseline(kind, defaults).params;
    const auto values = client.declare_params(declared_params(resolved));
    const auto baseline = segeval::make_baseline(kind, values);

    std::vector<std::string> names = only;
    if (names.empty()) {
      for (const auto& r : hello.at("recordings")) names.push_back(r.at("name").get<std::string>());
    }
    for (const auto& name : names) {
      const auto rec = client.request_recording(name, mode);
      const auto seg = baseline.segment(rec);
      const auto reply = client.report_points(name, seg.points());
      const auto& cells = reply.at("report").at("cells");
      std::cout << name << ": " << seg.points().size() << " points, F1 margin/ink (fine) "
                << cells.at("fine").at("margin").at("measures").at("f1").get<double>() << " / "
                << cells.at("fine").at("ink").at("measures").at("f1").get<double>() << "\n";
    }
    client.bye();
  } catch (const std::exception& e) {
    std::cerr << "segeval-baseline: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
