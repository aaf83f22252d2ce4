// Protocol client: fixed-depth experiments and the flux-style integral.
//
//   uqlb-client run --url 127.0.0.1:4242 --n 100 --depth 2 --box gs2 --out results/manual
//   uqlb-client run --plan plan.json --out results/manual
//   uqlb-client qoi --url 127.0.0.1:4242 --config qoi.json
//   uqlb-client info --url 127.0.0.1:4242
//
// Exit codes: 0 success, 1 evaluation failures, 2 usage or input error.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "uqlb/clients/experiment.hpp"
#include "uqlb/clients/qoi.hpp"
#include "uqlb/error.hpp"
#include "uqlb/metrics.hpp"
#include "uqlb/text.hpp"

namespace {

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw uqlb::Error(uqlb::ErrorCode::IoError, "cannot read " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw uqlb::Error(uqlb::ErrorCode::MalformedBody, path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace uqlb;

  CLI::App app{"uqlb protocol client"};
  app.require_subcommand(1);
  std::string url;
  std::string name = "modelname";
  app.add_option("--url", url, "server or balancer, host:port or http://host:port");
  app.add_option("--name", name, "model name")->capture_default_str();

  auto* run = app.add_subcommand("run", "keep a fixed number of evaluations in flight");
  std::string plan_file;
  std::string box = "gs2";
  std::vector<double> fixed;
  std::size_t n = 100;
  std::size_t depth = 2;
  std::uint64_t seed = 0;
  std::string out_dir;
  run->add_option("--plan", plan_file, "JSON experiment plan (flags below override it)");
  run->add_option("--n", n, "evaluations")->capture_default_str();
  run->add_option("--depth", depth, "evaluations in flight")->capture_default_str();
  run->add_option("--seed", seed, "LHS seed")->capture_default_str();
  run->add_option("--box", box, "'gs2' or a JSON parameter box file")->capture_default_str();
  run->add_option("--fixed", fixed, "use this input vector for every evaluation instead of LHS");
  run->add_option("--out", out_dir, "write records.csv, summary.json and box.csv here");

  auto* qoi = app.add_subcommand("qoi", "integrate a model output over (k_y, theta)");
  std::string qoi_file;
  qoi->add_option("--config", qoi_file, "JSON quantity-of-interest config");

  auto* info = app.add_subcommand("info", "print the server's models and shapes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*info) {
      if (url.empty()) throw Error(ErrorCode::InvalidArgument, "--url is required");
      const auto si = protocol::get_info(url);
      std::cout << "protocol " << si.protocol_version << '\n';
      for (const auto& m : si.models) {
        std::cout << m << ": inputs";
        for (auto s : protocol::get_input_sizes(url, m)) std::cout << ' ' << s;
        std::cout << ", outputs";
        for (auto s : protocol::get_output_sizes(url, m)) std::cout << ' ' << s;
        std::cout << '\n';
      }
      return 0;
    }

    if (*qoi) {
      clients::QoIConfig cfg;
      if (!qoi_file.empty()) cfg = clients::qoi_config_from_json(read_json_file(qoi_file));
      if (url.empty()) throw Error(ErrorCode::InvalidArgument, "--url is required");
      if (app.get_option("--name")->count() > 0) cfg.model_name = name;
      std::cout << std::setprecision(17) << clients::qoi_integral(url, cfg) << '\n';
      return 0;
    }

    clients::ExperimentPlan plan;
    if (!plan_file.empty()) plan = clients::experiment_plan_from_json(read_json_file(plan_file));
    if (!url.empty()) plan.model_url = url;
    if (plan.model_url.empty()) throw Error(ErrorCode::InvalidArgument, "--url or a plan with url is required");
    auto given = [&](const char* opt) { return run->get_option(opt)->count() > 0; };
    if (plan_file.empty() || app.get_option("--name")->count() > 0) plan.model_name = name;
    if (plan_file.empty() || given("--n")) plan.n_evaluations = n;
    if (plan_file.empty() || given("--depth")) plan.queue_depth = depth;
    if (plan_file.empty() || given("--seed")) plan.seed = seed;
    if (!fixed.empty()) {
      plan.box.reset();
      plan.fixed = {fixed};
    } else if (plan_file.empty() || given("--box")) {
      plan.fixed.clear();
      plan.box = box == "gs2" ? gs2_parameter_box() : parameter_box_from_json(read_json_file(box));
    }
    plan.validate();

    const auto result = clients::run_experiment(plan);
    std::cerr << result.records.size() << "/" << plan.n_evaluations << " evaluations succeeded, max in flight "
              << result.max_in_flight << std::endl;
    for (const auto& msg : result.failure_messages) std::cerr << "  " << msg << '\n';
    if (!result.records.empty()) {
      const auto summary = metrics::summarize(result.records, result.wall_span);
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        metrics::write_records_csv(std::filesystem::path(out_dir) / "records.csv", summary.per_task);
        metrics::write_summary_json(std::filesystem::path(out_dir) / "summary.json", summary,
                                    {{"depth", plan.queue_depth}, {"seed", plan.seed}, {"source", "client"}});
        metrics::write_box_csv(std::filesystem::path(out_dir) / "box.csv", summary.box);
      } else {
        std::cout << metrics::summary_to_json(summary).dump(2) << '\n';
      }
    }
    return result.complete ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "uqlb-client: " << e.what() << std::endl;
    return e.code() == ErrorCode::InvalidArgument || e.code() == ErrorCode::MalformedBody ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "uqlb-client: " << e.what() << std::endl;
    return 1;
  }
}
