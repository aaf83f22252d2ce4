// Benchmark harness over the suite files in suites/.
//
//   bench run eigen-100 --mode both --depth 2          live, process backend
//   bench run gp --mode bulk --depth 10 --sim          simulated
//   bench compare results/eigen-100/perjob results/eigen-100/bulk
//   bench sim synthetic-gs2 --seeds 20                 simulator-only sweep
//
// Exit codes: 0 success, 1 an experiment failed, 2 usage or input error.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>

#include <CLI11.hpp>

#include "uqlb/bench.hpp"
#include "uqlb/error.hpp"
#include "uqlb/text.hpp"

#ifndef UQLB_SUITES_DIR
#define UQLB_SUITES_DIR "suites"
#endif

namespace {

using namespace uqlb;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::filesystem::path sibling_binary(const std::string& name) {
  std::error_code ec;
  const auto self = std::filesystem::read_symlink("/proc/self/exe", ec);
  return ec ? std::filesystem::path(name) : self.parent_path() / name;
}

std::vector<bench::BenchmarkSuite> resolve_suites(const std::filesystem::path& dir, const std::string& name) {
  std::vector<bench::BenchmarkSuite> out;
  if (name == "default" || name == "all") {
    for (const auto& n : bench::list_suites(dir)) {
      auto s = bench::find_suite(dir, n);
      if (name == "all" || s.in_default) out.push_back(std::move(s));
    }
    if (out.empty()) throw Error(ErrorCode::InvalidArgument, "no suites in " + dir.string());
  } else {
    out.push_back(bench::find_suite(dir, name));
  }
  return out;
}

struct SweepRow {
  double makespan = 0.0;
  double overhead = 0.0;
  double overhead_per_task = 0.0;
  double slr = 0.0;
  double min_slr = 0.0;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uqlb benchmark harness"};
  app.require_subcommand(1);
  std::string suites_dir = UQLB_SUITES_DIR;
  app.add_option("--suites-dir", suites_dir, "directory of suite definitions")->capture_default_str();

  // run
  auto* run = app.add_subcommand("run", "run a suite's experiment matrix");
  std::string run_suite_name;
  std::string run_mode = "both";
  std::vector<std::size_t> run_depths;
  bool run_sim = false;
  std::string run_backend = "process";
  std::string results_dir = "results";
  std::string server_bin = sibling_binary("uqlb-model-server").string();
  std::optional<std::size_t> run_n;
  run->add_option("suite", run_suite_name, "suite name, or 'default' / 'all'")->required();
  run->add_option("--mode", run_mode, "perjob | bulk | both")->capture_default_str();
  run->add_option("--depth", run_depths, "queue depth (repeatable; default: the suite's)");
  run->add_flag("--sim", run_sim, "replay through the scheduler simulator instead of live servers");
  run->add_option("--backend", run_backend, "live backend: process | emulated")->capture_default_str();
  run->add_option("--results", results_dir, "results root")->capture_default_str();
  run->add_option("--server-bin", server_bin, "model server executable")->capture_default_str();
  run->add_option("--n", run_n, "evaluations per experiment (default: the suite's)");

  // compare
  auto* cmp = app.add_subcommand("compare", "compare two result trees key by key");
  std::string cmp_a;
  std::string cmp_b;
  std::string cmp_json;
  cmp->add_option("a", cmp_a, "baseline results, e.g. results/eigen-100/perjob")->required();
  cmp->add_option("b", cmp_b, "candidate results, e.g. results/eigen-100/bulk")->required();
  cmp->add_option("--json", cmp_json, "also write the table as JSON");

  // sim
  auto* sim = app.add_subcommand("sim", "simulator-only sweep over seeds");
  std::string sim_suite_name;
  std::string sim_mode = "both";
  std::vector<std::size_t> sim_depths;
  std::size_t sim_seeds = 20;
  std::string sim_json;
  sim->add_option("suite", sim_suite_name, "suite name, or 'default' / 'all'")->required();
  sim->add_option("--mode", sim_mode, "perjob | bulk | both")->capture_default_str();
  sim->add_option("--depth", sim_depths, "queue depth (repeatable; default: the suite's)");
  sim->add_option("--seeds", sim_seeds, "seeds 0..K-1")->capture_default_str()->check(CLI::PositiveNumber);
  sim->add_option("--json", sim_json, "also write the sweep as JSON");

  // list
  auto* list = app.add_subcommand("list", "list the known suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*list) {
      for (const auto& name : bench::list_suites(suites_dir)) {
        const auto s = bench::find_suite(suites_dir, name);
        std::cout << std::left << std::setw(16) << name << (s.in_default ? "" : "(not in default) ")
                  << s.description << '\n';
      }
      return 0;
    }

    if (*run) {
      const auto suites = resolve_suites(suites_dir, run_suite_name);
      bench::RunOptions opts;
      opts.modes = bench::parse_modes(run_mode);
      opts.depths = run_depths;
      opts.sim = run_sim;
      opts.results_dir = results_dir;
      opts.log = &std::cout;
      opts.live.backend = bench::parse_live_backend(run_backend);
      opts.live.model_server_bin = server_bin;
      opts.live.n_evaluations = run_n;
      if (!run_sim && opts.live.backend == bench::LiveBackend::Process && !std::filesystem::exists(server_bin)) {
        throw Error(ErrorCode::InvalidArgument, "model server not found at " + server_bin);
      }
      std::size_t failed = 0;
      for (const auto& suite : suites) {
        const auto report = bench::run_suite(suite, opts);
        failed += report.failed;
        for (const auto& f : report.failures) std::cerr << "bench: " << f << '\n';
      }
      return failed == 0 ? 0 : kExitFailure;
    }

    if (*cmp) {
      const auto rows = bench::compare(cmp_a, cmp_b);
      bench::write_comparison(std::cout, rows);
      if (!cmp_json.empty()) {
        std::ofstream out(cmp_json);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + cmp_json);
        out << bench::comparison_to_json(rows).dump(2) << '\n';
      }
      return 0;
    }

    if (*sim) {
      const auto suites = resolve_suites(suites_dir, sim_suite_name);
      const auto modes = bench::parse_modes(sim_mode);
      nlohmann::json all = nlohmann::json::array();
      std::cout << std::left << std::setw(16) << "suite" << std::setw(8) << "mode" << std::right << std::setw(6)
                << "depth" << std::setw(14) << "makespan_s" << std::setw(14) << "overhead_s" << std::setw(16)
                << "overhead/task" << std::setw(9) << "slr" << std::setw(9) << "min_slr" << '\n';
      for (const auto& suite : suites) {
        for (const auto mode : modes) {
          for (std::size_t depth : sim_depths.empty() ? suite.depths : sim_depths) {
            SweepRow row;
            row.min_slr = std::numeric_limits<double>::infinity();
            for (std::uint64_t seed = 0; seed < sim_seeds; ++seed) {
              const auto e = bench::run_sim_experiment(suite, mode, depth, seed);
              const auto& s = e.summary;
              row.makespan += to_seconds(s.makespan);
              row.overhead += to_seconds(s.overhead);
              row.overhead_per_task += to_seconds(s.overhead) / static_cast<double>(s.per_task.size());
              row.slr += s.slr;
              row.min_slr = std::min(row.min_slr, s.slr);
            }
            const double k = static_cast<double>(sim_seeds);
            row.makespan /= k;
            row.overhead /= k;
            row.overhead_per_task /= k;
            row.slr /= k;
            std::cout << std::left << std::setw(16) << suite.name << std::setw(8) << bench::to_string(mode)
                      << std::right << std::setw(6) << depth << std::fixed << std::setprecision(6) << std::setw(14)
                      << row.makespan << std::setw(14) << row.overhead << std::setw(16) << row.overhead_per_task
                      << std::setprecision(3) << std::setw(9) << row.slr << std::setw(9) << row.min_slr
                      << std::defaultfloat << '\n';
            all.push_back({{"suite", suite.name},
                           {"mode", bench::to_string(mode)},
                           {"depth", depth},
                           {"seeds", sim_seeds},
                           {"mean_makespan", row.makespan},
                           {"mean_overhead", row.overhead},
                           {"mean_overhead_per_task", row.overhead_per_task},
                           {"mean_slr", row.slr},
                           {"min_slr", row.min_slr}});
          }
        }
      }
      if (!sim_json.empty()) {
        std::ofstream out(sim_json);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + sim_json);
        out << all.dump(2) << '\n';
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "bench: " << e.what() << '\n';
    const bool usage = e.code() == ErrorCode::InvalidArgument || e.code() == ErrorCode::KeyMismatch ||
                       e.code() == ErrorCode::MalformedBody || e.code() == ErrorCode::IoError;
    return usage ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "bench: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
