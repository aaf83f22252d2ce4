#pragma once

// Named benchmark suites and the experiment matrix run over them: every
// (mode, depth) pair either replays the workload through the scheduler
// simulator or drives live model servers through the balancer.
//
// Suite files keep every time in cluster units (minutes for task times and
// resource rows, seconds for scheduler delays) next to the factors that map
// one cluster minute to desk seconds. Code only multiplies.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "uqlb/backends/job.hpp"
#include "uqlb/backends/simulator.hpp"
#include "uqlb/clients/experiment.hpp"
#include "uqlb/distribution.hpp"
#include "uqlb/metrics.hpp"
#include "uqlb/models/benchmark.hpp"
#include "uqlb/parameter_box.hpp"

namespace uqlb::bench {

// One column of the resource table, in cluster minutes.
struct ResourceRow {
  double perjob_time_limit = 1.0;  // per-job allocation time
  double bulk_allocation_time = 10.0;
  double bulk_time_request = 1.0;
  double bulk_time_limit = 5.0;
  int cpus = 1;
  double memory_gb = 4.0;
};

struct BenchmarkSuite {
  std::string name;
  std::string description;
  bool in_default = true;

  // Desk seconds per cluster minute.
  double sim_seconds_per_minute = 0.01;
  double live_seconds_per_minute = 1.0;

  models::BenchmarkModelSpec model;
  Distribution task_minutes = ConstantDist{0.01};  // simulated compute time
  ResourceRow resources;
  // Scheduler delays in cluster seconds; node_count and rng_seed are set per
  // experiment.
  backends::SimConfig sim;

  std::size_t n_evaluations = 100;
  std::vector<std::size_t> depths{2, 10};
  std::optional<ParameterBox> box;         // LHS inputs, or
  std::vector<std::vector<double>> fixed;  // the same inputs every time
  std::vector<std::uint64_t> seeds{0};     // one per repetition

  void validate() const;
};

BenchmarkSuite suite_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BenchmarkSuite& suite);
BenchmarkSuite load_suite(const std::filesystem::path& path);

// Looks up `<dir>/<name>.json`; InvalidArgument when there is no such suite.
BenchmarkSuite find_suite(const std::filesystem::path& dir, const std::string& name);
std::vector<std::string> list_suites(const std::filesystem::path& dir);

enum class Mode { PerJob, Bulk };

std::string to_string(Mode mode);
// "perjob" | "bulk"; "both" expands to both.
std::vector<Mode> parse_modes(const std::string& text);

// Desk-scale job and allocation for one experiment. `seconds_per_minute`
// picks the simulated or the live scale. The allocation holds one worker, as
// in the allocation listing.
backends::JobSpec job_spec_for(const BenchmarkSuite& suite, Mode mode, double seconds_per_minute);
backends::AllocationSpec allocation_for(const BenchmarkSuite& suite, double seconds_per_minute);

// Simulated delays at desk scale on a single node: the schedule is serial,
// so SLR >= 1 always holds, and depth only bounds how many jobs are queued.
backends::SimConfig sim_config_for(const BenchmarkSuite& suite, std::uint64_t seed);

// Simulated task compute times in desk nanoseconds.
std::vector<backends::Nanos> sim_durations(const BenchmarkSuite& suite, std::uint64_t seed);

struct SimExperiment {
  std::vector<backends::SimJobOutcome> outcomes;
  metrics::MetricsSummary summary;
};

SimExperiment run_sim_experiment(const BenchmarkSuite& suite, Mode mode, std::size_t depth, std::uint64_t seed);

enum class LiveBackend { Process, Emulated };

LiveBackend parse_live_backend(const std::string& text);

struct LiveOptions {
  LiveBackend backend = LiveBackend::Process;
  std::filesystem::path model_server_bin;  // process backend
  std::filesystem::path work_dir;          // registration files and the event log
  std::optional<std::size_t> n_evaluations;  // overrides the suite
  std::size_t max_consecutive_failures = 5;
};

struct LiveExperiment {
  clients::ExperimentResult result;
  metrics::MetricsSummary summary;
  std::vector<nlohmann::json> events;
  std::size_t spawns = 0;
};

// Starts a backend and a balancer serving HTTP on a free local port, runs the
// suite's plan against it with the given queue depth and tears it all down.
LiveExperiment run_live_experiment(const BenchmarkSuite& suite, Mode mode, std::size_t depth, std::uint64_t seed,
                                   const LiveOptions& options);

struct RunOptions {
  std::vector<Mode> modes{Mode::PerJob, Mode::Bulk};
  std::vector<std::size_t> depths;  // empty: the suite's depths
  bool sim = false;
  LiveOptions live;
  std::filesystem::path results_dir = "results";
  std::ostream* log = nullptr;
};

struct RunReport {
  std::size_t experiments = 0;
  std::size_t failed = 0;
  std::vector<std::string> failures;
  std::vector<std::filesystem::path> written;  // summary.json files

  bool ok() const noexcept { return failed == 0; }
};

// For each mode and depth: results/<suite>/<mode>/<depth>/{records.csv,
// summary.json, box.csv}, plus events.jsonl for live runs. Repetition k > 0
// goes under rep-<k>/ of the same directory. Failed experiments are recorded
// and the rest still run.
RunReport run_suite(const BenchmarkSuite& suite, const RunOptions& options);

struct ComparisonRow {
  std::string key;  // relative directory holding summary.json, e.g. "2"
  double makespan_a = 0.0;
  double makespan_b = 0.0;
  double overhead_a = 0.0;
  double overhead_b = 0.0;
  double slr_a = 0.0;
  double slr_b = 0.0;
  double makespan_ratio = 1.0;   // b / a
  double overhead_ratio = 1.0;   // a / b: how many times less overhead b pays
  double makespan_reduction = 0.0;  // 1 - b / a
  bool overhead_flag = false;       // overhead_ratio >= 1000
  bool makespan_flag = false;       // makespan_reduction >= 0.38
};

inline constexpr double kOverheadRatioFlag = 1000.0;
inline constexpr double kMakespanReductionFlag = 0.38;

// Pairs every summary.json below `a` with the one at the same relative path
// below `b`. KeyMismatch names the first key present on one side only.
std::vector<ComparisonRow> compare(const std::filesystem::path& a, const std::filesystem::path& b);

void write_comparison(std::ostream& out, const std::vector<ComparisonRow>& rows);
nlohmann::json comparison_to_json(const std::vector<ComparisonRow>& rows);

}  // namespace uqlb::bench
