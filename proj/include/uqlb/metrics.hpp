#pragma once

// Makespan, CPU time, scheduling overhead, schedule length ratio (SLR) and
// boxplot statistics over per-task records.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "uqlb/backends/simulator.hpp"

namespace uqlb::metrics {

using Nanos = std::chrono::nanoseconds;

struct TaskRecord {
  std::uint64_t task_id = 0;
  Nanos submit_t{0};
  Nanos start_t{0};
  Nanos end_t{0};
  Nanos cpu_time{0};
  // When resources were granted; lets overhead be reported without queue wait.
  std::optional<Nanos> alloc_t;

  void validate() const;
  bool operator==(const TaskRecord&) const = default;
};

// Warnings are structured events; the default sink writes one JSON line per
// event to stderr. Install a sink to capture them.
using WarningSink = std::function<void(const nlohmann::json& event)>;

class ScopedWarningSink {
 public:
  explicit ScopedWarningSink(WarningSink sink);
  ~ScopedWarningSink();
  ScopedWarningSink(const ScopedWarningSink&) = delete;
  ScopedWarningSink& operator=(const ScopedWarningSink&) = delete;

 private:
  WarningSink previous_;
};

struct Overhead {
  Nanos makespan{0};  // possibly corrected
  Nanos overhead{0};
};

// makespan == 0 means the clock was too coarse to see the run; the makespan
// is then taken to be the CPU time and the overhead to be zero. Otherwise the
// overhead is makespan - cpu, clamped at zero with a "negative_overhead"
// warning.
Overhead overhead(Nanos makespan, Nanos cpu);

double slr(Nanos makespan, Nanos total_cpu);
double slr(Nanos makespan, const std::vector<TaskRecord>& tasks);

struct BoxStats {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double whisker_lo = 0.0;
  double whisker_hi = 0.0;
  std::vector<double> outliers;

  bool operator==(const BoxStats&) const = default;
};

// Quantile by linear interpolation between order statistics at rank
// (n + 1) p, clamped to the sample range.
double quantile(std::vector<double> values, double p);

// Tukey whiskers: the most extreme data within 1.5 IQR of the quartiles.
BoxStats box_stats(std::vector<double> values);

struct MetricsSummary {
  Nanos makespan{0};
  Nanos total_cpu{0};
  Nanos overhead{0};
  // Overhead paid after resources were granted, sum of (start_t - alloc_t),
  // i.e. without the scheduler queue wait; only when every
  // record carries alloc_t.
  std::optional<Nanos> overhead_excluding_queue;
  double slr = 0.0;
  std::vector<TaskRecord> per_task;      // sorted by task_id
  std::map<std::string, BoxStats> box;  // seconds; cpu_time, wait, turnaround
};

// makespan = wall_span if given, else max(end_t) - min(submit_t).
MetricsSummary summarize(std::vector<TaskRecord> records, std::optional<Nanos> wall_span = std::nullopt);

std::vector<TaskRecord> records_from_outcomes(const std::vector<backends::SimJobOutcome>& outcomes);

// CSV columns: task_id,submit_t,start_t,end_t,cpu_time[,alloc_t], seconds
// with nine decimals.
void write_records_csv(std::ostream& out, const std::vector<TaskRecord>& records);
void write_records_csv(const std::filesystem::path& path, const std::vector<TaskRecord>& records);
std::vector<TaskRecord> read_records_csv(const std::filesystem::path& path);

nlohmann::json summary_to_json(const MetricsSummary& summary);
void write_summary_json(const std::filesystem::path& path, const MetricsSummary& summary,
                        const nlohmann::json& extra = nlohmann::json::object());

// CSV columns: metric,min,q1,median,q3,max,whisker_lo,whisker_hi,outliers
// (outliers separated by ';'). Doubles as gnuplot candlestick input.
void write_box_csv(std::ostream& out, const std::map<std::string, BoxStats>& box);
void write_box_csv(const std::filesystem::path& path, const std::map<std::string, BoxStats>& box);

// Task records from the balancer's JSON-lines event log ("completed" events).
std::vector<TaskRecord> read_balancer_log(const std::filesystem::path& path);

}  // namespace uqlb::metrics
