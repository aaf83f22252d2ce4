#pragma once

// Deterministic discrete-event model of the two allocation styles. The clock
// is integer nanoseconds and nothing sleeps; a run is a pure function of the
// workload, the configuration and the seed.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "uqlb/backends/job.hpp"
#include "uqlb/distribution.hpp"

namespace uqlb::backends {

struct SimConfig {
  Distribution queue_wait = ConstantDist{0.0};
  Distribution perjob_launch_overhead = ConstantDist{0.0};
  Distribution bulk_task_overhead = ConstantDist{0.0};
  Distribution env_reinit_overhead = ConstantDist{0.0};  // PerJob only
  double server_init = 1.0;                              // seconds
  int node_count = 1;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

nlohmann::json to_json(const SimConfig& cfg);
SimConfig sim_config_from_json(const nlohmann::json& j);

struct SimOptions {
  AllocationMode mode = AllocationMode::PerJob;
  JobSpec job;
  AllocationSpec allocation;  // Bulk only
  // Jobs kept in the system at once; later jobs are submitted as earlier ones
  // complete. 0 submits everything at t = 0.
  std::size_t depth = 0;
  // Bulk: request a further allocation when no live worker can take a task.
  bool renew = true;
};

enum class SimStatus { Completed, TimedOut, Cancelled, Expired };

std::string to_string(SimStatus status);

struct SimJobOutcome {
  std::size_t job_id = 0;
  Nanos submit_t{0};
  Nanos alloc_t{0};
  Nanos start_t{0};
  Nanos end_t{0};
  Nanos cpu_time{0};
  int node_id = 0;  // node (PerJob) or worker (Bulk)
  SimStatus status = SimStatus::Completed;

  bool operator==(const SimJobOutcome&) const = default;
};

struct SimCancel {
  std::size_t job_id = 0;
  Nanos at{0};
};

// Runs the workload (task compute durations, in submission order). Jobs
// cancelled before they start are absent from the result; the rest are
// returned in job_id order.
//
// Errors: SubmitRejected when a Bulk task can never fit an allocation,
// AllocationExpired when a Bulk task finds no live worker and renew is off.
std::vector<SimJobOutcome> run_sim(const std::vector<Nanos>& durations, const SimConfig& cfg,
                                   const SimOptions& options, const std::vector<SimCancel>& cancels = {});

// Submission-style front end over run_sim.
class Simulator {
 public:
  Simulator(SimConfig cfg, SimOptions options);

  JobHandle submit(Nanos duration);
  // Applies at simulated time `at`. Cancelling a job that will already have
  // finished by then is a no-op.
  void cancel(JobHandle handle, Nanos at);

  std::vector<SimJobOutcome> run() const;

 private:
  SimConfig cfg_;
  SimOptions options_;
  std::vector<Nanos> durations_;
  std::vector<SimCancel> cancels_;
};

// CSV columns: job_id,submit_t,alloc_t,start_t,end_t,cpu_time,node_id.
void write_outcomes_csv(std::ostream& out, const std::vector<SimJobOutcome>& outcomes);
void write_outcomes_csv(const std::filesystem::path& path, const std::vector<SimJobOutcome>& outcomes);
std::vector<SimJobOutcome> read_outcomes_csv(const std::filesystem::path& path);

// Makespan from first submission to last completion.
Nanos sim_makespan(const std::vector<SimJobOutcome>& outcomes);
Nanos sim_total_cpu(const std::vector<SimJobOutcome>& outcomes);

}  // namespace uqlb::backends
