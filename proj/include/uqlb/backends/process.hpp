#pragma once

// Real local processes. Each submission starts the job command in its own
// process group with PORT removed from the environment, so the server picks
// its own port and reports it through the registration file.

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>

#include <sys/types.h>

#include "uqlb/backends/job.hpp"

namespace uqlb::backends {

struct ProcessBackendOptions {
  AllocationSpec allocation;  // lifetime of Bulk servers
  // Child stdout/stderr go to <log_dir>/job-<handle>.log, or /dev/null.
  std::optional<std::filesystem::path> log_dir;
  std::chrono::milliseconds poll_period{20};
  // Grace between SIGTERM and SIGKILL on cancel.
  std::chrono::milliseconds kill_grace{2000};
};

class ProcessBackend : public Backend {
 public:
  explicit ProcessBackend(ProcessBackendOptions options = {});
  ~ProcessBackend() override;

  ProcessBackend(const ProcessBackend&) = delete;
  ProcessBackend& operator=(const ProcessBackend&) = delete;

  // PerJob jobs are killed once they have run for time_limit (TimedOut);
  // Bulk jobs once they reach allocation_time_limit. Throws SpawnFailure
  // when the command cannot be started at all.
  JobHandle submit(const JobSpec& spec, const std::filesystem::path& reg_file) override;
  void cancel(JobHandle handle) override;
  JobStatus status(JobHandle handle) const override;

  // Process id of a job that has not been reaped yet.
  std::optional<pid_t> pid(JobHandle handle) const;
  std::optional<int> exit_code(JobHandle handle) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace uqlb::backends
