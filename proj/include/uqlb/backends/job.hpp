#pragma once

// Job and allocation descriptions shared by every scheduler backend, plus the
// submission interface the balancer talks to.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace uqlb::backends {

using Nanos = std::chrono::nanoseconds;

// PerJob: one scheduler allocation per task (SLURM-like).
// Bulk: one allocation hosting persistent workers (HQ-like).
enum class AllocationMode { PerJob, Bulk };

std::string to_string(AllocationMode mode);
AllocationMode parse_allocation_mode(const std::string& text);

struct JobSpec {
  int cpus = 1;
  double memory_gb = 4.0;
  Nanos time_request = std::chrono::seconds(60);
  Nanos time_limit = std::chrono::seconds(300);
  // "{reg_file}" in any argument is replaced with the registration path.
  std::vector<std::string> command;
  AllocationMode mode = AllocationMode::PerJob;

  void validate() const;
};

struct AllocationSpec {
  Nanos allocation_time_limit = std::chrono::minutes(10);
  int backlog = 1;
  int workers_per_alloc = 1;
  int max_worker_count = 1;

  void validate() const;
};

// Durations are written as seconds (JSON numbers); key names match the
// field names above.
nlohmann::json to_json(const JobSpec& spec);
JobSpec job_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AllocationSpec& spec);
AllocationSpec allocation_spec_from_json(const nlohmann::json& j);

std::vector<std::string> expand_command(const std::vector<std::string>& command,
                                        const std::filesystem::path& reg_file);

using JobHandle = std::uint64_t;

enum class JobStatus { Pending, Running, Exited, Failed, TimedOut, Cancelled };

std::string to_string(JobStatus status);

inline bool is_terminal(JobStatus s) { return s != JobStatus::Pending && s != JobStatus::Running; }

// Starts model servers on behalf of the balancer. A submitted job is expected
// to announce its address through `reg_file`. Safe for concurrent callers.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual JobHandle submit(const JobSpec& spec, const std::filesystem::path& reg_file) = 0;

  // Idempotent for finished jobs; UnknownHandle for handles never issued.
  virtual void cancel(JobHandle handle) = 0;

  virtual JobStatus status(JobHandle handle) const = 0;
};

}  // namespace uqlb::backends
