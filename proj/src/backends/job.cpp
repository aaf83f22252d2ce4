#include "uqlb/backends/job.hpp"

#include "uqlb/error.hpp"
#include "uqlb/text.hpp"

namespace uqlb::backends {

using nlohmann::json;

std::string to_string(AllocationMode mode) { return mode == AllocationMode::PerJob ? "perjob" : "bulk"; }

AllocationMode parse_allocation_mode(const std::string& text) {
  if (text == "perjob" || text == "PerJob") return AllocationMode::PerJob;
  if (text == "bulk" || text == "Bulk") return AllocationMode::Bulk;
  throw Error(ErrorCode::InvalidArgument, "unknown allocation mode '" + text + "'");
}

std::string to_string(JobStatus status) {
  switch (status) {
    case JobStatus::Pending: return "pending";
    case JobStatus::Running: return "running";
    case JobStatus::Exited: return "exited";
    case JobStatus::Failed: return "failed";
    case JobStatus::TimedOut: return "timed_out";
    case JobStatus::Cancelled: return "cancelled";
  }
  return "unknown";
}

void JobSpec::validate() const {
  if (cpus < 1) throw Error(ErrorCode::InvalidArgument, "cpus must be positive");
  if (!(memory_gb > 0.0)) throw Error(ErrorCode::InvalidArgument, "memory_gb must be positive");
  if (time_request.count() < 0) throw Error(ErrorCode::InvalidArgument, "time_request must be non-negative");
  if (time_request > time_limit) throw Error(ErrorCode::InvalidArgument, "time_request exceeds time_limit");
}

void AllocationSpec::validate() const {
  if (allocation_time_limit.count() <= 0)
    throw Error(ErrorCode::InvalidArgument, "allocation_time_limit must be positive");
  if (backlog < 1 || workers_per_alloc < 1 || max_worker_count < 1)
    throw Error(ErrorCode::InvalidArgument, "backlog and worker counts must be positive");
  if (workers_per_alloc > max_worker_count)
    throw Error(ErrorCode::InvalidArgument, "workers_per_alloc exceeds max_worker_count");
}

namespace {

Nanos seconds_field(const json& j, const char* key, Nanos fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw Error(ErrorCode::InvalidArgument, std::string(key) + " must be seconds");
  return seconds_to_ns(j.at(key).get<double>());
}

}  // namespace

json to_json(const JobSpec& spec) {
  return {{"cpus", spec.cpus},
          {"memory_gb", spec.memory_gb},
          {"time_request", to_seconds(spec.time_request)},
          {"time_limit", to_seconds(spec.time_limit)},
          {"command", spec.command},
          {"mode", to_string(spec.mode)}};
}

JobSpec job_spec_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "job spec must be an object");
  JobSpec s;
  try {
    s.cpus = j.value("cpus", s.cpus);
    s.memory_gb = j.value("memory_gb", s.memory_gb);
    s.time_request = seconds_field(j, "time_request", s.time_request);
    s.time_limit = seconds_field(j, "time_limit", s.time_limit);
    if (j.contains("command")) s.command = j.at("command").get<std::vector<std::string>>();
    if (j.contains("mode")) s.mode = parse_allocation_mode(j.at("mode").get<std::string>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("job spec: ") + e.what());
  }
  s.validate();
  return s;
}

json to_json(const AllocationSpec& spec) {
  return {{"allocation_time_limit", to_seconds(spec.allocation_time_limit)},
          {"backlog", spec.backlog},
          {"workers_per_alloc", spec.workers_per_alloc},
          {"max_worker_count", spec.max_worker_count}};
}

AllocationSpec allocation_spec_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "allocation spec must be an object");
  AllocationSpec s;
  try {
    s.allocation_time_limit = seconds_field(j, "allocation_time_limit", s.allocation_time_limit);
    s.backlog = j.value("backlog", s.backlog);
    s.workers_per_alloc = j.value("workers_per_alloc", s.workers_per_alloc);
    s.max_worker_count = j.value("max_worker_count", s.max_worker_count);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("allocation spec: ") + e.what());
  }
  s.validate();
  return s;
}

std::vector<std::string> expand_command(const std::vector<std::string>& command,
                                        const std::filesystem::path& reg_file) {
  static const std::string placeholder = "{reg_file}";
  std::vector<std::string> out;
  out.reserve(command.size());
  for (auto arg : command) {
    for (auto pos = arg.find(placeholder); pos != std::string::npos; pos = arg.find(placeholder, pos)) {
      arg.replace(pos, placeholder.size(), reg_file.string());
      pos += reg_file.string().size();
    }
    out.push_back(std::move(arg));
  }
  return out;
}

}  // namespace uqlb::backends
