#pragma once

// In-process stand-in for a cluster scheduler. A submission waits out the
// configured scheduling delays (scaled to wall time) and then starts a model
// server inside this process, which announces itself through the
// registration file exactly like a spawned server would.

#include <filesystem>
#include <functional>
#include <memory>

#include "uqlb/backends/job.hpp"
#include "uqlb/backends/simulator.hpp"
#include "uqlb/protocol.hpp"

namespace uqlb::backends {

using ServerFactory =
    std::function<std::unique_ptr<protocol::ModelServer>(const std::filesystem::path& reg_file)>;

struct EmulatedBackendOptions {
  SimConfig delays;           // queue_wait, launch and reinit draws
  double time_scale = 1.0;    // wall seconds per simulated second
  AllocationSpec allocation;  // lifetime of Bulk servers
};

class EmulatedBackend : public Backend {
 public:
  EmulatedBackend(EmulatedBackendOptions options, ServerFactory factory);
  ~EmulatedBackend() override;

  EmulatedBackend(const EmulatedBackend&) = delete;
  EmulatedBackend& operator=(const EmulatedBackend&) = delete;

  JobHandle submit(const JobSpec& spec, const std::filesystem::path& reg_file) override;
  void cancel(JobHandle handle) override;
  JobStatus status(JobHandle handle) const override;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

}  // namespace uqlb::backends
