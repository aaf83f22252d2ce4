#include "uqlb/backends/emulated.hpp"

#include <chrono>
#include <condition_variable>
#include <map>
#include <mutex>
#include <thread>

#include "uqlb/error.hpp"
#include "uqlb/text.hpp"

namespace uqlb::backends {

namespace {

using Clock = std::chrono::steady_clock;

struct EmulatedJob {
  JobStatus status = JobStatus::Pending;
  bool cancel_requested = false;
  std::thread worker;
};

}  // namespace

struct EmulatedBackend::Impl {
  EmulatedBackendOptions options;
  ServerFactory factory;
  std::mutex mutex;
  std::condition_variable wake;
  std::map<JobHandle, EmulatedJob> jobs;
  JobHandle next = 1;
  Rng rng{0};
  bool stopping = false;

  Clock::duration scaled(Nanos sim) const {
    return std::chrono::duration_cast<Clock::duration>(
        std::chrono::duration<double>(to_seconds(sim) * options.time_scale));
  }

  // Sleeps until `until` or until the job is cancelled. Lock held.
  bool wait_until(std::unique_lock<std::mutex>& lock, JobHandle h, Clock::time_point until) {
    return !wake.wait_until(lock, until, [&] { return stopping || jobs.at(h).cancel_requested; });
  }

  void run(JobHandle h, JobSpec spec, std::filesystem::path reg_file, Nanos delay) {
    std::unique_lock lock(mutex);
    if (!wait_until(lock, h, Clock::now() + scaled(delay))) {
      jobs.at(h).status = JobStatus::Cancelled;
      return;
    }
    std::unique_ptr<protocol::ModelServer> server;
    lock.unlock();
    try {
      server = factory(reg_file);
    } catch (const std::exception&) {
      lock.lock();
      jobs.at(h).status = JobStatus::Failed;
      return;
    }
    lock.lock();
    jobs.at(h).status = JobStatus::Running;
    const Nanos lifetime =
        spec.mode == AllocationMode::PerJob ? spec.time_limit : options.allocation.allocation_time_limit;
    const bool expired = wait_until(lock, h, Clock::now() + scaled(lifetime));
    jobs.at(h).status = expired ? JobStatus::TimedOut : JobStatus::Cancelled;
    lock.unlock();
    server->stop();
  }
};

EmulatedBackend::EmulatedBackend(EmulatedBackendOptions options, ServerFactory factory)
    : impl_(std::make_shared<Impl>()) {
  options.delays.validate();
  options.allocation.validate();
  if (!(options.time_scale >= 0.0)) throw Error(ErrorCode::InvalidArgument, "time_scale must be non-negative");
  impl_->rng = Rng(options.delays.rng_seed);
  impl_->options = std::move(options);
  impl_->factory = std::move(factory);
}

EmulatedBackend::~EmulatedBackend() {
  {
    std::lock_guard lock(impl_->mutex);
    impl_->stopping = true;
  }
  impl_->wake.notify_all();
  for (auto& [h, job] : impl_->jobs)
    if (job.worker.joinable()) job.worker.join();
}

JobHandle EmulatedBackend::submit(const JobSpec& spec, const std::filesystem::path& reg_file) {
  spec.validate();
  std::lock_guard lock(impl_->mutex);
  const auto& d = impl_->options.delays;
  Nanos delay = seconds_to_ns(sample(d.queue_wait, impl_->rng));
  if (spec.mode == AllocationMode::PerJob) {
    delay += seconds_to_ns(sample(d.perjob_launch_overhead, impl_->rng));
    delay += seconds_to_ns(sample(d.env_reinit_overhead, impl_->rng));
  }
  delay += seconds_to_ns(d.server_init);
  const JobHandle h = impl_->next++;
  auto& job = impl_->jobs[h];
  job.worker = std::thread([impl = impl_.get(), h, spec, reg_file, delay] { impl->run(h, spec, reg_file, delay); });
  return h;
}

void EmulatedBackend::cancel(JobHandle handle) {
  {
    std::lock_guard lock(impl_->mutex);
    auto it = impl_->jobs.find(handle);
    if (it == impl_->jobs.end()) throw Error(ErrorCode::UnknownHandle, "no job " + std::to_string(handle));
    it->second.cancel_requested = true;
  }
  impl_->wake.notify_all();
}

JobStatus EmulatedBackend::status(JobHandle handle) const {
  std::lock_guard lock(impl_->mutex);
  auto it = impl_->jobs.find(handle);
  if (it == impl_->jobs.end()) throw Error(ErrorCode::UnknownHandle, "no job " + std::to_string(handle));
  return it->second.status;
}

}  // namespace uqlb::backends
