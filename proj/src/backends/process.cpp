#include "uqlb/backends/process.hpp"

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <condition_variable>
#include <cstring>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "uqlb/error.hpp"

extern char** environ;

namespace uqlb::backends {

namespace {

using Clock = std::chrono::steady_clock;

struct Child {
  pid_t pid = -1;
  Clock::time_point deadline;
  std::optional<Clock::time_point> kill_at;  // escalation after SIGTERM
  JobStatus status = JobStatus::Running;
  std::optional<int> exit_code;
};

std::vector<std::string> environment_without_port() {
  std::vector<std::string> env;
  for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
    if (std::strncmp(*e, "PORT=", 5) == 0) continue;
    env.emplace_back(*e);
  }
  return env;
}

std::vector<char*> c_strings(std::vector<std::string>& strings) {
  std::vector<char*> out;
  for (auto& s : strings) out.push_back(s.data());
  out.push_back(nullptr);
  return out;
}

}  // namespace

struct ProcessBackend::Impl {
  ProcessBackendOptions options;
  mutable std::mutex mutex;
  std::condition_variable wake;
  std::map<JobHandle, Child> children;
  JobHandle next = 1;
  bool stopping = false;
  std::thread supervisor;

  void supervise() {
    std::unique_lock lock(mutex);
    while (!stopping) {
      reap_and_enforce();
      wake.wait_for(lock, options.poll_period);
    }
  }

  // Called with the mutex held.
  void reap_and_enforce() {
    const auto now = Clock::now();
    for (auto& [handle, c] : children) {
      if (c.pid < 0) continue;
      int wstatus = 0;
      const pid_t r = ::waitpid(c.pid, &wstatus, WNOHANG);
      if (r == c.pid) {
        if (c.status == JobStatus::Running) {
          c.status = (WIFEXITED(wstatus) && WEXITSTATUS(wstatus) == 0) ? JobStatus::Exited : JobStatus::Failed;
        }
        if (WIFEXITED(wstatus)) c.exit_code = WEXITSTATUS(wstatus);
        // Take any stragglers in the group down with the leader.
        ::kill(-c.pid, SIGKILL);
        c.pid = -1;
        continue;
      }
      if (c.status == JobStatus::Running && now >= c.deadline) {
        c.status = JobStatus::TimedOut;
        ::kill(-c.pid, SIGKILL);
      } else if (c.kill_at && now >= *c.kill_at) {
        ::kill(-c.pid, SIGKILL);
        c.kill_at.reset();
      }
    }
  }
};

ProcessBackend::ProcessBackend(ProcessBackendOptions options) : impl_(std::make_unique<Impl>()) {
  options.allocation.validate();
  impl_->options = std::move(options);
  impl_->supervisor = std::thread([this] { impl_->supervise(); });
}

ProcessBackend::~ProcessBackend() {
  {
    std::lock_guard lock(impl_->mutex);
    impl_->stopping = true;
    for (auto& [handle, c] : impl_->children)
      if (c.pid > 0) ::kill(-c.pid, SIGKILL);
  }
  impl_->wake.notify_all();
  impl_->supervisor.join();
  for (auto& [handle, c] : impl_->children)
    if (c.pid > 0) ::waitpid(c.pid, nullptr, 0);
}

JobHandle ProcessBackend::submit(const JobSpec& spec, const std::filesystem::path& reg_file) {
  spec.validate();
  if (spec.command.empty()) throw Error(ErrorCode::SpawnFailure, "empty command");

  std::lock_guard lock(impl_->mutex);
  const JobHandle handle = impl_->next++;

  auto argv_strings = expand_command(spec.command, reg_file);
  auto env_strings = environment_without_port();
  auto argv = c_strings(argv_strings);
  auto envp = c_strings(env_strings);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  const std::string log = impl_->options.log_dir
                              ? (*impl_->options.log_dir / ("job-" + std::to_string(handle) + ".log")).string()
                              : std::string("/dev/null");
  posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_adddup2(&actions, STDOUT_FILENO, STDERR_FILENO);

  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP | POSIX_SPAWN_SETSIGMASK | POSIX_SPAWN_SETSIGDEF);
  posix_spawnattr_setpgroup(&attr, 0);
  sigset_t empty;
  sigemptyset(&empty);
  posix_spawnattr_setsigmask(&attr, &empty);
  sigset_t defaults;
  sigemptyset(&defaults);
  sigaddset(&defaults, SIGTERM);
  sigaddset(&defaults, SIGINT);
  sigaddset(&defaults, SIGPIPE);
  posix_spawnattr_setsigdefault(&attr, &defaults);

  pid_t pid = -1;
  const int rc = ::posix_spawnp(&pid, argv[0], &actions, &attr, argv.data(), envp.data());
  posix_spawn_file_actions_destroy(&actions);
  posix_spawnattr_destroy(&attr);
  if (rc != 0) {
    throw Error(ErrorCode::SpawnFailure, argv_strings[0] + ": " + std::strerror(rc));
  }

  Child c;
  c.pid = pid;
  const auto lifetime = spec.mode == AllocationMode::PerJob ? spec.time_limit
                                                             : impl_->options.allocation.allocation_time_limit;
  c.deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(lifetime);
  impl_->children.emplace(handle, c);
  return handle;
}

void ProcessBackend::cancel(JobHandle handle) {
  std::lock_guard lock(impl_->mutex);
  auto it = impl_->children.find(handle);
  if (it == impl_->children.end()) throw Error(ErrorCode::UnknownHandle, "no job " + std::to_string(handle));
  Child& c = it->second;
  if (c.status != JobStatus::Running) return;
  c.status = JobStatus::Cancelled;
  if (c.pid > 0) {
    ::kill(-c.pid, SIGTERM);
    c.kill_at = Clock::now() + impl_->options.kill_grace;
  }
  impl_->wake.notify_all();
}

JobStatus ProcessBackend::status(JobHandle handle) const {
  std::lock_guard lock(impl_->mutex);
  auto it = impl_->children.find(handle);
  if (it == impl_->children.end()) throw Error(ErrorCode::UnknownHandle, "no job " + std::to_string(handle));
  // A job that exited but has not been reaped yet still counts as running;
  // callers poll, so the supervisor's next pass settles it.
  return it->second.status;
}

std::optional<pid_t> ProcessBackend::pid(JobHandle handle) const {
  std::lock_guard lock(impl_->mutex);
  auto it = impl_->children.find(handle);
  if (it == impl_->children.end() || it->second.pid < 0) return std::nullopt;
  return it->second.pid;
}

std::optional<int> ProcessBackend::exit_code(JobHandle handle) const {
  std::lock_guard lock(impl_->mutex);
  auto it = impl_->children.find(handle);
  if (it == impl_->children.end()) return std::nullopt;
  return it->second.exit_code;
}

}  // namespace uqlb::backends
