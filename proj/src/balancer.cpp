#include "uqlb/balancer.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <deque>
#include <future>
#include <list>
#include <map>
#include <mutex>
#include <thread>

#include "uqlb/error.hpp"
#include "uqlb/models/benchmark.hpp"

namespace uqlb::balancer {

using nlohmann::json;
using protocol::EvaluationRequest;
using protocol::EvaluationResponse;

std::string to_string(EndpointState state) {
  switch (state) {
    case EndpointState::Spawning: return "spawning";
    case EndpointState::Registering: return "registering";
    case EndpointState::Ready: return "ready";
    case EndpointState::Busy: return "busy";
    case EndpointState::Unhealthy: return "unhealthy";
    case EndpointState::Retired: return "retired";
  }
  return "unknown";
}

void BalancerConfig::validate() const {
  if (max_servers < 1) throw Error(ErrorCode::InvalidArgument, "max_servers must be at least 1");
  if (health_period.count() <= 0 || registration_poll.count() <= 0) {
    throw Error(ErrorCode::InvalidArgument, "health_period and registration_poll must be positive");
  }
  if (model_name.empty()) throw Error(ErrorCode::InvalidArgument, "model_name must not be empty");
  if (queue_bound && *queue_bound == 0) throw Error(ErrorCode::InvalidArgument, "queue_bound must be positive");
  job_spec.validate();
  allocation.validate();
}

std::string register_from_file(const std::filesystem::path& path, const RegistrationOptions& options) {
  const auto deadline = Clock::now() + options.timeout;
  for (;;) {
    if (options.should_stop && options.should_stop()) {
      throw Error(ErrorCode::RegistrationTimeout, "balancer stopping");
    }
    // Shared filesystems may not show another node's write until caches
    // are flushed.
    if (options.sync_before_poll) ::sync();
    if (auto address = models::read_registration_file(path)) return *address;
    if (options.job_alive && !options.job_alive()) {
      throw Error(ErrorCode::SpawnFailure, "job ended before writing " + path.string());
    }
    if (Clock::now() >= deadline) {
      throw Error(ErrorCode::RegistrationTimeout, path.string() + " did not appear within " +
                                                      std::to_string(options.timeout.count()) + " ms");
    }
    std::this_thread::sleep_for(std::min<Clock::duration>(options.poll, deadline - Clock::now()));
  }
}

protocol::ModelDescriptor preflight(const std::string& address, const std::string& model_name,
                                    const std::optional<protocol::Sizes>& expected_input,
                                    const std::optional<protocol::Sizes>& expected_output, const EventSink& sink,
                                    Millis timeout) {
  const protocol::ClientOptions opts{timeout, timeout};
  auto note = [&](const char* query) {
    if (sink) sink({{"event", "preflight"}, {"query", query}, {"address", address}});
  };
  auto mismatch = [&](const std::string& what) { throw Error(ErrorCode::PreflightMismatch, address + ": " + what); };

  note("info");
  const auto info = protocol::get_info(address, opts);
  if (std::find(info.models.begin(), info.models.end(), model_name) == info.models.end()) {
    mismatch("does not serve model '" + model_name + "'");
  }
  protocol::ModelDescriptor d;
  d.name = model_name;
  note("input-sizes");
  d.input_sizes = protocol::get_input_sizes(address, model_name, protocol::empty_config(), opts);
  note("output-sizes");
  d.output_sizes = protocol::get_output_sizes(address, model_name, protocol::empty_config(), opts);
  note("model-info");
  d.features = protocol::get_features(address, model_name, opts);
  note("health");
  const auto health = protocol::health_check(address, timeout);
  if (!health) throw Error(ErrorCode::UnreachableServer, address + ": " + health.detail);

  if (expected_input && d.input_sizes != *expected_input) mismatch("input sizes differ from the expected shape");
  if (expected_output && d.output_sizes != *expected_output) mismatch("output sizes differ from the expected shape");
  if (!d.features.evaluate) mismatch("model does not support evaluate");
  try {
    d.validate();
  } catch (const Error& e) {
    mismatch(e.detail());
  }
  return d;
}

namespace {

struct Pending {
  std::uint64_t seq = 0;
  EvaluationRequest request;
  std::promise<EvaluationResponse> promise;
  Clock::time_point arrival{};
  std::size_t attempts = 0;
  std::vector<int> excluded;
};

// Threads that are joined when they finish or at shutdown.
class ThreadSet {
 public:
  template <class Fn>
  void run(Fn&& fn) {
    std::lock_guard lock(mutex_);
    reap_locked();
    auto done = std::make_shared<std::atomic<bool>>(false);
    threads_.push_back({std::thread([f = std::forward<Fn>(fn), done] {
                          f();
                          done->store(true);
                        }),
                        done});
  }

  void join_all() {
    for (;;) {
      std::list<Entry> batch;
      {
        std::lock_guard lock(mutex_);
        batch.swap(threads_);
      }
      if (batch.empty()) return;
      for (auto& e : batch) e.thread.join();
    }
  }

 private:
  struct Entry {
    std::thread thread;
    std::shared_ptr<std::atomic<bool>> done;
  };

  void reap_locked() {
    for (auto it = threads_.begin(); it != threads_.end();) {
      if (it->done->load()) {
        it->thread.join();
        it = threads_.erase(it);
      } else {
        ++it;
      }
    }
  }

  std::mutex mutex_;
  std::list<Entry> threads_;
};

std::int64_t ns_between(Clock::time_point from, Clock::time_point to) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(to - from).count();
}

}  // namespace

struct Balancer::Impl {
  BalancerConfig cfg;
  const Clock::time_point t0 = Clock::now();

  mutable std::mutex mutex;
  std::condition_variable wake;
  std::condition_variable descriptor_cv;
  std::deque<std::shared_ptr<Pending>> queue;
  std::map<int, ServerEndpoint> endpoints;
  std::optional<protocol::ModelDescriptor> descriptor;
  std::size_t descriptor_waiters = 0;
  std::uint64_t descriptor_failures = 0;
  int next_id = 1;
  std::uint64_t next_seq = 1;
  std::size_t spawns = 0;
  std::size_t consecutive_spawn_failures = 0;
  bool stopping = false;

  mutable std::mutex log_mutex;
  std::vector<json> event_log;

  std::thread dispatcher;
  std::thread health;
  ThreadSet tasks;

  void log(json e) {
    e["t_ns"] = ns_between(t0, Clock::now());
    std::lock_guard lock(log_mutex);
    if (cfg.event_stream != nullptr) {
      *cfg.event_stream << e.dump() << '\n';
      cfg.event_stream->flush();
    }
    event_log.push_back(std::move(e));
  }

  // --- registry helpers; mutex held -----------------------------------

  std::size_t count_if_state(std::initializer_list<EndpointState> states) const {
    return static_cast<std::size_t>(std::count_if(endpoints.begin(), endpoints.end(), [&](const auto& kv) {
      return std::find(states.begin(), states.end(), kv.second.state) != states.end();
    }));
  }

  bool expiring(const ServerEndpoint& ep, Clock::time_point now) const {
    return ep.expires_at && now + std::chrono::duration_cast<Clock::duration>(cfg.job_spec.time_request) > *ep.expires_at;
  }

  void retire(ServerEndpoint& ep, const std::string& reason) {
    if (ep.state == EndpointState::Retired) return;
    ep.state = EndpointState::Retired;
    if (ep.backend_job && cfg.backend) {
      try {
        cfg.backend->cancel(*ep.backend_job);
      } catch (const Error&) {
        // Already gone.
      }
    }
    log({{"event", "retire"}, {"server", ep.id}, {"reason", reason}});
  }

  void mark_unhealthy(ServerEndpoint& ep, const std::string& detail) {
    ep.state = EndpointState::Unhealthy;
    log({{"event", "unhealthy"}, {"server", ep.id}, {"detail", detail}});
    retire(ep, "unhealthy");
  }

  ServerEndpoint* pick_idle(const std::vector<int>& excluded, Clock::time_point now) {
    for (auto& [id, ep] : endpoints) {  // ordered by id: lowest wins
      if (ep.state != EndpointState::Ready) continue;
      if (expiring(ep, now)) {
        retire(ep, "allocation ending");
        continue;
      }
      if (std::find(excluded.begin(), excluded.end(), id) != excluded.end()) continue;
      return &ep;
    }
    return nullptr;
  }

  void fail_queued(const std::string& why) {
    while (!queue.empty()) {
      auto p = queue.front();
      queue.pop_front();
      log({{"event", "failed"}, {"request", p->seq}, {"code", "UpstreamFailure"}, {"detail", why}});
      p->promise.set_value(EvaluationResponse::failure(ErrorCode::UpstreamFailure, why));
    }
  }

  void maybe_spawn() {
    if (stopping) return;
    if (!cfg.backend) {
      if (!queue.empty() && count_if_state({EndpointState::Retired}) == endpoints.size()) {
        fail_queued("no live model server and no backend to start one");
      }
      return;
    }
    const std::size_t demand = queue.size() + ((descriptor_waiters > 0 && !descriptor) ? 1 : 0);
    if (demand == 0) return;
    if (count_if_state({EndpointState::Ready}) > 0) return;
    std::size_t live = endpoints.size() - count_if_state({EndpointState::Retired});
    std::size_t pending = count_if_state({EndpointState::Spawning, EndpointState::Registering});
    while (live < cfg.max_servers && pending < demand) {
      start_spawn();
      ++live;
      ++pending;
    }
  }

  void start_spawn() {
    const int id = next_id++;
    auto& ep = endpoints[id];
    ep.id = id;
    ep.state = EndpointState::Spawning;
    ep.spawned_at = Clock::now();
    ++spawns;
    log({{"event", "spawn"}, {"server", id}});
    tasks.run([this, id] { spawn_flow(id); });
  }

  // --- background flows; mutex not held on entry ----------------------

  void spawn_flow(int id) {
    const auto reg = cfg.reg_dir / ("server-" + std::to_string(::getpid()) + "-" + std::to_string(id) + ".addr");
    std::error_code ec;
    std::filesystem::remove(reg, ec);

    backends::JobHandle job = 0;
    Clock::time_point submitted;
    try {
      job = cfg.backend->submit(cfg.job_spec, reg);
      submitted = Clock::now();
    } catch (const Error& e) {
      spawn_failed(id, e.code(), e.detail());
      return;
    }
    {
      std::lock_guard lock(mutex);
      auto& ep = endpoints.at(id);
      ep.backend_job = job;
      ep.state = EndpointState::Registering;
      if (cfg.job_spec.mode == backends::AllocationMode::Bulk) {
        ep.expires_at = ep.spawned_at + std::chrono::duration_cast<Clock::duration>(cfg.allocation.allocation_time_limit);
      }
    }

    try {
      RegistrationOptions ro;
      ro.timeout = cfg.registration_timeout;
      ro.poll = cfg.registration_poll;
      ro.sync_before_poll = cfg.sync_before_poll;
      ro.job_alive = [&] { return !backends::is_terminal(cfg.backend->status(job)); };
      ro.should_stop = [&] {
        std::lock_guard lock(mutex);
        return stopping;
      };
      const std::string address = register_from_file(reg, ro);
      log({{"event", "register"},
           {"server", id},
           {"address", address},
           {"latency_ms", ns_between(submitted, Clock::now()) / 1000000}});

      const auto health = protocol::health_check(address, cfg.health_timeout);
      if (!health) throw Error(ErrorCode::UnreachableServer, address + ": " + health.detail);

      auto d = preflight(address, cfg.model_name, cfg.expected_input_sizes, cfg.expected_output_sizes,
                         [&](json e) {
                           e["server"] = id;
                           log(std::move(e));
                         },
                         cfg.health_timeout);
      std::filesystem::remove(reg, ec);

      std::lock_guard lock(mutex);
      auto& ep = endpoints.at(id);
      if (stopping || ep.state == EndpointState::Retired) {
        retire(ep, "stopping");
        return;
      }
      ep.address = address;
      ep.descriptor = d;
      ep.state = EndpointState::Ready;
      ep.last_health_ok = Clock::now();
      consecutive_spawn_failures = 0;
      if (!descriptor) {
        descriptor = std::move(d);
        descriptor_cv.notify_all();
      }
      log({{"event", "ready"}, {"server", id}, {"address", address}});
      wake.notify_all();
    } catch (const Error& e) {
      std::filesystem::remove(reg, ec);
      spawn_failed(id, e.code(), e.detail());
    }
  }

  void spawn_failed(int id, ErrorCode code, const std::string& detail) {
    std::lock_guard lock(mutex);
    auto& ep = endpoints.at(id);
    log({{"event", "spawn_failed"}, {"server", id}, {"code", to_string(code)}, {"detail", detail}});
    retire(ep, std::string(to_string(code)));
    if (stopping) return;
    if (++consecutive_spawn_failures >= cfg.max_consecutive_spawn_failures) {
      consecutive_spawn_failures = 0;
      const std::string why = "no server could be started: " + std::string(to_string(code)) + ": " + detail;
      fail_queued(why);
      ++descriptor_failures;
      descriptor_cv.notify_all();
    }
    wake.notify_all();
  }

  void evaluate_on(int id, std::shared_ptr<Pending> p) {
    std::string address;
    std::optional<protocol::ModelDescriptor> d;
    std::optional<backends::JobHandle> job;
    {
      std::lock_guard lock(mutex);
      const auto& ep = endpoints.at(id);
      address = ep.address;
      d = ep.descriptor;
      job = ep.backend_job;
    }

    const auto start = Clock::now();
    EvaluationResponse resp;
    std::optional<Error> transport;
    bool rejected = false;
    try {
      protocol::validate_request(p->request, d ? &*d : nullptr);
    } catch (const Error& e) {
      resp = EvaluationResponse::failure(e.code(), e.detail());
      rejected = true;
    }
    if (!rejected) {
      const protocol::ClientOptions opts{cfg.connect_timeout,
                                         std::chrono::duration_cast<Millis>(cfg.job_spec.time_limit)};
      try {
        resp = protocol::post_evaluate(address, p->request, opts);
      } catch (const Error& e) {
        transport = e;
      }
    }
    const auto end = Clock::now();

    std::unique_lock lock(mutex);
    auto& ep = endpoints.at(id);
    if (transport) {
      const bool over_limit = end - start >= cfg.job_spec.time_limit;
      const bool job_timed_out = job && cfg.backend && cfg.backend->status(*job) == backends::JobStatus::TimedOut;
      if (over_limit || job_timed_out) {
        // The job limit is a hard kill; retrying would just hit it again.
        log({{"event", "time_limit"}, {"request", p->seq}, {"server", id}});
        retire(ep, "time limit");
        finish(p, EvaluationResponse::failure(ErrorCode::UpstreamFailure,
                                              "TimeLimitExceeded: evaluation exceeded the job time limit"),
               lock);
        return;
      }
      mark_unhealthy(ep, transport->what());
      if (p->attempts < cfg.max_retries && !stopping) {
        ++p->attempts;
        p->excluded.push_back(id);
        queue.push_front(p);
        log({{"event", "retry"}, {"request", p->seq}, {"failed_server", id}, {"attempt", p->attempts}});
        wake.notify_all();
        return;
      }
      log({{"event", "failed"}, {"request", p->seq}, {"code", "UpstreamFailure"}, {"detail", transport->what()}});
      finish(p, EvaluationResponse::failure(ErrorCode::UpstreamFailure, transport->what()), lock);
      return;
    }

    if (resp.ok()) {
      const auto cpu = resp.compute_time.value_or(std::chrono::duration_cast<std::chrono::nanoseconds>(end - start));
      log({{"event", "completed"},
           {"request", p->seq},
           {"server", id},
           {"submit_ns", ns_between(t0, p->arrival)},
           {"start_ns", ns_between(t0, start)},
           {"end_ns", ns_between(t0, end)},
           {"cpu_ns", std::min(cpu.count(), ns_between(start, end))}});
    } else {
      log({{"event", "model_error"}, {"request", p->seq}, {"server", id}, {"code", resp.error->code}});
    }
    // A PerJob server exists for one task; added servers have no job to end.
    if (!rejected && ep.backend_job && cfg.job_spec.mode == backends::AllocationMode::PerJob) {
      retire(ep, "job done");
    } else if (ep.state == EndpointState::Busy) {
      ep.state = EndpointState::Ready;
    }
    finish(p, std::move(resp), lock);
  }

  void finish(const std::shared_ptr<Pending>& p, EvaluationResponse resp, std::unique_lock<std::mutex>& lock) {
    wake.notify_all();
    lock.unlock();
    p->promise.set_value(std::move(resp));
  }

  void dispatch_loop() {
    std::unique_lock lock(mutex);
    while (!stopping) {
      const auto now = Clock::now();
      while (!queue.empty()) {
        auto& head = queue.front();
        ServerEndpoint* ep = pick_idle(head->excluded, now);
        if (ep == nullptr) break;
        auto p = head;
        queue.pop_front();
        ep->state = EndpointState::Busy;
        ++ep->evaluations;
        log({{"event", "dispatch"},
             {"request", p->seq},
             {"server", ep->id},
             {"queued_ns", ns_between(p->arrival, now)}});
        tasks.run([this, id = ep->id, p] { evaluate_on(id, p); });
      }
      // Idle Bulk servers whose allocation is about to end are let go.
      for (auto& [id, ep] : endpoints)
        if (ep.state == EndpointState::Ready && expiring(ep, now)) retire(ep, "allocation ending");
      maybe_spawn();
      wake.wait_for(lock, Millis(100));
    }
  }

  void health_loop() {
    std::unique_lock lock(mutex);
    while (!stopping) {
      wake.wait_for(lock, cfg.health_period, [&] { return stopping; });
      if (stopping) break;
      struct Probe {
        int id;
        std::string address;
        std::optional<backends::JobHandle> job;
      };
      std::vector<Probe> probes;
      for (const auto& [id, ep] : endpoints)
        if (ep.state == EndpointState::Ready) probes.push_back({id, ep.address, ep.backend_job});
      lock.unlock();

      std::vector<std::pair<int, protocol::HealthStatus>> results;
      for (const auto& pr : probes) {
        protocol::HealthStatus h;
        if (pr.job && cfg.backend && backends::is_terminal(cfg.backend->status(*pr.job))) {
          h = {false, ErrorCode::Unreachable, "backend job ended"};
        } else {
          h = protocol::health_check(pr.address, std::min(cfg.health_timeout, cfg.health_period));
        }
        results.emplace_back(pr.id, std::move(h));
      }

      lock.lock();
      for (auto& [id, h] : results) {
        auto& ep = endpoints.at(id);
        // A server that picked up work meanwhile is judged by that work.
        if (ep.state != EndpointState::Ready) continue;
        if (h) {
          ep.last_health_ok = Clock::now();
          log({{"event", "health"}, {"server", id}, {"ok", true}});
        } else {
          log({{"event", "health"}, {"server", id}, {"ok", false}, {"reason", to_string(h.reason)}});
          mark_unhealthy(ep, h.detail);
        }
      }
      wake.notify_all();
    }
  }
};

Balancer::Balancer(BalancerConfig config) : impl_(std::make_unique<Impl>()) {
  config.validate();
  impl_->cfg = std::move(config);
  impl_->dispatcher = std::thread([this] { impl_->dispatch_loop(); });
  impl_->health = std::thread([this] { impl_->health_loop(); });
}

Balancer::~Balancer() { shutdown(); }

void Balancer::shutdown() {
  {
    std::lock_guard lock(impl_->mutex);
    if (impl_->stopping && !impl_->dispatcher.joinable()) return;
    impl_->stopping = true;
    impl_->fail_queued("balancer shutting down");
    for (auto& [id, ep] : impl_->endpoints) impl_->retire(ep, "shutdown");
    impl_->descriptor_cv.notify_all();
  }
  impl_->wake.notify_all();
  if (impl_->dispatcher.joinable()) impl_->dispatcher.join();
  if (impl_->health.joinable()) impl_->health.join();
  impl_->tasks.join_all();
}

EvaluationResponse Balancer::dispatch(EvaluationRequest request) {
  auto p = std::make_shared<Pending>();
  auto future = p->promise.get_future();
  {
    std::lock_guard lock(impl_->mutex);
    if (impl_->stopping) return EvaluationResponse::failure(ErrorCode::UpstreamFailure, "balancer shutting down");
    if (impl_->cfg.queue_bound && impl_->queue.size() >= *impl_->cfg.queue_bound) {
      impl_->log({{"event", "rejected"}, {"queue_length", impl_->queue.size()}});
      return EvaluationResponse::failure(ErrorCode::NoCapacity, "dispatch queue is full");
    }
    p->seq = impl_->next_seq++;
    p->request = std::move(request);
    p->arrival = Clock::now();
    impl_->queue.push_back(p);
    impl_->log({{"event", "enqueue"}, {"request", p->seq}});
  }
  impl_->wake.notify_all();
  return future.get();
}

int Balancer::add_endpoint(const std::string& address) {
  auto d = preflight(address, impl_->cfg.model_name, impl_->cfg.expected_input_sizes,
                     impl_->cfg.expected_output_sizes, [this](json e) { impl_->log(std::move(e)); },
                     impl_->cfg.health_timeout);
  std::lock_guard lock(impl_->mutex);
  const int id = impl_->next_id++;
  auto& ep = impl_->endpoints[id];
  ep.id = id;
  ep.address = address;
  ep.state = EndpointState::Ready;
  ep.spawned_at = ep.last_health_ok = Clock::now();
  ep.descriptor = d;
  if (!impl_->descriptor) {
    impl_->descriptor = std::move(d);
    impl_->descriptor_cv.notify_all();
  }
  impl_->log({{"event", "ready"}, {"server", id}, {"address", address}});
  impl_->wake.notify_all();
  return id;
}

protocol::ModelDescriptor Balancer::descriptor() {
  std::unique_lock lock(impl_->mutex);
  if (impl_->descriptor) return *impl_->descriptor;
  const auto& cfg = impl_->cfg;
  if (cfg.expected_input_sizes && cfg.expected_output_sizes) {
    return {cfg.model_name, *cfg.expected_input_sizes, *cfg.expected_output_sizes, {}};
  }
  const auto failures = impl_->descriptor_failures;
  ++impl_->descriptor_waiters;
  impl_->wake.notify_all();
  impl_->descriptor_cv.wait(lock, [&] {
    return impl_->descriptor || impl_->stopping || impl_->descriptor_failures != failures;
  });
  --impl_->descriptor_waiters;
  if (!impl_->descriptor) throw Error(ErrorCode::UpstreamFailure, "no model server could be preflighted");
  return *impl_->descriptor;
}

const std::string& Balancer::model_name() const noexcept { return impl_->cfg.model_name; }

std::vector<ServerEndpoint> Balancer::endpoints() const {
  std::lock_guard lock(impl_->mutex);
  std::vector<ServerEndpoint> out;
  for (const auto& [id, ep] : impl_->endpoints) out.push_back(ep);
  return out;
}

std::vector<json> Balancer::events() const {
  std::lock_guard lock(impl_->log_mutex);
  return impl_->event_log;
}

std::size_t Balancer::queue_length() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->queue.size();
}

std::size_t Balancer::spawn_count() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->spawns;
}

namespace {

class BalancedModel : public protocol::Model {
 public:
  explicit BalancedModel(Balancer& balancer)
      : Model(balancer.model_name()), balancer_(balancer) {}

  protocol::Sizes input_sizes(const protocol::Config&) const override { return balancer_.descriptor().input_sizes; }
  protocol::Sizes output_sizes(const protocol::Config&) const override { return balancer_.descriptor().output_sizes; }
  protocol::FeatureSet features() const override { return {true, false, false, false}; }

  protocol::Vectors evaluate(const protocol::Vectors& inputs, const protocol::Config& config) override {
    return evaluate_timed(inputs, config).outputs;
  }

  Timed evaluate_timed(const protocol::Vectors& inputs, const protocol::Config& config) override {
    auto resp = balancer_.dispatch({name(), inputs, config});
    if (resp.error) throw RemoteError(resp.error->code, resp.error->message);
    return {std::move(resp.outputs), resp.compute_time};
  }

 private:
  Balancer& balancer_;
};

}  // namespace

BalancerFront::BalancerFront(Balancer& balancer, protocol::ServerOptions options) {
  options.max_concurrent_evaluations = std::max<std::size_t>(options.max_concurrent_evaluations, 1024);
  options.worker_threads = std::max<std::size_t>(options.worker_threads, 64);
  server_ = protocol::serve_models({std::make_shared<BalancedModel>(balancer)}, options);
}

BalancerFront::~BalancerFront() { stop(); }

std::string BalancerFront::address() const { return server_->address(); }
int BalancerFront::port() const { return server_->port(); }
void BalancerFront::stop() { server_->stop(); }
void BalancerFront::wait() { server_->wait(); }

}  // namespace uqlb::balancer
