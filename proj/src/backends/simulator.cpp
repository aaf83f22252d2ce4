#include "uqlb/backends/simulator.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <queue>

#include "uqlb/error.hpp"
#include "uqlb/text.hpp"

namespace uqlb::backends {

using nlohmann::json;

void SimConfig::validate() const {
  if (node_count < 1) throw Error(ErrorCode::InvalidArgument, "node_count must be positive");
  if (!(server_init >= 0.0)) throw Error(ErrorCode::InvalidArgument, "server_init must be non-negative");
}

json to_json(const SimConfig& cfg) {
  return {{"queue_wait", format_distribution(cfg.queue_wait)},
          {"perjob_launch_overhead", format_distribution(cfg.perjob_launch_overhead)},
          {"bulk_task_overhead", format_distribution(cfg.bulk_task_overhead)},
          {"env_reinit_overhead", format_distribution(cfg.env_reinit_overhead)},
          {"server_init", cfg.server_init},
          {"node_count", cfg.node_count},
          {"rng_seed", cfg.rng_seed}};
}

SimConfig sim_config_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "sim config must be an object");
  SimConfig c;
  try {
    for (auto [key, field] : {std::pair{"queue_wait", &c.queue_wait},
                              std::pair{"perjob_launch_overhead", &c.perjob_launch_overhead},
                              std::pair{"bulk_task_overhead", &c.bulk_task_overhead},
                              std::pair{"env_reinit_overhead", &c.env_reinit_overhead}}) {
      if (j.contains(key)) *field = distribution_from_json(j.at(key));
    }
    c.server_init = j.value("server_init", c.server_init);
    c.node_count = j.value("node_count", c.node_count);
    c.rng_seed = j.value("rng_seed", c.rng_seed);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("sim config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string to_string(SimStatus status) {
  switch (status) {
    case SimStatus::Completed: return "completed";
    case SimStatus::TimedOut: return "timed_out";
    case SimStatus::Cancelled: return "cancelled";
    case SimStatus::Expired: return "expired";
  }
  return "unknown";
}

namespace {

Nanos draw(const Distribution& d, Rng& rng) { return seconds_to_ns(sample(d, rng)); }

// Where and when a job would run, before cancellation is applied.
struct Placement {
  int node = 0;
  Nanos alloc_t{0};
  Nanos start_t{0};
  Nanos natural_end{0};  // end if nothing interrupts it
  SimStatus natural_status = SimStatus::Completed;
};

class PerJobModel {
 public:
  PerJobModel(const SimConfig& cfg, const SimOptions& opt)
      : cfg_(cfg), opt_(opt), free_(static_cast<std::size_t>(cfg.node_count), Nanos{0}) {}

  Placement place(Nanos submit, Nanos duration, Rng& rng) {
    const Nanos wait = draw(cfg_.queue_wait, rng);
    const Nanos launch = draw(cfg_.perjob_launch_overhead, rng);
    const Nanos reinit = draw(cfg_.env_reinit_overhead, rng);
    // Earliest-available node; min_element keeps the lowest id on ties.
    const auto it = std::min_element(free_.begin(), free_.end());
    Placement p;
    p.node = static_cast<int>(it - free_.begin());
    p.alloc_t = std::max(submit, *it) + wait;
    p.start_t = p.alloc_t + launch + reinit + seconds_to_ns(cfg_.server_init);
    const bool killed = duration > opt_.job.time_limit;
    p.natural_end = p.start_t + (killed ? opt_.job.time_limit : duration);
    p.natural_status = killed ? SimStatus::TimedOut : SimStatus::Completed;
    return p;
  }

  void commit(const Placement& p, Nanos end) { free_[static_cast<std::size_t>(p.node)] = end; }

 private:
  const SimConfig& cfg_;
  const SimOptions& opt_;
  std::vector<Nanos> free_;
};

class BulkModel {
 public:
  BulkModel(const SimConfig& cfg, const SimOptions& opt) : cfg_(cfg), opt_(opt) {
    const auto& a = opt.allocation;
    if (opt.job.time_request + seconds_to_ns(cfg.server_init) > a.allocation_time_limit) {
      throw Error(ErrorCode::SubmitRejected, "time_request plus server start does not fit in allocation_time_limit");
    }
  }

  Placement place(Nanos submit, Nanos duration, Rng& rng) {
    const Nanos task_overhead = draw(cfg_.bulk_task_overhead, rng);
    // A task that would have to wait for a busy worker first asks for one
    // more allocation, while the worker cap and the backlog allow it.
    if (auto w = fitting_worker(submit); w && workers_[*w].free_at > submit && can_grow(submit)) {
      request_allocation(submit, rng);
    }
    for (;;) {
      if (auto w = fitting_worker(submit)) {
        const Worker& worker = workers_[*w];
        const Nanos begin = std::max(submit, worker.free_at);
        Placement p;
        p.node = static_cast<int>(*w);
        p.alloc_t = std::max(submit, worker.granted);
        p.start_t = begin + task_overhead;
        const bool killed = duration > opt_.job.time_limit;
        Nanos end = p.start_t + (killed ? opt_.job.time_limit : duration);
        p.natural_status = killed ? SimStatus::TimedOut : SimStatus::Completed;
        if (end > worker.expires) {
          end = std::max(p.start_t, worker.expires);
          p.natural_status = SimStatus::Expired;
        }
        p.natural_end = end;
        return p;
      }
      if (!allocations_.empty() && !opt_.renew) {
        throw Error(ErrorCode::AllocationExpired, "no live worker can take the task and renewal is disabled");
      }
      request_allocation(submit, rng);
    }
  }

  void commit(const Placement& p, Nanos end) { workers_[static_cast<std::size_t>(p.node)].free_at = end; }

  std::size_t allocation_count() const { return allocations_.size(); }

 private:
  struct Worker {
    Nanos granted{0};
    Nanos free_at{0};
    Nanos expires{0};
  };
  struct Allocation {
    Nanos requested{0};
    Nanos granted{0};
  };

  std::optional<std::size_t> fitting_worker(Nanos submit) const {
    std::optional<std::size_t> best;
    Nanos best_begin{0};
    for (std::size_t i = 0; i < workers_.size(); ++i) {
      const Nanos begin = std::max(submit, workers_[i].free_at);
      if (workers_[i].expires - begin < opt_.job.time_request) continue;
      if (!best || begin < best_begin) {
        best = i;
        best_begin = begin;
      }
    }
    return best;
  }

  bool can_grow(Nanos t) const {
    const auto& a = opt_.allocation;
    if (live_workers(t) >= a.max_worker_count) return false;
    const auto pending = std::count_if(allocations_.begin(), allocations_.end(), [&](const Allocation& al) {
      return al.requested <= t && t < al.granted;
    });
    return pending < a.backlog;
  }

  int live_workers(Nanos t) const {
    return static_cast<int>(std::count_if(workers_.begin(), workers_.end(), [&](const Worker& w) {
      return w.expires > t;
    }));
  }

  void request_allocation(Nanos submit, Rng& rng) {
    const auto& a = opt_.allocation;
    Nanos t = submit;
    for (;;) {
      // Never exceed max_worker_count live workers: wait for expiries.
      if (live_workers(t) >= a.max_worker_count) {
        Nanos next = Nanos::max();
        for (const auto& w : workers_)
          if (w.expires > t) next = std::min(next, w.expires);
        t = next;
        continue;
      }
      // At most `backlog` requests pending at once.
      std::vector<Nanos> pending;
      for (const auto& al : allocations_)
        if (al.requested <= t && t < al.granted) pending.push_back(al.granted);
      if (static_cast<int>(pending.size()) >= a.backlog) {
        t = *std::min_element(pending.begin(), pending.end());
        continue;
      }
      break;
    }
    const int count = std::min(a.workers_per_alloc, a.max_worker_count - live_workers(t));
    const Nanos granted = t + draw(cfg_.queue_wait, rng);
    allocations_.push_back({t, granted});
    for (int i = 0; i < count; ++i) {
      workers_.push_back({granted, granted + seconds_to_ns(cfg_.server_init), granted + a.allocation_time_limit});
    }
  }

  const SimConfig& cfg_;
  const SimOptions& opt_;
  std::vector<Worker> workers_;
  std::vector<Allocation> allocations_;
};

template <class Model>
std::vector<SimJobOutcome> simulate(Model& model, const std::vector<Nanos>& durations, const SimOptions& opt,
                                    const std::map<std::size_t, Nanos>& cancel_at, Rng& rng) {
  const std::size_t n = durations.size();
  const std::size_t depth = opt.depth == 0 ? n : opt.depth;
  // Times at which a slot in the submission window frees up.
  std::priority_queue<Nanos, std::vector<Nanos>, std::greater<>> releases;
  std::vector<SimJobOutcome> out;
  out.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    Nanos submit{0};
    if (j >= depth) {
      submit = releases.top();
      releases.pop();
    }
    const Placement p = model.place(submit, durations[j], rng);
    SimJobOutcome o{j, submit, p.alloc_t, p.start_t, p.natural_end, Nanos{0}, p.node, p.natural_status};
    if (auto c = cancel_at.find(j); c != cancel_at.end() && c->second < p.natural_end) {
      const Nanos t = std::max(c->second, submit);
      if (t < p.start_t) {
        // Still queued: it never runs and consumes nothing.
        releases.push(t);
        continue;
      }
      o.end_t = t;
      o.status = SimStatus::Cancelled;
    }
    o.cpu_time = o.end_t - o.start_t;
    model.commit(p, o.end_t);
    releases.push(o.end_t);
    out.push_back(o);
  }
  return out;
}

}  // namespace

std::vector<SimJobOutcome> run_sim(const std::vector<Nanos>& durations, const SimConfig& cfg,
                                   const SimOptions& options, const std::vector<SimCancel>& cancels) {
  cfg.validate();
  options.job.validate();
  if (options.mode == AllocationMode::Bulk) options.allocation.validate();
  for (const auto d : durations)
    if (d.count() < 0) throw Error(ErrorCode::InvalidArgument, "task durations must be non-negative");

  std::map<std::size_t, Nanos> cancel_at;
  for (const auto& c : cancels) {
    if (c.job_id >= durations.size()) throw Error(ErrorCode::UnknownHandle, "no job " + std::to_string(c.job_id));
    auto [it, inserted] = cancel_at.emplace(c.job_id, c.at);
    if (!inserted) it->second = std::min(it->second, c.at);
  }

  Rng rng(cfg.rng_seed);
  if (options.mode == AllocationMode::PerJob) {
    PerJobModel model(cfg, options);
    return simulate(model, durations, options, cancel_at, rng);
  }
  BulkModel model(cfg, options);
  return simulate(model, durations, options, cancel_at, rng);
}

Simulator::Simulator(SimConfig cfg, SimOptions options) : cfg_(std::move(cfg)), options_(std::move(options)) {
  cfg_.validate();
}

JobHandle Simulator::submit(Nanos duration) {
  if (duration.count() < 0) throw Error(ErrorCode::InvalidArgument, "task durations must be non-negative");
  durations_.push_back(duration);
  return durations_.size() - 1;
}

void Simulator::cancel(JobHandle handle, Nanos at) {
  if (handle >= durations_.size()) throw Error(ErrorCode::UnknownHandle, "no job " + std::to_string(handle));
  cancels_.push_back({static_cast<std::size_t>(handle), at});
}

std::vector<SimJobOutcome> Simulator::run() const { return run_sim(durations_, cfg_, options_, cancels_); }

void write_outcomes_csv(std::ostream& out, const std::vector<SimJobOutcome>& outcomes) {
  out << "job_id,submit_t,alloc_t,start_t,end_t,cpu_time,node_id\n";
  for (const auto& o : outcomes) {
    out << o.job_id << ',' << format_seconds(o.submit_t) << ',' << format_seconds(o.alloc_t) << ','
        << format_seconds(o.start_t) << ',' << format_seconds(o.end_t) << ',' << format_seconds(o.cpu_time) << ','
        << o.node_id << '\n';
  }
}

void write_outcomes_csv(const std::filesystem::path& path, const std::vector<SimJobOutcome>& outcomes) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_outcomes_csv(out, outcomes);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::vector<SimJobOutcome> read_outcomes_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != "job_id,submit_t,alloc_t,start_t,end_t,cpu_time,node_id") {
    throw Error(ErrorCode::MalformedBody, path.string() + ": unexpected header");
  }
  std::vector<SimJobOutcome> out;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), ',');
    if (f.size() != 7) throw Error(ErrorCode::MalformedBody, path.string() + ": expected 7 fields");
    SimJobOutcome o;
    o.job_id = static_cast<std::size_t>(parse_int(f[0]));
    o.submit_t = parse_seconds(f[1]);
    o.alloc_t = parse_seconds(f[2]);
    o.start_t = parse_seconds(f[3]);
    o.end_t = parse_seconds(f[4]);
    o.cpu_time = parse_seconds(f[5]);
    o.node_id = static_cast<int>(parse_int(f[6]));
    out.push_back(o);
  }
  return out;
}

Nanos sim_makespan(const std::vector<SimJobOutcome>& outcomes) {
  if (outcomes.empty()) return Nanos{0};
  Nanos first = Nanos::max();
  Nanos last = Nanos::min();
  for (const auto& o : outcomes) {
    first = std::min(first, o.submit_t);
    last = std::max(last, o.end_t);
  }
  return last - first;
}

Nanos sim_total_cpu(const std::vector<SimJobOutcome>& outcomes) {
  Nanos total{0};
  for (const auto& o : outcomes) total += o.cpu_time;
  return total;
}

}  // namespace uqlb::backends
