#pragma once

// First-come-first-served load balancer over a pool of model servers. The
// pool grows on demand through a scheduler backend: a spawned server writes
// its address to a registration file, is health-checked and preflighted, and
// then takes evaluations from the FIFO queue.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "uqlb/backends/job.hpp"
#include "uqlb/protocol.hpp"

namespace uqlb::balancer {

using Clock = std::chrono::steady_clock;
using Millis = std::chrono::milliseconds;

enum class EndpointState { Spawning, Registering, Ready, Busy, Unhealthy, Retired };

std::string to_string(EndpointState state);

struct ServerEndpoint {
  int id = 0;
  std::string address;  // host:port once registered
  EndpointState state = EndpointState::Spawning;
  std::optional<backends::JobHandle> backend_job;
  std::optional<protocol::ModelDescriptor> descriptor;
  Clock::time_point spawned_at{};
  Clock::time_point last_health_ok{};
  std::optional<Clock::time_point> expires_at;  // Bulk allocation end
  std::uint64_t evaluations = 0;
};

struct BalancerConfig {
  std::size_t max_servers = 1;
  Millis health_period{5000};
  Millis health_timeout{2000};
  Millis registration_timeout{60000};
  Millis registration_poll{250};
  // Flush filesystem caches before each registration poll (shared
  // filesystems can hide freshly written files otherwise).
  bool sync_before_poll = true;

  std::shared_ptr<backends::Backend> backend;
  backends::JobSpec job_spec;
  backends::AllocationSpec allocation;  // Bulk server lifetime
  std::filesystem::path reg_dir = std::filesystem::temp_directory_path();

  // What every server must provide; sizes are checked only when given.
  std::string model_name = "modelname";
  std::optional<protocol::Sizes> expected_input_sizes;
  std::optional<protocol::Sizes> expected_output_sizes;

  std::size_t max_retries = 1;
  std::optional<std::size_t> queue_bound;  // NoCapacity beyond this
  // After this many spawns in a row fail, queued requests are failed.
  std::size_t max_consecutive_spawn_failures = 3;
  Millis connect_timeout{2000};

  // One JSON object per line; also kept in memory (see events()).
  std::ostream* event_stream = nullptr;

  void validate() const;
};

class Balancer {
 public:
  explicit Balancer(BalancerConfig config);
  ~Balancer();

  Balancer(const Balancer&) = delete;
  Balancer& operator=(const Balancer&) = delete;

  // Blocks until the request has been answered. Model-level errors come
  // back as error responses; balancer failures carry NoCapacity or
  // UpstreamFailure.
  protocol::EvaluationResponse dispatch(protocol::EvaluationRequest request);

  // Adds an already running server (no backend job), after preflight.
  int add_endpoint(const std::string& address);

  // Descriptor of the served model; spawns a server if none has been
  // preflighted yet.
  protocol::ModelDescriptor descriptor();

  const std::string& model_name() const noexcept;
  std::vector<ServerEndpoint> endpoints() const;
  std::vector<nlohmann::json> events() const;
  std::size_t queue_length() const;
  std::size_t spawn_count() const;

  void shutdown();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

using EventSink = std::function<void(nlohmann::json event)>;

struct RegistrationOptions {
  Millis timeout{60000};
  Millis poll{250};
  bool sync_before_poll = true;
  // Polled alongside the file; returning false aborts with SpawnFailure
  // (the job died before it could register).
  std::function<bool()> job_alive;
  std::function<bool()> should_stop;
};

// Waits for a complete "host:port" line in `path`. Throws
// RegistrationTimeout when nothing appears in time.
std::string register_from_file(const std::filesystem::path& path, const RegistrationOptions& options);

// The five informational queries run before a server sees its first
// evaluation: info, input sizes, output sizes, feature flags, health. Each
// is reported to `sink` as a "preflight" event. Throws PreflightMismatch when
// the server does not offer the expected model or shapes.
protocol::ModelDescriptor preflight(const std::string& address, const std::string& model_name,
                                    const std::optional<protocol::Sizes>& expected_input,
                                    const std::optional<protocol::Sizes>& expected_output, const EventSink& sink,
                                    Millis timeout = Millis{2000});

// Serves the balancer over HTTP with the model-server protocol.
class BalancerFront {
 public:
  BalancerFront(Balancer& balancer, protocol::ServerOptions options);
  ~BalancerFront();

  std::string address() const;
  int port() const;
  void stop();
  void wait();

 private:
  std::unique_ptr<protocol::ModelServer> server_;
};

}  // namespace uqlb::balancer
