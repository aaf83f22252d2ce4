#pragma once

// HTTP+JSON model-evaluation protocol. The byte layout is documented in
// docs/protocol.md; field names here are part of the wire contract.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "uqlb/error.hpp"

namespace uqlb::protocol {

inline constexpr int kDefaultPort = 4242;
inline constexpr std::string_view kProtocolVersion = "1.0";

using Vector = std::vector<double>;
using Vectors = std::vector<Vector>;
using Sizes = std::vector<std::size_t>;

// Opaque key/value map of strings, numbers and booleans.
using Config = nlohmann::json;

inline Config empty_config() { return Config::object(); }

struct FeatureSet {
  bool evaluate = true;
  bool gradient = false;
  bool jacobian = false;
  bool hessian = false;

  friend bool operator==(const FeatureSet&, const FeatureSet&) = default;
};

struct ModelDescriptor {
  std::string name;
  Sizes input_sizes;
  Sizes output_sizes;
  FeatureSet features;

  // Throws SchemaViolation on an empty name, empty size lists or zero sizes.
  void validate() const;

  friend bool operator==(const ModelDescriptor&, const ModelDescriptor&) = default;
};

struct EvaluationRequest {
  std::string model_name;
  Vectors inputs;
  Config config = empty_config();

  friend bool operator==(const EvaluationRequest&, const EvaluationRequest&) = default;
};

struct ErrorInfo {
  std::string code;
  std::string message;

  friend bool operator==(const ErrorInfo&, const ErrorInfo&) = default;
};

struct EvaluationResponse {
  Vectors outputs;
  std::optional<ErrorInfo> error;
  // Time the model spent computing, when the server reports it. Travels in
  // the X-Compute-Time-Ns response header, never in the JSON body.
  std::optional<std::chrono::nanoseconds> compute_time;

  bool ok() const noexcept { return !error.has_value(); }

  static EvaluationResponse failure(ErrorCode code, std::string message) {
    return {{}, ErrorInfo{std::string(to_string(code)), std::move(message)}, std::nullopt};
  }

  friend bool operator==(const EvaluationResponse&, const EvaluationResponse&) = default;
};

// Structural checks: non-empty name, non-empty vectors, finite entries,
// flat config. With a descriptor, also checks the shape against input_sizes.
void validate_request(const EvaluationRequest& req, const ModelDescriptor* descriptor = nullptr);
void validate_shape(const Vectors& values, const Sizes& sizes, std::string_view what);

std::string encode_request(const EvaluationRequest& req);
EvaluationRequest decode_request(std::string_view body);

std::string encode_response(const EvaluationResponse& resp);
EvaluationResponse decode_response(std::string_view body);

// The forward model F: R^n -> R^m seen by a server.
class Model {
 public:
  explicit Model(std::string name) : name_(std::move(name)) {}
  virtual ~Model() = default;

  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  const std::string& name() const noexcept { return name_; }

  virtual Sizes input_sizes(const Config& config) const = 0;
  virtual Sizes output_sizes(const Config& config) const = 0;
  virtual Vectors evaluate(const Vectors& inputs, const Config& config) = 0;
  virtual FeatureSet features() const { return {}; }

  struct Timed {
    Vectors outputs;
    std::optional<std::chrono::nanoseconds> compute_time;
  };
  // The server calls this; the default times evaluate(). Models that proxy
  // another server override it to pass the upstream figure through.
  virtual Timed evaluate_timed(const Vectors& inputs, const Config& config);

  ModelDescriptor descriptor(const Config& config = empty_config()) const {
    return {name_, input_sizes(config), output_sizes(config), features()};
  }

 private:
  std::string name_;
};

struct ServerOptions {
  std::string host = "127.0.0.1";
  // 0 binds a free port chosen by the kernel.
  int port = kDefaultPort;
  std::size_t max_concurrent_evaluations = 1;
  std::size_t worker_threads = 8;
};

// PORT from the environment, else the flag, else 4242.
int resolve_port(std::optional<int> flag = std::nullopt);

class ModelServer {
 public:
  ModelServer(std::vector<std::shared_ptr<Model>> models, ServerOptions options = {});
  ~ModelServer();

  ModelServer(const ModelServer&) = delete;
  ModelServer& operator=(const ModelServer&) = delete;

  int port() const noexcept;
  const std::string& host() const noexcept;
  std::string address() const;

  std::uint64_t evaluations_served() const noexcept;

  void stop();
  // Blocks until stop() is called from another thread (or a signal handler
  // path that calls stop()).
  void wait();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Starts a server in the background and returns once it is accepting.
// Throws PortInUse when the requested port cannot be bound.
std::unique_ptr<ModelServer> serve_models(std::vector<std::shared_ptr<Model>> models,
                                          ServerOptions options = {});

struct ClientOptions {
  std::chrono::milliseconds connect_timeout{2000};
  std::chrono::milliseconds read_timeout{120000};
};

struct ServerInfo {
  std::string protocol_version;
  std::vector<std::string> models;
};

// `url` is "host:port" or "http://host:port".
ServerInfo get_info(const std::string& url, const ClientOptions& options = {});
Sizes get_input_sizes(const std::string& url, const std::string& name,
                      const Config& config = empty_config(), const ClientOptions& options = {});
Sizes get_output_sizes(const std::string& url, const std::string& name,
                       const Config& config = empty_config(), const ClientOptions& options = {});
FeatureSet get_features(const std::string& url, const std::string& name,
                        const ClientOptions& options = {});

// Blocking evaluate. Throws Unreachable, Timeout or RemoteError.
Vectors client_evaluate(const std::string& url, const std::string& name, const Vectors& inputs,
                        const Config& config = empty_config(), const ClientOptions& options = {});

// Sends a prepared request and returns the decoded response without
// converting a structured error into an exception.
EvaluationResponse post_evaluate(const std::string& url, const EvaluationRequest& req,
                                 const ClientOptions& options = {});

class HttpModel {
 public:
  HttpModel(std::string url, std::string name, ClientOptions options = {})
      : url_(std::move(url)), name_(std::move(name)), options_(options) {}

  Vectors operator()(const Vectors& inputs, const Config& config = empty_config()) const {
    return client_evaluate(url_, name_, inputs, config, options_);
  }
  Sizes input_sizes(const Config& config = empty_config()) const {
    return get_input_sizes(url_, name_, config, options_);
  }
  Sizes output_sizes(const Config& config = empty_config()) const {
    return get_output_sizes(url_, name_, config, options_);
  }

 private:
  std::string url_;
  std::string name_;
  ClientOptions options_;
};

struct HealthStatus {
  bool healthy = false;
  ErrorCode reason = ErrorCode::Internal;
  std::string detail;

  explicit operator bool() const noexcept { return healthy; }
};

inline constexpr std::chrono::milliseconds kDefaultHealthTimeout{2000};

// Healthy iff an info query answers within `timeout` and lists >= 1 model.
HealthStatus health_check(const std::string& address,
                          std::chrono::milliseconds timeout = kDefaultHealthTimeout);

}  // namespace uqlb::protocol
