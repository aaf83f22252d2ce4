#include <atomic>
#include <condition_variable>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "uqlb/protocol.hpp"

namespace uqlb::protocol {

using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";
constexpr const char* kComputeHeader = "X-Compute-Time-Ns";

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedBody:
    case ErrorCode::SchemaViolation:
      return 400;
    case ErrorCode::UnknownModel:
      return 404;
    case ErrorCode::NotSupported:
      return 501;
    case ErrorCode::NoCapacity:
      return 503;
    case ErrorCode::UpstreamFailure:
      return 502;
    default:
      return 500;
  }
}

void reply_error(httplib::Response& res, ErrorCode code, const std::string& message) {
  res.status = http_status_for(code);
  res.set_content(encode_response(EvaluationResponse::failure(code, message)), kJson);
}

class Semaphore {
 public:
  explicit Semaphore(std::size_t count) : count_(count) {}
  void acquire() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return count_ > 0; });
    --count_;
  }
  void release() {
    {
      std::lock_guard lock(mutex_);
      ++count_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  std::size_t count_;
};

}  // namespace

Model::Timed Model::evaluate_timed(const Vectors& inputs, const Config& config) {
  const auto start = std::chrono::steady_clock::now();
  Vectors out = evaluate(inputs, config);
  return {std::move(out), std::chrono::steady_clock::now() - start};
}

struct ModelServer::Impl {
  std::vector<std::shared_ptr<Model>> models;
  ServerOptions options;
  httplib::Server server;
  std::thread thread;
  int port = 0;
  Semaphore slots;
  std::atomic<std::uint64_t> served{0};
  std::mutex stop_mutex;
  std::condition_variable stop_cv;
  bool stopped = false;

  Impl(std::vector<std::shared_ptr<Model>> m, ServerOptions o)
      : models(std::move(m)), options(std::move(o)), slots(std::max<std::size_t>(1, options.max_concurrent_evaluations)) {}

  Model* find(const std::string& name) const {
    for (const auto& m : models) {
      if (m->name() == name) return m.get();
    }
    return nullptr;
  }

  // Parses {"name": ..., "config": ...} used by the info-style endpoints.
  std::pair<Model*, Config> named_query(const httplib::Request& req) const {
    json j;
    try {
      j = json::parse(req.body);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::MalformedBody, e.what());
    }
    if (!j.is_object() || !j.contains("name") || !j["name"].is_string()) {
      throw Error(ErrorCode::SchemaViolation, "missing field 'name'");
    }
    auto* model = find(j["name"].get<std::string>());
    if (model == nullptr) throw Error(ErrorCode::UnknownModel, "no model named '" + j["name"].get<std::string>() + "'");
    Config config = j.contains("config") ? j["config"] : empty_config();
    if (!config.is_object()) throw Error(ErrorCode::SchemaViolation, "config must be an object");
    return {model, std::move(config)};
  }

  template <class Fn>
  static void guarded(httplib::Response& res, Fn&& fn) {
    try {
      fn();
    } catch (const RemoteError& e) {
      // Proxied model-level errors keep their original code.
      res.status = http_status_for(error_code_from_string(e.remote_code()));
      res.set_content(encode_response({{}, ErrorInfo{e.remote_code(), e.remote_message()}, std::nullopt}), kJson);
    } catch (const Error& e) {
      reply_error(res, e.code(), e.detail());
    } catch (const std::exception& e) {
      reply_error(res, ErrorCode::Internal, e.what());
    }
  }

  void install_routes() {
    server.Get("/info", [this](const httplib::Request&, httplib::Response& res) {
      json names = json::array();
      for (const auto& m : models) names.push_back(m->name());
      res.set_content(json{{"protocol_version", kProtocolVersion}, {"models", names}}.dump(), kJson);
    });
    server.Post("/input-sizes", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto [model, config] = named_query(req);
        res.set_content(json{{"input_sizes", model->input_sizes(config)}}.dump(), kJson);
      });
    });
    server.Post("/output-sizes", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto [model, config] = named_query(req);
        res.set_content(json{{"output_sizes", model->output_sizes(config)}}.dump(), kJson);
      });
    });
    server.Post("/model-info", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto [model, config] = named_query(req);
        const auto f = model->features();
        res.set_content(json{{"support",
                              {{"evaluate", f.evaluate},
                               {"gradient", f.gradient},
                               {"apply_jacobian", f.jacobian},
                               {"apply_hessian", f.hessian}}}}
                            .dump(),
                        kJson);
      });
    });
    server.Post("/evaluate", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { evaluate(req, res); });
    });
    for (const char* path : {"/gradient", "/apply-jacobian", "/apply-hessian"}) {
      server.Post(path, [path](const httplib::Request&, httplib::Response& res) {
        reply_error(res, ErrorCode::NotSupported, std::string(path) + " is not supported");
      });
    }
  }

  void evaluate(const httplib::Request& http_req, httplib::Response& res) {
    const auto req = decode_request(http_req.body);
    Model* model = find(req.model_name);
    if (model == nullptr) throw Error(ErrorCode::UnknownModel, "no model named '" + req.model_name + "'");
    validate_shape(req.inputs, model->input_sizes(req.config), "input");

    slots.acquire();
    Model::Timed result;
    try {
      result = model->evaluate_timed(req.inputs, req.config);
    } catch (...) {
      slots.release();
      throw;
    }
    slots.release();
    Vectors& outputs = result.outputs;
    // A conforming server never returns a shape it did not advertise.
    try {
      validate_shape(outputs, model->output_sizes(req.config), "output");
    } catch (const Error& e) {
      throw Error(ErrorCode::Internal, std::string("model broke its output contract: ") + e.detail());
    }
    served.fetch_add(1);
    if (result.compute_time) res.set_header(kComputeHeader, std::to_string(result.compute_time->count()));
    res.set_content(encode_response({std::move(outputs), std::nullopt, std::nullopt}), kJson);
  }
};

ModelServer::ModelServer(std::vector<std::shared_ptr<Model>> models, ServerOptions options)
    : impl_(std::make_unique<Impl>(std::move(models), std::move(options))) {
  if (impl_->models.empty()) throw Error(ErrorCode::InvalidArgument, "server needs at least one model");
  for (std::size_t i = 0; i < impl_->models.size(); ++i) {
    impl_->models[i]->descriptor().validate();
    for (std::size_t k = 0; k < i; ++k) {
      if (impl_->models[k]->name() == impl_->models[i]->name()) {
        throw Error(ErrorCode::InvalidArgument, "duplicate model name " + impl_->models[i]->name());
      }
    }
  }
  const std::size_t threads = std::max<std::size_t>(2, impl_->options.worker_threads);
  impl_->server.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  impl_->server.set_keep_alive_max_count(1000);
  impl_->install_routes();

  auto& opts = impl_->options;
  if (opts.port == 0) {
    impl_->port = impl_->server.bind_to_any_port(opts.host);
    if (impl_->port <= 0) throw Error(ErrorCode::PortExhausted, "no free port on " + opts.host);
  } else {
    if (!impl_->server.bind_to_port(opts.host, opts.port)) {
      throw Error(ErrorCode::PortInUse, opts.host + ":" + std::to_string(opts.port));
    }
    impl_->port = opts.port;
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

ModelServer::~ModelServer() {
  stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int ModelServer::port() const noexcept { return impl_->port; }
const std::string& ModelServer::host() const noexcept { return impl_->options.host; }
std::string ModelServer::address() const { return impl_->options.host + ":" + std::to_string(impl_->port); }
std::uint64_t ModelServer::evaluations_served() const noexcept { return impl_->served.load(); }

void ModelServer::stop() {
  {
    std::lock_guard lock(impl_->stop_mutex);
    if (impl_->stopped) return;
    impl_->stopped = true;
  }
  impl_->server.stop();
  impl_->stop_cv.notify_all();
}

void ModelServer::wait() {
  std::unique_lock lock(impl_->stop_mutex);
  impl_->stop_cv.wait(lock, [&] { return impl_->stopped; });
}

std::unique_ptr<ModelServer> serve_models(std::vector<std::shared_ptr<Model>> models, ServerOptions options) {
  return std::make_unique<ModelServer>(std::move(models), std::move(options));
}

// ---- client -------------------------------------------------------------

namespace {

std::string normalize_url(const std::string& url) {
  if (url.rfind("http://", 0) == 0) return url;
  return "http://" + url;
}

httplib::Client make_client(const std::string& url, const ClientOptions& options) {
  httplib::Client cli(normalize_url(url));
  cli.set_connection_timeout(options.connect_timeout);
  cli.set_read_timeout(options.read_timeout);
  cli.set_write_timeout(options.read_timeout);
  return cli;
}

[[noreturn]] void throw_transport(const std::string& url, httplib::Error err) {
  const auto what = url + ": " + httplib::to_string(err);
  switch (err) {
    case httplib::Error::Read:
    case httplib::Error::Write:
      throw Error(ErrorCode::Timeout, what);
    default:
      throw Error(ErrorCode::Unreachable, what);
  }
}

json checked_json(const std::string& url, const httplib::Result& result) {
  if (!result) throw_transport(url, result.error());
  json j;
  try {
    j = json::parse(result->body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedBody, url + ": " + e.what());
  }
  if (j.is_object() && j.contains("error")) {
    const auto resp = decode_response(result->body);
    throw RemoteError(resp.error->code, resp.error->message);
  }
  if (result->status != 200) {
    throw Error(ErrorCode::MalformedBody, url + ": HTTP " + std::to_string(result->status));
  }
  return j;
}

Sizes read_sizes(const json& j, const char* field) {
  if (!j.is_object() || !j.contains(field) || !j[field].is_array()) {
    throw Error(ErrorCode::SchemaViolation, std::string("missing '") + field + "'");
  }
  Sizes out;
  for (const auto& v : j[field]) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw Error(ErrorCode::SchemaViolation, std::string(field) + " entries must be non-negative integers");
    }
    out.push_back(v.get<std::size_t>());
  }
  return out;
}

json named_body(const std::string& name, const Config& config) {
  return json{{"name", name}, {"config", config.is_null() ? json::object() : config}};
}

}  // namespace

ServerInfo get_info(const std::string& url, const ClientOptions& options) {
  auto cli = make_client(url, options);
  const json j = checked_json(url, cli.Get("/info"));
  if (!j.is_object() || !j.contains("models") || !j["models"].is_array()) {
    throw Error(ErrorCode::SchemaViolation, url + ": info lacks 'models'");
  }
  ServerInfo info;
  info.protocol_version = j.value("protocol_version", std::string{});
  for (const auto& m : j["models"]) {
    if (!m.is_string()) throw Error(ErrorCode::SchemaViolation, url + ": model names must be strings");
    info.models.push_back(m.get<std::string>());
  }
  return info;
}

Sizes get_input_sizes(const std::string& url, const std::string& name, const Config& config,
                      const ClientOptions& options) {
  auto cli = make_client(url, options);
  return read_sizes(checked_json(url, cli.Post("/input-sizes", named_body(name, config).dump(), kJson)),
                    "input_sizes");
}

Sizes get_output_sizes(const std::string& url, const std::string& name, const Config& config,
                       const ClientOptions& options) {
  auto cli = make_client(url, options);
  return read_sizes(checked_json(url, cli.Post("/output-sizes", named_body(name, config).dump(), kJson)),
                    "output_sizes");
}

FeatureSet get_features(const std::string& url, const std::string& name, const ClientOptions& options) {
  auto cli = make_client(url, options);
  const json j = checked_json(url, cli.Post("/model-info", named_body(name, empty_config()).dump(), kJson));
  if (!j.contains("support") || !j["support"].is_object()) {
    throw Error(ErrorCode::SchemaViolation, url + ": model-info lacks 'support'");
  }
  const auto& s = j["support"];
  return {s.value("evaluate", false), s.value("gradient", false), s.value("apply_jacobian", false),
          s.value("apply_hessian", false)};
}

EvaluationResponse post_evaluate(const std::string& url, const EvaluationRequest& req,
                                 const ClientOptions& options) {
  auto cli = make_client(url, options);
  auto result = cli.Post("/evaluate", encode_request(req), kJson);
  if (!result) throw_transport(url, result.error());
  auto resp = decode_response(result->body);
  if (result->has_header(kComputeHeader)) {
    try {
      resp.compute_time = std::chrono::nanoseconds(std::stoll(result->get_header_value(kComputeHeader)));
    } catch (const std::exception&) {
      // A garbled optional header is ignored rather than failing the call.
    }
  }
  return resp;
}

Vectors client_evaluate(const std::string& url, const std::string& name, const Vectors& inputs,
                        const Config& config, const ClientOptions& options) {
  EvaluationRequest req{name, inputs, config.is_null() ? empty_config() : config};
  validate_request(req);
  auto resp = post_evaluate(url, req, options);
  if (resp.error) throw RemoteError(resp.error->code, resp.error->message);
  return std::move(resp.outputs);
}

HealthStatus health_check(const std::string& address, std::chrono::milliseconds timeout) {
  ClientOptions options{timeout, timeout};
  try {
    const auto info = get_info(address, options);
    if (info.models.empty()) return {false, ErrorCode::SchemaViolation, "server reports no models"};
    return {true, ErrorCode::Internal, {}};
  } catch (const Error& e) {
    ErrorCode reason = e.code();
    // No usable answer inside the window counts as a timeout.
    if (reason == ErrorCode::Unreachable) reason = ErrorCode::Timeout;
    return {false, reason, e.detail()};
  }
}

}  // namespace uqlb::protocol
