// Load balancer in front of model servers it starts on demand.
//
//   uqlb-balancer --job-spec job.json --max-servers 2 --events events.jsonl
//   uqlb-balancer --backend emulated --model eigen --n 100 --delays sim.json
//   uqlb-balancer --backend none --add-server 127.0.0.1:4243
//
// Clients talk to it exactly as they would to a single model server. It
// listens on $PORT, --port, or 4242 and stops on SIGINT/SIGTERM.

#include <csignal>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "uqlb/backends/emulated.hpp"
#include "uqlb/backends/process.hpp"
#include "uqlb/balancer.hpp"
#include "uqlb/error.hpp"
#include "uqlb/models/benchmark.hpp"

namespace {

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw uqlb::Error(uqlb::ErrorCode::IoError, "cannot read " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw uqlb::Error(uqlb::ErrorCode::MalformedBody, path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace uqlb;

  CLI::App app{"uqlb load balancer"};
  std::string backend_kind = "process";
  std::string mode = "perjob";
  std::string job_spec_file;
  std::string allocation_file;
  std::string delays_file;
  std::string events_file;
  std::string log_dir;
  std::vector<std::string> add_servers;
  std::optional<int> port;
  std::optional<std::size_t> queue_bound;
  double time_scale = 1.0;
  long long health_period_ms = 5000;
  long long health_timeout_ms = 2000;
  long long registration_timeout_ms = 60000;
  std::string model_kind = "eigen";
  models::BenchmarkModelSpec model;
  balancer::BalancerConfig cfg;
  protocol::ServerOptions front_opts;

  app.add_option("--backend", backend_kind, "process | emulated | none")->capture_default_str();
  app.add_option("--mode", mode, "perjob | bulk (overrides the job spec)")->capture_default_str();
  app.add_option("--job-spec", job_spec_file, "JSON job spec with the server command (process backend)");
  app.add_option("--allocation", allocation_file, "JSON allocation spec (bulk lifetime)");
  app.add_option("--max-servers", cfg.max_servers, "most servers alive at once")->capture_default_str();
  app.add_option("--reg-dir", cfg.reg_dir, "directory for registration files")->capture_default_str();
  app.add_option("--model-name", cfg.model_name, "model every server must offer")->capture_default_str();
  app.add_option("--health-period-ms", health_period_ms, "health check period")->capture_default_str();
  app.add_option("--health-timeout-ms", health_timeout_ms, "health check timeout")->capture_default_str();
  app.add_option("--registration-timeout-ms", registration_timeout_ms, "wait for a registration file")
      ->capture_default_str();
  app.add_option("--max-retries", cfg.max_retries, "retries on another server")->capture_default_str();
  app.add_option("--queue-bound", queue_bound, "reject requests beyond this queue length");
  app.add_option("--events", events_file, "append JSON-lines events here");
  app.add_option("--job-logs", log_dir, "process backend: per-job stdout/stderr directory");
  app.add_option("--add-server", add_servers, "already running server host:port (repeatable)");
  app.add_option("--port", port, "listen port (PORT env wins)");
  app.add_option("--host", front_opts.host, "bind address")->capture_default_str();
  app.add_option("--model", model_kind, "emulated: eigen | gp | synthetic | identity")->capture_default_str();
  app.add_option("--n", model.n, "emulated eigen: matrix dimension")->capture_default_str();
  app.add_option("--seed", model.seed, "emulated: model seed")->capture_default_str();
  app.add_option("--input-dim", model.input_dim, "emulated synthetic/identity: input dimension")
      ->capture_default_str();
  app.add_option("--delays", delays_file, "emulated: JSON scheduler delays in seconds");
  app.add_option("--time-scale", time_scale, "emulated: wall seconds per delay second")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGTERM);
  sigaddset(&signals, SIGINT);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  try {
    if (!job_spec_file.empty()) cfg.job_spec = backends::job_spec_from_json(read_json_file(job_spec_file));
    cfg.job_spec.mode = backends::parse_allocation_mode(mode);
    if (!allocation_file.empty()) {
      cfg.allocation = backends::allocation_spec_from_json(read_json_file(allocation_file));
    }
    cfg.health_period = balancer::Millis{health_period_ms};
    cfg.health_timeout = balancer::Millis{health_timeout_ms};
    cfg.registration_timeout = balancer::Millis{registration_timeout_ms};
    cfg.queue_bound = queue_bound;

    if (backend_kind == "process") {
      if (cfg.job_spec.command.empty()) {
        throw Error(ErrorCode::InvalidArgument, "process backend needs --job-spec with a command");
      }
      backends::ProcessBackendOptions po;
      po.allocation = cfg.allocation;
      if (!log_dir.empty()) po.log_dir = log_dir;
      cfg.backend = std::make_shared<backends::ProcessBackend>(po);
    } else if (backend_kind == "emulated") {
      model.kind = models::parse_model_kind(model_kind);
      model.name = cfg.model_name;
      backends::EmulatedBackendOptions eo;
      if (!delays_file.empty()) eo.delays = backends::sim_config_from_json(read_json_file(delays_file));
      eo.time_scale = time_scale;
      eo.allocation = cfg.allocation;
      cfg.backend = std::make_shared<backends::EmulatedBackend>(eo, [model](const std::filesystem::path& reg) {
        protocol::ServerOptions so;
        so.port = 0;
        return models::serve_benchmark(models::make_benchmark_model(model), reg, so);
      });
    } else if (backend_kind != "none") {
      throw Error(ErrorCode::InvalidArgument, "unknown backend '" + backend_kind + "'");
    }

    std::ofstream events;
    if (!events_file.empty()) {
      events.open(events_file, std::ios::app);
      if (!events) throw Error(ErrorCode::IoError, "cannot write " + events_file);
      cfg.event_stream = &events;
    }

    balancer::Balancer lb(cfg);
    for (const auto& address : add_servers) lb.add_endpoint(address);
    front_opts.port = protocol::resolve_port(port);
    balancer::BalancerFront front(lb, front_opts);
    std::cerr << "balancing '" << cfg.model_name << "' on " << front.address() << std::endl;

    int sig = 0;
    sigwait(&signals, &sig);
    front.stop();
    lb.shutdown();
  } catch (const Error& e) {
    std::cerr << "uqlb-balancer: " << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "uqlb-balancer: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
