// Serves one benchmark model over the evaluation protocol.
//
//   uqlb-model-server --model eigen --n 100 --seed 7 --reg-file /tmp/reg/job-1.addr
//
// With --reg-file the server binds a free port and publishes "host:port" in
// the file; otherwise it listens on $PORT, --port, or 4242.

#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "uqlb/models/benchmark.hpp"
#include "uqlb/text.hpp"

int main(int argc, char** argv) {
  using namespace uqlb;

  CLI::App app{"uqlb model server"};
  std::string kind = "eigen";
  std::string duration = "const:0";
  std::string lengthscales;
  std::string reg_file;
  std::string train_data;
  std::optional<int> port;
  models::BenchmarkModelSpec spec;
  protocol::ServerOptions server_opts;

  app.add_option("--model", kind, "eigen | gp | synthetic | identity")->capture_default_str();
  app.add_option("--name", spec.name, "model name announced by /info")->capture_default_str();
  app.add_option("--n", spec.n, "eigen: matrix dimension")->capture_default_str();
  app.add_option("--seed", spec.seed, "seed for every random draw")->capture_default_str();
  app.add_option("--train-data", train_data, "gp: training CSV (d inputs, then outputs)");
  app.add_option("--train-n", spec.train_n, "gp: synthetic training points when no CSV")->capture_default_str();
  app.add_option("--outputs", spec.outputs, "gp: output columns")->capture_default_str();
  app.add_option("--signal-variance", spec.signal_variance, "gp: kernel signal variance")->capture_default_str();
  app.add_option("--lengthscales", lengthscales, "gp: comma-separated lengthscales");
  app.add_option("--noise-sd", spec.noise_sd, "gp: observation noise sd")->capture_default_str();
  app.add_option("--duration", duration, "synthetic: duration distribution, e.g. lognormal:0,1")->capture_default_str();
  app.add_option("--input-dim", spec.input_dim, "synthetic/identity: input dimension")->capture_default_str();
  app.add_flag("--busy-wait", spec.busy_wait, "synthetic: spin instead of sleeping");
  app.add_option("--reg-file", reg_file, "publish host:port here and bind a free port");
  app.add_option("--port", port, "listen port when no --reg-file (PORT env wins)");
  app.add_option("--host", server_opts.host, "bind address")->capture_default_str();
  app.add_option("--max-concurrent", server_opts.max_concurrent_evaluations, "in-flight evaluations")
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  // Handle termination synchronously on the main thread.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGTERM);
  sigaddset(&signals, SIGINT);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  try {
    spec.kind = models::parse_model_kind(kind);
    spec.duration = parse_distribution(duration);
    if (!train_data.empty()) spec.train_data = train_data;
    if (!lengthscales.empty()) {
      for (auto part : split(lengthscales, ',')) spec.lengthscales.push_back(parse_double(part));
    }
    auto model = models::make_benchmark_model(spec);

    std::unique_ptr<protocol::ModelServer> server;
    if (!reg_file.empty()) {
      server = models::serve_benchmark(model, reg_file, server_opts);
    } else {
      server_opts.port = protocol::resolve_port(port);
      server = protocol::serve_models({model}, server_opts);
    }
    std::cerr << "serving '" << spec.name << "' (" << kind << ") on " << server->address() << std::endl;

    int sig = 0;
    sigwait(&signals, &sig);
    server->stop();
  } catch (const Error& e) {
    std::cerr << "uqlb-model-server: " << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "uqlb-model-server: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
