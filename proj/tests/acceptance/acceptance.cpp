// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any
// fails. Each line carries the measured values next to the bound.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <csignal>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "oracles.hpp"
#include "uqlb/backends/process.hpp"
#include "uqlb/backends/simulator.hpp"
#include "uqlb/balancer.hpp"
#include "uqlb/bench.hpp"
#include "uqlb/clients/qoi.hpp"
#include "uqlb/error.hpp"
#include "uqlb/metrics.hpp"
#include "uqlb/models/eigen.hpp"
#include "uqlb/models/gp.hpp"
#include "uqlb/text.hpp"

using namespace uqlb;
using metrics::Nanos;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bench::BenchmarkSuite suite(const std::string& name) { return bench::find_suite(UQLB_SUITES_DIR, name); }

// 1. Per-task scheduling overhead, PerJob against Bulk, on the simulator.
void overhead_ratio(Outcome& o) {
  const auto t0 = Clock::now();
  const std::vector<Nanos> durations(100, std::chrono::milliseconds(10));
  backends::JobSpec job;
  job.time_request = job.time_limit = std::chrono::hours(1);
  backends::AllocationSpec alloc;
  alloc.allocation_time_limit = std::chrono::hours(10);

  double perjob_sum = 0.0;
  double bulk_sum = 0.0;
  double ratio_sum = 0.0;
  const int seeds = 50;
  for (int seed = 0; seed < seeds; ++seed) {
    backends::SimConfig cfg;
    cfg.queue_wait = UniformDist{1.0, 10.0};
    cfg.perjob_launch_overhead = ConstantDist{2.0};
    cfg.env_reinit_overhead = UniformDist{0.5, 2.0};
    cfg.bulk_task_overhead = ConstantDist{0.001};
    cfg.server_init = 0.0;
    cfg.node_count = 1;
    cfg.rng_seed = static_cast<std::uint64_t>(seed);

    auto per_task = [&](backends::AllocationMode mode) {
      backends::SimOptions opts;
      opts.mode = mode;
      opts.job = job;
      opts.job.mode = mode;
      opts.allocation = alloc;
      const auto out = backends::run_sim(durations, cfg, opts);
      const auto oh = metrics::overhead(backends::sim_makespan(out), backends::sim_total_cpu(out));
      return to_seconds(oh.overhead) / static_cast<double>(out.size());
    };
    const double p = per_task(backends::AllocationMode::PerJob);
    const double b = per_task(backends::AllocationMode::Bulk);
    perjob_sum += p;
    bulk_sum += b;
    ratio_sum += p / b;
  }
  const double ratio = perjob_sum / bulk_sum;
  const double elapsed = seconds_since(t0);
  o.detail << "per-task overhead perjob " << perjob_sum / seeds << " s, bulk " << bulk_sum / seeds
           << " s, ratio of means " << ratio << " (mean of ratios " << ratio_sum / seeds << "), bound >= 100; "
           << elapsed << " s";
  o.require(ratio >= 100.0, "ratio >= 100");
  o.require(elapsed < 10.0, "runtime < 10 s");
}

// E[clamp(X, a, b)] for X ~ LogNormal(mu, sigma^2), Simpson's rule in log space.
double clamped_lognormal_mean(double mu, double sigma, double a, double b) {
  const int n = 200000;
  const double lo = mu - 12.0 * sigma;
  const double h = 24.0 * sigma / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double y = lo + i * h;
    const double z = (y - mu) / sigma;
    const double pdf = std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * std::clamp(std::exp(y), a, b) * pdf;
  }
  return acc * h / 3.0;
}

// 2. Long-task makespan, Bulk against PerJob, on the GS2-like suite.
void makespan_reduction(Outcome& o) {
  const auto s = suite("synthetic-gs2");
  const auto* task = std::get_if<LogNormalDist>(&s.task_minutes);
  o.require(task != nullptr, "lognormal task times");
  if (!task) return;
  const double lo = task->min * s.sim_seconds_per_minute;
  const double hi = task->max * s.sim_seconds_per_minute;
  const double mean_minutes = clamped_lognormal_mean(task->mu, task->sigma, task->min, task->max);
  const double reinit_seconds = mean(s.sim.env_reinit_overhead);  // cluster seconds
  const double calibration = reinit_seconds / (60.0 * mean_minutes);
  o.detail << "task range [" << lo << ", " << hi << "] s, reinit/mean task " << calibration << ";";
  o.require(std::abs(lo - 0.06) < 1e-12 && std::abs(hi - 10.8) < 1e-9, "range [0.06, 10.8] s");
  o.require(std::abs(calibration - 0.6) < 1e-3, "reinit calibrated to 0.6x mean");

  for (std::size_t depth : s.depths) {
    double perjob = 0.0;
    double bulk = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      perjob += to_seconds(bench::run_sim_experiment(s, bench::Mode::PerJob, depth, seed).summary.makespan);
      bulk += to_seconds(bench::run_sim_experiment(s, bench::Mode::Bulk, depth, seed).summary.makespan);
    }
    const double ratio = bulk / perjob;
    o.detail << " depth " << depth << ": bulk/perjob " << ratio << " (reduction " << 1.0 - ratio << ")";
    o.require(ratio <= 0.70, "depth " + std::to_string(depth) + " ratio <= 0.70");
  }
  o.detail << ", bound <= 0.70";
}

// 3. Schedule length ratio.
void slr_sanity(Outcome& o) {
  double lowest = std::numeric_limits<double>::infinity();
  std::size_t experiments = 0;
  for (const auto& name : bench::list_suites(UQLB_SUITES_DIR)) {
    const auto s = suite(name);
    for (auto mode : {bench::Mode::PerJob, bench::Mode::Bulk})
      for (std::size_t depth : s.depths)
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
          lowest = std::min(lowest, bench::run_sim_experiment(s, mode, depth, seed).summary.slr);
          ++experiments;
        }
  }
  o.detail << "min SLR over " << experiments << " sim experiments " << lowest << " (bound >= 1);";
  o.require(lowest >= 1.0, "SLR >= 1");

  double worst = 0.0;
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<int> ms(1, 500);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Nanos> durations(1 + gen() % 50);
    for (auto& d : durations) d = std::chrono::milliseconds(ms(gen));
    backends::SimConfig cfg;
    cfg.server_init = 0.0;
    cfg.rng_seed = static_cast<std::uint64_t>(trial);
    backends::SimOptions opts;
    opts.job.time_request = opts.job.time_limit = std::chrono::hours(1);
    const auto out = backends::run_sim(durations, cfg, opts);
    const double slr = metrics::slr(backends::sim_makespan(out), backends::sim_total_cpu(out));
    worst = std::max(worst, std::abs(slr - 1.0));
  }
  o.detail << " zero-overhead single node max |SLR - 1| " << worst << " (bound 1e-9)";
  o.require(worst <= 1e-9, "zero-overhead SLR = 1");
}

// 4. Zero measured makespan.
void zero_makespan(Outcome& o) {
  const Nanos cpu = std::chrono::milliseconds(400);
  const auto oh = metrics::overhead(Nanos{0}, cpu);
  o.detail << "overhead(0, 0.4 s) -> makespan " << to_seconds(oh.makespan) << " s, overhead "
           << to_seconds(oh.overhead) << " s;";
  o.require(oh.makespan == cpu && oh.overhead == Nanos{0}, "overhead() rule");

  metrics::TaskRecord r;
  r.task_id = 0;
  r.submit_t = r.start_t = r.end_t = Nanos{1000};
  r.cpu_time = cpu;
  const auto s = metrics::summarize({r});
  o.detail << " summarize -> makespan " << to_seconds(s.makespan) << " s, overhead " << to_seconds(s.overhead)
           << " s";
  o.require(s.makespan == cpu && s.overhead == Nanos{0}, "summarize() rule");
}

// 5. GP posterior against a dense-inverse oracle.
void gp_oracle(Outcome& o) {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(2718);
  double worst_mean = 0.0;
  double worst_var = 0.0;
  double worst_interp = 0.0;
  double worst_train_var = 0.0;
  bool bounds = true;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + gen() % 20;
    const std::size_t d = 1 + gen() % 7;
    // Points at least two lengthscales apart keep the noise-free Gram matrix
    // well conditioned.
    std::uniform_real_distribution<double> ell_dist(0.2, 0.5);
    models::SquaredExponentialKernel kernel;
    kernel.signal_variance = 0.5 + static_cast<double>(gen() % 4);
    for (std::size_t q = 0; q < d; ++q) kernel.lengthscales.push_back(ell_dist(gen));
    const double half = 0.5 * static_cast<double>(n) + 1.0;
    std::uniform_real_distribution<double> u(-half, half);
    oracle::Dense dense;
    while (dense.size() < n) {
      std::vector<double> p(d);
      for (auto& v : p) v = u(gen);
      bool far = true;
      for (const auto& other : dense) {
        double r2 = 0.0;
        for (std::size_t q = 0; q < d; ++q) r2 += std::pow((p[q] - other[q]) / kernel.lengthscales[q], 2);
        far = far && r2 >= 4.0;
      }
      if (far) dense.push_back(p);
    }
    Matrix x(n, d);
    std::vector<double> y(n);
    std::uniform_real_distribution<double> yd(-2.0, 2.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t q = 0; q < d; ++q) x(i, q) = dense[i][q];
      y[i] = yd(gen);
    }
    const auto gp = models::GpModel::fit(x, y, kernel, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = gp.predict(x.row(i));
      worst_interp = std::max(worst_interp, std::abs(p.mean - y[i]));
      worst_train_var = std::max(worst_train_var, p.variance);
    }
    for (int q = 0; q < 20; ++q) {
      std::vector<double> xs(d);
      for (auto& v : xs) v = u(gen);
      const auto got = gp.predict(xs);
      const auto want = oracle::gp_posterior(dense, y, kernel.signal_variance, kernel.lengthscales, 0.0, xs);
      worst_mean = std::max(worst_mean, std::abs(got.mean - want.mean));
      worst_var = std::max(worst_var, std::abs(got.variance - std::max(want.variance, 0.0)));
      bounds = bounds && got.variance >= 0.0 && got.variance <= kernel.signal_variance + 1e-9;
    }
  }
  const double elapsed = seconds_since(t0);
  o.detail << "20 sets: max |mean - oracle| " << worst_mean << ", max |var - oracle| " << worst_var
           << " (bound 1e-8); interpolation error " << worst_interp << ", variance at data " << worst_train_var
           << "; " << elapsed << " s";
  o.require(worst_mean <= 1e-8 && worst_var <= 1e-8, "oracle agreement");
  o.require(worst_interp <= 1e-8 && worst_train_var <= 1e-8 && bounds, "interpolation and variance bounds");
  o.require(elapsed < 5.0, "runtime < 5 s");
}

// 6. Eigen solver.
void eigen_correctness(Outcome& o) {
  const auto t0 = Clock::now();
  const auto a = models::random_symmetric_matrix(100, 0);
  const auto eig = models::eigen_solve(models::EigenTask{100, 0, 1e-10});
  double sum = 0.0;
  double trace = 0.0;
  for (double v : eig.values) sum += v;
  for (std::size_t i = 0; i < 100; ++i) trace += a(i, i);
  const double trace_rel = std::abs(sum - trace) / std::max(1.0, std::abs(trace));
  const double residual = models::max_residual(a, eig) / a.frobenius_norm();

  double det_rel = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto b = models::random_symmetric_matrix(8, seed);
    double product = 1.0;
    for (double v : models::jacobi_eigen(b).values) product *= v;
    oracle::Dense d(8, std::vector<double>(8));
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 8; ++j) d[i][j] = b(i, j);
    const double det = oracle::cofactor_determinant(d);
    det_rel = std::max(det_rel, std::abs(product - det) / std::abs(det));
  }
  const double elapsed = seconds_since(t0);
  o.detail << "n=100 trace rel " << trace_rel << ", residual/|A|_F " << residual << "; n=8 det rel " << det_rel
           << " (bounds 1e-6); " << elapsed << " s";
  o.require(trace_rel <= 1e-6, "trace");
  o.require(residual <= 1e-6, "residual");
  o.require(det_rel <= 1e-6, "determinant");
  o.require(elapsed < 10.0, "runtime < 10 s");
}

std::vector<nlohmann::json> events_named(const balancer::Balancer& b, const std::string& name) {
  std::vector<nlohmann::json> out;
  for (const auto& e : b.events())
    if (e["event"] == name) out.push_back(e);
  return out;
}

// 7. First come, first served on one server that keeps getting killed.
void fcfs(Outcome& o) {
  const auto reg_dir = std::filesystem::temp_directory_path() / ("uqlb_accept_fcfs_" + std::to_string(::getpid()));
  std::filesystem::remove_all(reg_dir);
  std::filesystem::create_directories(reg_dir);
  auto process = std::make_shared<backends::ProcessBackend>();
  balancer::BalancerConfig cfg;
  cfg.backend = process;
  cfg.reg_dir = reg_dir;
  cfg.health_period = std::chrono::milliseconds(100);
  cfg.health_timeout = std::chrono::milliseconds(500);
  cfg.registration_poll = std::chrono::milliseconds(20);
  cfg.registration_timeout = std::chrono::seconds(10);
  cfg.sync_before_poll = false;
  cfg.max_servers = 1;
  cfg.job_spec.mode = backends::AllocationMode::Bulk;
  cfg.job_spec.command = {UQLB_MODEL_SERVER_BIN, "--model", "eigen", "--n", "4", "--reg-file", "{reg_file}"};

  const int total = 500;
  std::atomic<int> ok{0};
  std::atomic<int> failed{0};
  std::atomic<int> answered{0};
  int kills = 0;
  {
    balancer::Balancer b(cfg);
    std::vector<std::thread> clients;
    std::mt19937_64 gen(500);
    std::uniform_int_distribution<int> gap_us(0, 4000);
    std::thread killer([&] {
      for (int k = 1; k <= 5; ++k) {
        while (answered < k * total / 6) std::this_thread::sleep_for(std::chrono::milliseconds(2));
        bool done = false;
        while (!done && answered < total) {
          for (const auto& ep : b.endpoints())
            if (ep.backend_job && ep.state == balancer::EndpointState::Ready)
              if (auto pid = process->pid(*ep.backend_job)) done = ::kill(*pid, SIGKILL) == 0;
          if (!done) std::this_thread::sleep_for(std::chrono::milliseconds(2));
        }
        if (done) ++kills;
      }
    });
    std::atomic<int> in_flight{0};
    for (int i = 0; i < total; ++i) {
      while (in_flight >= 32) std::this_thread::sleep_for(std::chrono::microseconds(200));
      ++in_flight;
      clients.emplace_back([&, i] {
        const auto r = b.dispatch({"modelname", {{static_cast<double>(i)}}, protocol::empty_config()});
        (r.ok() ? ok : failed)++;
        ++answered;
        --in_flight;
      });
      std::this_thread::sleep_for(std::chrono::microseconds(gap_us(gen)));
    }
    for (auto& t : clients) t.join();
    killer.join();

    // Arrival order is the enqueue sequence; each request's first dispatch
    // must follow it. Later dispatches of a request are retries.
    std::set<std::uint64_t> seen;
    std::uint64_t previous = 0;
    bool ordered = true;
    for (const auto& e : events_named(b, "dispatch")) {
      const auto seq = e["request"].get<std::uint64_t>();
      if (!seen.insert(seq).second) continue;
      ordered = ordered && seq > previous;
      previous = seq;
    }
    const auto completed = events_named(b, "completed").size();
    const auto retries = events_named(b, "retry").size();
    o.detail << total << " requests, " << kills << " kills: " << ok << " ok, " << failed << " failed, "
             << total - ok - failed << " unanswered, " << retries << " retries, first dispatches "
             << (ordered ? "in" : "out of") << " arrival order";
    o.require(kills == 5, "5 kills injected");
    o.require(ok + failed == total && static_cast<int>(completed) == ok, "every request answered once");
    o.require(failed == 0, "zero lost responses");
    o.require(ordered && seen.size() == static_cast<std::size_t>(total), "dispatch order equals arrival order");
  }
  std::filesystem::remove_all(reg_dir);
}

// 8. Live end-to-end through the balancer and real model server processes.
void live_end_to_end(Outcome& o) {
  const auto s = suite("eigen-100");
  const auto work = std::filesystem::temp_directory_path() / ("uqlb_accept_live_" + std::to_string(::getpid()));
  std::filesystem::remove_all(work);
  for (auto mode : {bench::Mode::PerJob, bench::Mode::Bulk}) {
    const auto t0 = Clock::now();
    bench::LiveOptions opts;
    opts.backend = bench::LiveBackend::Process;
    opts.model_server_bin = UQLB_MODEL_SERVER_BIN;
    opts.work_dir = work / bench::to_string(mode);
    opts.n_evaluations = 20;
    const auto e = bench::run_live_experiment(s, mode, 2, 0, opts);
    const double elapsed = seconds_since(t0);
    std::size_t preflight_before_first = 0;
    for (const auto& ev : e.events) {
      if (ev["event"] == "dispatch") break;
      if (ev["event"] == "preflight") ++preflight_before_first;
    }
    o.detail << bench::to_string(mode) << ": " << e.result.records.size() << "/20 complete, "
             << preflight_before_first << " preflight queries before first dispatch, max in flight "
             << e.result.max_in_flight << ", " << elapsed << " s; ";
    const auto tag = bench::to_string(mode) + " ";
    o.require(e.result.complete && e.result.records.size() == 20, tag + "all 20 complete");
    o.require(preflight_before_first >= 5, tag + ">= 5 preflight queries");
    o.require(e.result.max_in_flight <= 2, tag + "in flight <= 2");
    o.require(elapsed < 120.0, tag + "wall time < 2 min");
  }
  std::filesystem::remove_all(work);
}

// 9. Quadrature.
void quadrature(Outcome& o) {
  clients::QoIConfig cfg;
  cfg.q0 = 2.0;
  cfg.lambda = 3.0;
  cfg.alpha = 2.5;
  cfg.rho_star = 0.5;
  cfg.c_s = 4.0;
  const double p = clients::qoi_prefactor(cfg);

  const double constant_err = std::abs(clients::qoi_integral([](double, double) { return 1.7; }, cfg) - p * 1.7);

  // f = theta, theta_max = 2, and f = k_y on [0, 2]: trapezoid is exact on
  // linear integrands, so the bound is rounding only.
  auto c_theta = cfg;
  c_theta.theta_max = 2.0;
  const double theta_err = std::abs(clients::qoi_integral([](double, double th) { return th; }, c_theta) - p);
  auto c_ky = cfg;
  c_ky.ky_max = 2.0;
  const double ky_err = std::abs(clients::qoi_integral([](double ky, double) { return ky; }, c_ky) - 2.0 * p);

  // f = theta^2 on [0, 2]: error at most (1/theta_max)(b - a) h^2 max|f''| / 12.
  clients::QoIConfig quad;
  quad.theta_max = 2.0;
  bool within = true;
  for (std::size_t n : {2u, 3u, 5u, 9u, 33u}) {
    quad.theta_nodes = n;
    const double h = 2.0 / static_cast<double>(n - 1);
    const double bound = 0.5 * 2.0 * h * h * 2.0 / 12.0;
    within = within &&
             std::abs(clients::qoi_integral([](double, double th) { return th * th; }, quad) - 4.0 / 3.0) <=
                 bound + 1e-14;
  }

  // sin(k_y) theta^2 on the unit square: halving h should cut the error ~4x.
  const double exact = (1.0 - std::cos(1.0)) / 3.0;
  clients::QoIConfig conv;
  double previous = 0.0;
  double worst_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t n : {4u, 8u, 16u, 32u, 64u}) {
    conv.ky_nodes = conv.theta_nodes = n;
    const double err =
        std::abs(clients::qoi_integral([](double ky, double th) { return std::sin(ky) * th * th; }, conv) - exact);
    if (previous > 0.0) worst_ratio = std::min(worst_ratio, previous / err);
    previous = err;
  }
  o.detail << "constant err " << constant_err << ", theta err " << theta_err << ", k_y err " << ky_err
           << " (bound 1e-10); quadratic within trapezoid bound: " << (within ? "yes" : "no")
           << "; min convergence ratio " << worst_ratio << " (bound >= 3.9)";
  o.require(constant_err <= 1e-10 && theta_err <= 1e-10 && ky_err <= 1e-10, "analytic examples");
  o.require(within, "trapezoid error bound");
  o.require(worst_ratio >= 3.9, "convergence order");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"overhead-reduction-sim", overhead_ratio},
      {"makespan-reduction-long-tasks", makespan_reduction},
      {"slr-sanity", slr_sanity},
      {"zero-makespan-rule", zero_makespan},
      {"gp-oracle-equivalence", gp_oracle},
      {"eigen-correctness", eigen_correctness},
      {"fcfs-under-kills", fcfs},
      {"end-to-end-live", live_end_to_end},
      {"quadrature", quadrature},
  };
  std::cout << std::setprecision(4);
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      check(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail.str() << std::endl;
  }
  std::cout << criteria.size() - failures << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
