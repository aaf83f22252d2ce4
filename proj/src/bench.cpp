#include "uqlb/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <set>

#include "uqlb/backends/emulated.hpp"
#include "uqlb/backends/process.hpp"
#include "uqlb/balancer.hpp"
#include "uqlb/error.hpp"
#include "uqlb/text.hpp"

namespace uqlb::bench {

using json = nlohmann::json;
using backends::Nanos;

namespace {

constexpr double kSecondsPerMinute = 60.0;

Nanos minutes_to_desk(double minutes, double seconds_per_minute) {
  return seconds_to_ns(minutes * seconds_per_minute);
}

models::BenchmarkModelSpec model_spec_from_json(const json& j) {
  models::BenchmarkModelSpec m;
  m.kind = models::parse_model_kind(j.value("kind", std::string("eigen")));
  m.name = j.value("name", m.name);
  m.seed = j.value("seed", m.seed);
  m.n = j.value("n", m.n);
  m.tolerance = j.value("tolerance", m.tolerance);
  if (j.contains("train_data")) m.train_data = j.at("train_data").get<std::string>();
  m.train_n = j.value("train_n", m.train_n);
  m.outputs = j.value("outputs", m.outputs);
  m.signal_variance = j.value("signal_variance", m.signal_variance);
  if (j.contains("lengthscales")) m.lengthscales = j.at("lengthscales").get<std::vector<double>>();
  m.noise_sd = j.value("noise_sd", m.noise_sd);
  if (j.contains("duration")) m.duration = distribution_from_json(j.at("duration"));
  m.input_dim = j.value("input_dim", m.input_dim);
  m.busy_wait = j.value("busy_wait", m.busy_wait);
  return m;
}

json model_spec_to_json(const models::BenchmarkModelSpec& m) {
  json j{{"kind", models::to_string(m.kind)}, {"name", m.name}, {"seed", m.seed}};
  switch (m.kind) {
    case models::ModelKind::Eigen:
      j["n"] = m.n;
      j["tolerance"] = m.tolerance;
      break;
    case models::ModelKind::Gp:
      if (m.train_data) j["train_data"] = m.train_data->string();
      j["train_n"] = m.train_n;
      j["outputs"] = m.outputs;
      j["signal_variance"] = m.signal_variance;
      if (!m.lengthscales.empty()) j["lengthscales"] = m.lengthscales;
      j["noise_sd"] = m.noise_sd;
      break;
    case models::ModelKind::Synthetic:
    case models::ModelKind::Identity:
      j["duration"] = distribution_to_json(m.duration);
      j["input_dim"] = m.input_dim;
      j["busy_wait"] = m.busy_wait;
      break;
  }
  return j;
}

std::vector<std::string> server_command(const std::filesystem::path& bin, const models::BenchmarkModelSpec& m) {
  std::vector<std::string> cmd{bin.string(), "--model", models::to_string(m.kind), "--name", m.name,
                               "--seed", std::to_string(m.seed)};
  auto add = [&](const std::string& flag, const std::string& value) {
    cmd.push_back(flag);
    cmd.push_back(value);
  };
  switch (m.kind) {
    case models::ModelKind::Eigen:
      add("--n", std::to_string(m.n));
      break;
    case models::ModelKind::Gp: {
      if (m.train_data) add("--train-data", m.train_data->string());
      add("--train-n", std::to_string(m.train_n));
      add("--outputs", std::to_string(m.outputs));
      add("--signal-variance", format_double(m.signal_variance));
      add("--noise-sd", format_double(m.noise_sd));
      if (!m.lengthscales.empty()) {
        std::string ls;
        for (double v : m.lengthscales) ls += (ls.empty() ? "" : ",") + format_double(v);
        add("--lengthscales", ls);
      }
      break;
    }
    case models::ModelKind::Synthetic:
    case models::ModelKind::Identity:
      add("--duration", format_distribution(m.duration));
      add("--input-dim", std::to_string(m.input_dim));
      if (m.busy_wait) cmd.push_back("--busy-wait");
      break;
  }
  add("--reg-file", "{reg_file}");
  return cmd;
}

clients::ExperimentPlan plan_for(const BenchmarkSuite& suite, std::size_t depth, std::uint64_t seed,
                                 std::size_t n) {
  clients::ExperimentPlan plan;
  plan.model_name = suite.model.name;
  plan.n_evaluations = n;
  plan.queue_depth = depth;
  plan.seed = seed;
  plan.box = suite.box;
  plan.fixed = suite.fixed;
  return plan;
}

void write_artifacts(const std::filesystem::path& dir, const metrics::MetricsSummary& summary, const json& extra) {
  std::filesystem::create_directories(dir);
  metrics::write_records_csv(dir / "records.csv", summary.per_task);
  metrics::write_summary_json(dir / "summary.json", summary, extra);
  metrics::write_box_csv(dir / "box.csv", summary.box);
}

double ratio_or_one(double num, double den) {
  if (den == 0.0) return num == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

}  // namespace

void BenchmarkSuite::validate() const {
  if (name.empty()) throw Error(ErrorCode::InvalidArgument, "suite needs a name");
  if (!(sim_seconds_per_minute > 0.0) || !(live_seconds_per_minute > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "scale factors must be positive");
  }
  const auto& r = resources;
  for (double v : {r.perjob_time_limit, r.bulk_allocation_time, r.bulk_time_request, r.bulk_time_limit}) {
    if (!(v > 0.0)) throw Error(ErrorCode::InvalidArgument, "resource times must be positive");
  }
  if (r.bulk_time_request > r.bulk_time_limit) {
    throw Error(ErrorCode::InvalidArgument, "bulk time request exceeds the time limit");
  }
  if (n_evaluations == 0) throw Error(ErrorCode::InvalidArgument, "n_evaluations must be positive");
  if (depths.empty() || std::find(depths.begin(), depths.end(), 0u) != depths.end()) {
    throw Error(ErrorCode::InvalidArgument, "depths must be a non-empty list of positive values");
  }
  if (seeds.empty()) throw Error(ErrorCode::InvalidArgument, "seeds must not be empty");
  if (box.has_value() == !fixed.empty()) {
    throw Error(ErrorCode::InvalidArgument, "exactly one of box and fixed must be given");
  }
  if (box) box->validate();
  sim.validate();
}

BenchmarkSuite suite_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "suite must be a JSON object");
  BenchmarkSuite s;
  try {
    s.name = j.at("name").get<std::string>();
    s.description = j.value("description", s.description);
    s.in_default = j.value("in_default", s.in_default);
    if (j.contains("scale")) {
      const auto& sc = j.at("scale");
      s.sim_seconds_per_minute = sc.value("sim_seconds_per_minute", s.sim_seconds_per_minute);
      s.live_seconds_per_minute = sc.value("live_seconds_per_minute", s.live_seconds_per_minute);
    }
    const json raw_model = j.value("model", json::object());
    s.model = model_spec_from_json(raw_model);
    if (j.contains("task_minutes")) s.task_minutes = distribution_from_json(j.at("task_minutes"));
    if (j.contains("resources")) {
      const auto& r = j.at("resources");
      s.resources.perjob_time_limit = r.value("perjob_time_limit", s.resources.perjob_time_limit);
      s.resources.bulk_allocation_time = r.value("bulk_allocation_time", s.resources.bulk_allocation_time);
      s.resources.bulk_time_request = r.value("bulk_time_request", s.resources.bulk_time_request);
      s.resources.bulk_time_limit = r.value("bulk_time_limit", s.resources.bulk_time_limit);
      s.resources.cpus = r.value("cpus", s.resources.cpus);
      s.resources.memory_gb = r.value("memory_gb", s.resources.memory_gb);
    }
    if (j.contains("sim")) s.sim = backends::sim_config_from_json(j.at("sim"));
    if (j.contains("plan")) {
      const auto& p = j.at("plan");
      s.n_evaluations = p.value("n", s.n_evaluations);
      if (p.contains("depths")) s.depths = p.at("depths").get<std::vector<std::size_t>>();
      if (p.contains("box")) {
        const auto& b = p.at("box");
        s.box = (b.is_string() && b.get<std::string>() == "gs2") ? gs2_parameter_box() : parameter_box_from_json(b);
      }
      if (p.contains("fixed")) s.fixed = p.at("fixed").get<std::vector<std::vector<double>>>();
      if (p.contains("seeds")) s.seeds = p.at("seeds").get<std::vector<std::uint64_t>>();
    }
    if (s.model.kind == models::ModelKind::Synthetic && !raw_model.contains("duration")) {
      s.model.duration = scaled(s.task_minutes, s.live_seconds_per_minute);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("suite: ") + e.what());
  }
  if (!s.box && s.fixed.empty()) s.fixed = {{0.0}};
  s.validate();
  return s;
}

json to_json(const BenchmarkSuite& s) {
  json plan{{"n", s.n_evaluations}, {"depths", s.depths}, {"seeds", s.seeds}};
  if (s.box) plan["box"] = parameter_box_to_json(*s.box);
  if (!s.fixed.empty()) plan["fixed"] = s.fixed;
  return {{"name", s.name},
          {"description", s.description},
          {"in_default", s.in_default},
          {"scale",
           {{"sim_seconds_per_minute", s.sim_seconds_per_minute},
            {"live_seconds_per_minute", s.live_seconds_per_minute}}},
          {"model", model_spec_to_json(s.model)},
          {"task_minutes", distribution_to_json(s.task_minutes)},
          {"resources",
           {{"perjob_time_limit", s.resources.perjob_time_limit},
            {"bulk_allocation_time", s.resources.bulk_allocation_time},
            {"bulk_time_request", s.resources.bulk_time_request},
            {"bulk_time_limit", s.resources.bulk_time_limit},
            {"cpus", s.resources.cpus},
            {"memory_gb", s.resources.memory_gb}}},
          {"sim", backends::to_json(s.sim)},
          {"plan", plan}};
}

BenchmarkSuite load_suite(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read suite " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedBody, path.string() + ": " + e.what());
  }
  return suite_from_json(j);
}

std::vector<std::string> list_suites(const std::filesystem::path& dir) {
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.path().extension() == ".json") names.push_back(entry.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

BenchmarkSuite find_suite(const std::filesystem::path& dir, const std::string& name) {
  const auto path = dir / (name + ".json");
  if (name.empty() || name.find('/') != std::string::npos || !std::filesystem::exists(path)) {
    std::string known;
    for (const auto& n : list_suites(dir)) known += (known.empty() ? "" : ", ") + n;
    throw Error(ErrorCode::InvalidArgument, "unknown suite '" + name + "' (known: " + known + ")");
  }
  return load_suite(path);
}

std::string to_string(Mode mode) { return mode == Mode::PerJob ? "perjob" : "bulk"; }

std::vector<Mode> parse_modes(const std::string& text) {
  if (text == "perjob") return {Mode::PerJob};
  if (text == "bulk") return {Mode::Bulk};
  if (text == "both") return {Mode::PerJob, Mode::Bulk};
  throw Error(ErrorCode::InvalidArgument, "mode must be perjob, bulk or both, got '" + text + "'");
}

backends::JobSpec job_spec_for(const BenchmarkSuite& suite, Mode mode, double seconds_per_minute) {
  const auto& r = suite.resources;
  backends::JobSpec spec;
  spec.cpus = r.cpus;
  spec.memory_gb = r.memory_gb;
  if (mode == Mode::PerJob) {
    // A per-job allocation has a single time: request and limit coincide.
    spec.mode = backends::AllocationMode::PerJob;
    spec.time_request = minutes_to_desk(r.perjob_time_limit, seconds_per_minute);
    spec.time_limit = spec.time_request;
  } else {
    spec.mode = backends::AllocationMode::Bulk;
    spec.time_request = minutes_to_desk(r.bulk_time_request, seconds_per_minute);
    spec.time_limit = minutes_to_desk(r.bulk_time_limit, seconds_per_minute);
  }
  return spec;
}

backends::AllocationSpec allocation_for(const BenchmarkSuite& suite, double seconds_per_minute) {
  backends::AllocationSpec a;
  a.allocation_time_limit = minutes_to_desk(suite.resources.bulk_allocation_time, seconds_per_minute);
  a.backlog = 1;
  a.workers_per_alloc = 1;
  a.max_worker_count = 1;
  return a;
}

namespace {

backends::SimConfig scaled_delays(const BenchmarkSuite& suite, double seconds_per_minute) {
  // Delays are cluster seconds: one cluster second is 1/60 of a cluster minute.
  const double f = seconds_per_minute / kSecondsPerMinute;
  backends::SimConfig c = suite.sim;
  c.queue_wait = scaled(suite.sim.queue_wait, f);
  c.perjob_launch_overhead = scaled(suite.sim.perjob_launch_overhead, f);
  c.bulk_task_overhead = scaled(suite.sim.bulk_task_overhead, f);
  c.env_reinit_overhead = scaled(suite.sim.env_reinit_overhead, f);
  c.server_init = suite.sim.server_init * f;
  return c;
}

}  // namespace

backends::SimConfig sim_config_for(const BenchmarkSuite& suite, std::uint64_t seed) {
  backends::SimConfig c = scaled_delays(suite, suite.sim_seconds_per_minute);
  c.node_count = 1;
  c.rng_seed = mix_seed(seed, 0x5c4edu);
  return c;
}

std::vector<Nanos> sim_durations(const BenchmarkSuite& suite, std::uint64_t seed) {
  const Distribution desk = scaled(suite.task_minutes, suite.sim_seconds_per_minute);
  Rng rng(mix_seed(seed, 0x7a5cu));
  std::vector<Nanos> out;
  out.reserve(suite.n_evaluations);
  for (std::size_t i = 0; i < suite.n_evaluations; ++i) out.push_back(seconds_to_ns(sample(desk, rng)));
  return out;
}

SimExperiment run_sim_experiment(const BenchmarkSuite& suite, Mode mode, std::size_t depth, std::uint64_t seed) {
  backends::SimOptions opt;
  opt.mode = mode == Mode::PerJob ? backends::AllocationMode::PerJob : backends::AllocationMode::Bulk;
  opt.job = job_spec_for(suite, mode, suite.sim_seconds_per_minute);
  opt.allocation = allocation_for(suite, suite.sim_seconds_per_minute);
  opt.depth = depth;
  SimExperiment e;
  e.outcomes = backends::run_sim(sim_durations(suite, seed), sim_config_for(suite, seed), opt);
  e.summary = metrics::summarize(metrics::records_from_outcomes(e.outcomes));
  return e;
}

LiveBackend parse_live_backend(const std::string& text) {
  if (text == "process") return LiveBackend::Process;
  if (text == "emulated") return LiveBackend::Emulated;
  throw Error(ErrorCode::InvalidArgument, "backend must be process or emulated, got '" + text + "'");
}

LiveExperiment run_live_experiment(const BenchmarkSuite& suite, Mode mode, std::size_t depth, std::uint64_t seed,
                                   const LiveOptions& options) {
  const double spm = suite.live_seconds_per_minute;
  const auto work = options.work_dir.empty() ? std::filesystem::temp_directory_path() / "uqlb-live" : options.work_dir;
  std::filesystem::create_directories(work / "reg");

  balancer::BalancerConfig cfg;
  cfg.max_servers = depth;
  cfg.health_period = balancer::Millis{1000};
  cfg.health_timeout = balancer::Millis{1000};
  cfg.registration_timeout = balancer::Millis{60000};
  cfg.registration_poll = balancer::Millis{20};
  cfg.job_spec = job_spec_for(suite, mode, spm);
  cfg.allocation = allocation_for(suite, spm);
  cfg.reg_dir = work / "reg";
  cfg.model_name = suite.model.name;

  const models::BenchmarkModelSpec model = suite.model;
  if (options.backend == LiveBackend::Process) {
    if (options.model_server_bin.empty()) throw Error(ErrorCode::InvalidArgument, "model server binary not set");
    backends::ProcessBackendOptions po;
    po.allocation = cfg.allocation;
    po.log_dir = work / "logs";
    std::filesystem::create_directories(*po.log_dir);
    cfg.backend = std::make_shared<backends::ProcessBackend>(po);
    cfg.job_spec.command = server_command(options.model_server_bin, model);
  } else {
    backends::EmulatedBackendOptions eo;
    eo.delays = scaled_delays(suite, spm);
    eo.delays.rng_seed = mix_seed(seed, 0x5c4edu);
    eo.allocation = cfg.allocation;
    cfg.backend = std::make_shared<backends::EmulatedBackend>(eo, [model](const std::filesystem::path& reg) {
      protocol::ServerOptions so;
      so.port = 0;
      return models::serve_benchmark(models::make_benchmark_model(model), reg, so);
    });
  }

  std::ofstream event_log(work / "events.jsonl");
  cfg.event_stream = &event_log;

  LiveExperiment out;
  balancer::Balancer lb(cfg);
  {
    protocol::ServerOptions fo;
    fo.port = 0;
    balancer::BalancerFront front(lb, fo);
    auto plan = plan_for(suite, depth, seed, options.n_evaluations.value_or(suite.n_evaluations));
    plan.model_url = front.address();
    plan.max_consecutive_failures = options.max_consecutive_failures;
    // Generous: a request may wait for a server to be started first.
    plan.client.read_timeout = std::chrono::duration_cast<std::chrono::milliseconds>(
        cfg.registration_timeout + cfg.job_spec.time_limit + std::chrono::seconds(30));
    out.result = clients::run_experiment(plan);
    front.stop();
  }
  out.events = lb.events();
  out.spawns = lb.spawn_count();
  lb.shutdown();
  if (!out.result.records.empty()) out.summary = metrics::summarize(out.result.records, out.result.wall_span);
  return out;
}

RunReport run_suite(const BenchmarkSuite& suite, const RunOptions& options) {
  suite.validate();
  const auto depths = options.depths.empty() ? suite.depths : options.depths;
  RunReport report;
  auto note = [&](const std::string& line) {
    if (options.log) *options.log << line << std::endl;
  };

  for (Mode mode : options.modes) {
    for (std::size_t depth : depths) {
      const auto base = options.results_dir / suite.name / to_string(mode) / std::to_string(depth);
      for (std::size_t rep = 0; rep < suite.seeds.size(); ++rep) {
        const auto dir = rep == 0 ? base : base / ("rep-" + std::to_string(rep));
        const std::uint64_t seed = suite.seeds[rep];
        const std::string label =
            suite.name + " " + to_string(mode) + " depth " + std::to_string(depth) + " seed " + std::to_string(seed);
        ++report.experiments;
        json extra{{"suite", suite.name},
                   {"mode", to_string(mode)},
                   {"depth", depth},
                   {"seed", seed},
                   {"source", options.sim ? "sim" : "live"}};
        try {
          if (options.sim) {
            const auto e = run_sim_experiment(suite, mode, depth, seed);
            write_artifacts(dir, e.summary, extra);
          } else {
            LiveOptions lo = options.live;
            lo.work_dir = dir;
            std::filesystem::create_directories(dir);
            const auto e = run_live_experiment(suite, mode, depth, seed, lo);
            extra["backend"] = lo.backend == LiveBackend::Process ? "process" : "emulated";
            extra["spawns"] = e.spawns;
            extra["max_in_flight"] = e.result.max_in_flight;
            extra["failures"] = e.result.failures;
            if (e.result.records.empty()) {
              throw Error(ErrorCode::UpstreamFailure, "no evaluation succeeded");
            }
            write_artifacts(dir, e.summary, extra);
            if (!e.result.complete) {
              std::string why = std::to_string(e.result.failures) + " evaluations failed";
              if (!e.result.failure_messages.empty()) why += " (first: " + e.result.failure_messages.front() + ")";
              throw Error(ErrorCode::UpstreamFailure, why);
            }
          }
          report.written.push_back(dir / "summary.json");
          note("ok      " + label + " -> " + dir.string());
        } catch (const std::exception& e) {
          ++report.failed;
          report.failures.push_back(label + ": " + e.what());
          note("FAILED  " + label + ": " + e.what());
        }
      }
    }
  }
  return report;
}

namespace {

std::map<std::string, std::filesystem::path> summaries_below(const std::filesystem::path& root) {
  if (!std::filesystem::is_directory(root)) {
    throw Error(ErrorCode::IoError, "no result directory " + root.string());
  }
  std::map<std::string, std::filesystem::path> out;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
    if (entry.path().filename() != "summary.json") continue;
    auto key = std::filesystem::relative(entry.path().parent_path(), root).generic_string();
    out[key] = entry.path();
  }
  return out;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedBody, path.string() + ": " + e.what());
  }
}

}  // namespace

std::vector<ComparisonRow> compare(const std::filesystem::path& a, const std::filesystem::path& b) {
  const auto sa = summaries_below(a);
  const auto sb = summaries_below(b);
  for (const auto& [key, _] : sa) {
    if (!sb.count(key)) throw Error(ErrorCode::KeyMismatch, "key '" + key + "' missing from " + b.string());
  }
  for (const auto& [key, _] : sb) {
    if (!sa.count(key)) throw Error(ErrorCode::KeyMismatch, "key '" + key + "' missing from " + a.string());
  }
  if (sa.empty()) throw Error(ErrorCode::KeyMismatch, "no summary.json below " + a.string());

  std::vector<ComparisonRow> rows;
  for (const auto& [key, path_a] : sa) {
    const json ja = read_json(path_a);
    const json jb = read_json(sb.at(key));
    ComparisonRow r;
    r.key = key;
    try {
      r.makespan_a = ja.at("makespan").get<double>();
      r.makespan_b = jb.at("makespan").get<double>();
      r.overhead_a = ja.at("overhead").get<double>();
      r.overhead_b = jb.at("overhead").get<double>();
      r.slr_a = ja.at("slr").get<double>();
      r.slr_b = jb.at("slr").get<double>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::MalformedBody, "summary '" + key + "': " + e.what());
    }
    r.makespan_ratio = ratio_or_one(r.makespan_b, r.makespan_a);
    r.overhead_ratio = ratio_or_one(r.overhead_a, r.overhead_b);
    r.makespan_reduction = 1.0 - r.makespan_ratio;
    r.overhead_flag = r.overhead_ratio >= kOverheadRatioFlag;
    r.makespan_flag = r.makespan_reduction >= kMakespanReductionFlag;
    rows.push_back(r);
  }
  return rows;
}

void write_comparison(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  const auto flags = out.flags();
  out << std::left << std::setw(12) << "key" << std::right << std::setw(13) << "makespan_a" << std::setw(13)
      << "makespan_b" << std::setw(10) << "ratio" << std::setw(13) << "overhead_a" << std::setw(13) << "overhead_b"
      << std::setw(12) << "oh_ratio" << std::setw(9) << "slr_a" << std::setw(9) << "slr_b" << "  flags\n";
  for (const auto& r : rows) {
    out << std::left << std::setw(12) << r.key << std::right << std::fixed << std::setprecision(4) << std::setw(13)
        << r.makespan_a << std::setw(13) << r.makespan_b << std::setw(10) << r.makespan_ratio << std::setw(13)
        << r.overhead_a << std::setw(13) << r.overhead_b << std::setw(12) << std::setprecision(2) << r.overhead_ratio
        << std::setw(9) << std::setprecision(3) << r.slr_a << std::setw(9) << r.slr_b << "  ";
    if (r.overhead_flag) out << "[overhead>=1000x] ";
    if (r.makespan_flag) out << "[makespan-38%]";
    out << '\n';
  }
  out.flags(flags);
}

json comparison_to_json(const std::vector<ComparisonRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"key", r.key},
                   {"makespan_a", r.makespan_a},
                   {"makespan_b", r.makespan_b},
                   {"overhead_a", r.overhead_a},
                   {"overhead_b", r.overhead_b},
                   {"slr_a", r.slr_a},
                   {"slr_b", r.slr_b},
                   {"makespan_ratio", r.makespan_ratio},
                   {"overhead_ratio", std::isfinite(r.overhead_ratio) ? json(r.overhead_ratio) : json("inf")},
                   {"makespan_reduction", r.makespan_reduction},
                   {"overhead_flag", r.overhead_flag},
                   {"makespan_flag", r.makespan_flag}});
  }
  return arr;
}

}  // namespace uqlb::bench
