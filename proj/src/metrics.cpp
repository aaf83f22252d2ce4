#include "uqlb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>

#include "uqlb/error.hpp"
#include "uqlb/text.hpp"

namespace uqlb::metrics {

using nlohmann::json;

namespace {

std::mutex sink_mutex;
WarningSink current_sink = [](const json& event) { std::cerr << event.dump() << '\n'; };

void warn(const json& event) {
  std::lock_guard lock(sink_mutex);
  if (current_sink) current_sink(event);
}

}  // namespace

ScopedWarningSink::ScopedWarningSink(WarningSink sink) {
  std::lock_guard lock(sink_mutex);
  previous_ = std::exchange(current_sink, std::move(sink));
}

ScopedWarningSink::~ScopedWarningSink() {
  std::lock_guard lock(sink_mutex);
  current_sink = std::move(previous_);
}

void TaskRecord::validate() const {
  if (!(submit_t <= start_t && start_t <= end_t)) {
    throw Error(ErrorCode::InvalidArgument, "task " + std::to_string(task_id) + ": timestamps out of order");
  }
  if (cpu_time.count() < 0) throw Error(ErrorCode::InvalidArgument, "negative cpu_time");
}

Overhead overhead(Nanos makespan, Nanos cpu) {
  if (makespan.count() < 0 || cpu.count() < 0) {
    throw Error(ErrorCode::InvalidArgument, "makespan and cpu must be non-negative");
  }
  if (makespan.count() == 0) return {cpu, Nanos{0}};
  if (makespan < cpu) {
    warn({{"event", "negative_overhead"},
          {"makespan", format_seconds(makespan)},
          {"cpu", format_seconds(cpu)},
          {"clamped_from", format_seconds(makespan - cpu)}});
    return {makespan, Nanos{0}};
  }
  return {makespan, makespan - cpu};
}

double slr(Nanos makespan, Nanos total_cpu) {
  if (total_cpu.count() <= 0) throw Error(ErrorCode::ZeroComputeTime, "sum of compute times is zero");
  return static_cast<double>(makespan.count()) / static_cast<double>(total_cpu.count());
}

double slr(Nanos makespan, const std::vector<TaskRecord>& tasks) {
  Nanos total{0};
  for (const auto& t : tasks) total += t.cpu_time;
  return slr(makespan, total);
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw Error(ErrorCode::EmptyRecords, "quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  const double h = (n + 1.0) * p;  // 1-based rank
  if (h <= 1.0) return values.front();
  if (h >= n) return values.back();
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  return values[lo - 1] + frac * (values[lo] - values[lo - 1]);
}

BoxStats box_stats(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyRecords, "box stats of an empty sample");
  std::sort(values.begin(), values.end());
  BoxStats b;
  b.min = values.front();
  b.max = values.back();
  b.q1 = quantile(values, 0.25);
  b.median = quantile(values, 0.5);
  b.q3 = quantile(values, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;
  b.whisker_lo = b.max;
  b.whisker_hi = b.min;
  for (double v : values) {
    if (v < lo_fence || v > hi_fence) {
      b.outliers.push_back(v);
    } else {
      b.whisker_lo = std::min(b.whisker_lo, v);
      b.whisker_hi = std::max(b.whisker_hi, v);
    }
  }
  return b;
}

MetricsSummary summarize(std::vector<TaskRecord> records, std::optional<Nanos> wall_span) {
  if (records.empty()) throw Error(ErrorCode::EmptyRecords, "no task records");
  for (const auto& r : records) r.validate();
  std::sort(records.begin(), records.end(),
            [](const TaskRecord& a, const TaskRecord& b) { return a.task_id < b.task_id; });

  MetricsSummary s;
  Nanos first = Nanos::max();
  Nanos last = Nanos::min();
  bool all_alloc = true;
  Nanos after_grant{0};
  for (const auto& r : records) {
    first = std::min(first, r.submit_t);
    last = std::max(last, r.end_t);
    s.total_cpu += r.cpu_time;
    if (r.alloc_t) {
      after_grant += r.start_t - *r.alloc_t;
    } else {
      all_alloc = false;
    }
  }
  const auto o = overhead(wall_span.value_or(last - first), s.total_cpu);
  s.makespan = o.makespan;
  s.overhead = o.overhead;
  if (all_alloc) s.overhead_excluding_queue = after_grant;
  s.slr = slr(s.makespan, s.total_cpu);

  std::vector<double> cpu, wait, turnaround;
  for (const auto& r : records) {
    cpu.push_back(to_seconds(r.cpu_time));
    wait.push_back(to_seconds(r.start_t - r.submit_t));
    turnaround.push_back(to_seconds(r.end_t - r.submit_t));
  }
  s.box["cpu_time"] = box_stats(std::move(cpu));
  s.box["wait"] = box_stats(std::move(wait));
  s.box["turnaround"] = box_stats(std::move(turnaround));
  s.per_task = std::move(records);
  return s;
}

std::vector<TaskRecord> records_from_outcomes(const std::vector<backends::SimJobOutcome>& outcomes) {
  std::vector<TaskRecord> out;
  out.reserve(outcomes.size());
  for (const auto& o : outcomes) {
    out.push_back({o.job_id, o.submit_t, o.start_t, o.end_t, o.cpu_time, o.alloc_t});
  }
  return out;
}

void write_records_csv(std::ostream& out, const std::vector<TaskRecord>& records) {
  const bool with_alloc =
      !records.empty() && std::all_of(records.begin(), records.end(), [](const auto& r) { return r.alloc_t; });
  out << "task_id,submit_t,start_t,end_t,cpu_time" << (with_alloc ? ",alloc_t" : "") << '\n';
  for (const auto& r : records) {
    out << r.task_id << ',' << format_seconds(r.submit_t) << ',' << format_seconds(r.start_t) << ','
        << format_seconds(r.end_t) << ',' << format_seconds(r.cpu_time);
    if (with_alloc) out << ',' << format_seconds(*r.alloc_t);
    out << '\n';
  }
}

void write_records_csv(const std::filesystem::path& path, const std::vector<TaskRecord>& records) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_records_csv(out, records);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::vector<TaskRecord> read_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::MalformedBody, path.string() + ": empty file");
  const auto header = split(trim(line), ',');
  const std::vector<std::string_view> base{"task_id", "submit_t", "start_t", "end_t", "cpu_time"};
  const bool with_alloc = header.size() == 6 && header[5] == "alloc_t";
  if (!(header.size() == 5 || with_alloc) || !std::equal(base.begin(), base.end(), header.begin())) {
    throw Error(ErrorCode::MalformedBody, path.string() + ": unexpected header '" + line + "'");
  }
  std::vector<TaskRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), ',');
    if (f.size() != header.size()) {
      throw Error(ErrorCode::MalformedBody, path.string() + ":" + std::to_string(line_no) + ": wrong field count");
    }
    TaskRecord r;
    r.task_id = static_cast<std::uint64_t>(parse_int(f[0]));
    r.submit_t = parse_seconds(f[1]);
    r.start_t = parse_seconds(f[2]);
    r.end_t = parse_seconds(f[3]);
    r.cpu_time = parse_seconds(f[4]);
    if (with_alloc) r.alloc_t = parse_seconds(f[5]);
    try {
      r.validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedBody, path.string() + ":" + std::to_string(line_no) + ": " + e.detail());
    }
    out.push_back(r);
  }
  return out;
}

namespace {

json box_to_json(const BoxStats& b) {
  return {{"min", b.min},       {"q1", b.q1},
          {"median", b.median}, {"q3", b.q3},
          {"max", b.max},       {"whisker_lo", b.whisker_lo},
          {"whisker_hi", b.whisker_hi}, {"outliers", b.outliers}};
}

}  // namespace

json summary_to_json(const MetricsSummary& s) {
  json j{{"tasks", s.per_task.size()},
         {"makespan", to_seconds(s.makespan)},
         {"total_cpu", to_seconds(s.total_cpu)},
         {"overhead", to_seconds(s.overhead)},
         {"overhead_per_task", to_seconds(s.overhead) / static_cast<double>(s.per_task.size())},
         {"slr", s.slr}};
  j["overhead_excluding_queue"] = s.overhead_excluding_queue ? json(to_seconds(*s.overhead_excluding_queue)) : json();
  json box = json::object();
  for (const auto& [name, b] : s.box) box[name] = box_to_json(b);
  j["box"] = std::move(box);
  return j;
}

void write_summary_json(const std::filesystem::path& path, const MetricsSummary& summary, const json& extra) {
  json j = summary_to_json(summary);
  for (const auto& [k, v] : extra.items()) j[k] = v;
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void write_box_csv(std::ostream& out, const std::map<std::string, BoxStats>& box) {
  out << "metric,min,q1,median,q3,max,whisker_lo,whisker_hi,outliers\n";
  for (const auto& [name, b] : box) {
    out << name;
    for (double v : {b.min, b.q1, b.median, b.q3, b.max, b.whisker_lo, b.whisker_hi}) out << ',' << format_double(v);
    out << ',';
    for (std::size_t i = 0; i < b.outliers.size(); ++i) out << (i ? ";" : "") << format_double(b.outliers[i]);
    out << '\n';
  }
}

void write_box_csv(const std::filesystem::path& path, const std::map<std::string, BoxStats>& box) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_box_csv(out, box);
}

std::vector<TaskRecord> read_balancer_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::vector<TaskRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    json e;
    try {
      e = json::parse(line);
    } catch (const json::exception& ex) {
      throw Error(ErrorCode::MalformedBody, path.string() + ": " + ex.what());
    }
    if (e.value("event", "") != "completed") continue;
    try {
      TaskRecord r;
      r.task_id = e.at("request").get<std::uint64_t>();
      r.submit_t = Nanos(e.at("submit_ns").get<std::int64_t>());
      r.start_t = Nanos(e.at("start_ns").get<std::int64_t>());
      r.end_t = Nanos(e.at("end_ns").get<std::int64_t>());
      r.cpu_time = Nanos(e.at("cpu_ns").get<std::int64_t>());
      out.push_back(r);
    } catch (const json::exception& ex) {
      throw Error(ErrorCode::MalformedBody, path.string() + ": completed event: " + ex.what());
    }
  }
  return out;
}

}  // namespace uqlb::metrics
