#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "uqlb/backends/simulator.hpp"
#include "uqlb/error.hpp"
#include "uqlb/metrics.hpp"
#include "uqlb/text.hpp"

using namespace uqlb;
using namespace uqlb::metrics;
using std::chrono::milliseconds;
using std::chrono::seconds;

namespace {

struct Captured {
  std::vector<nlohmann::json> events;
  ScopedWarningSink sink{[this](const nlohmann::json& e) { events.push_back(e); }};
};

TaskRecord rec(std::uint64_t id, double submit, double start, double end, double cpu) {
  return {id, seconds_to_ns(submit), seconds_to_ns(start), seconds_to_ns(end), seconds_to_ns(cpu), std::nullopt};
}

std::vector<TaskRecord> random_records(Rng& rng, std::size_t n) {
  std::vector<TaskRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto submit = milliseconds(rng.below(10000));
    const auto start = submit + milliseconds(rng.below(5000));
    const auto cpu = milliseconds(1 + rng.below(3000));
    out.push_back({i, submit, start, start + cpu, cpu, std::nullopt});
  }
  return out;
}

}  // namespace

TEST(Overhead, Examples) {
  Captured cap;
  EXPECT_EQ(overhead(seconds(100), seconds(60)).overhead, seconds(40));
  EXPECT_EQ(overhead(seconds(5), seconds(5)).overhead, seconds(0));
  const auto zero = overhead(seconds(0), milliseconds(400));
  EXPECT_EQ(zero.overhead, Nanos{0});
  EXPECT_EQ(zero.makespan, milliseconds(400));
  EXPECT_TRUE(cap.events.empty());
}

TEST(Overhead, ClampEmitsWarning) {
  Captured cap;
  const auto o = overhead(seconds(3), seconds(5));
  EXPECT_EQ(o.overhead, Nanos{0});
  EXPECT_EQ(o.makespan, seconds(3));
  ASSERT_EQ(cap.events.size(), 1u);
  EXPECT_EQ(cap.events[0]["event"], "negative_overhead");
}

// Every clamp is observable, and only clamps produce warnings.
TEST(Overhead, ClampPropertyWithCapture) {
  Captured cap;
  Rng rng(4);
  std::size_t clamps = 0;
  for (int i = 0; i < 1000; ++i) {
    const Nanos m(1 + static_cast<std::int64_t>(rng.below(1000)));
    const Nanos c(static_cast<std::int64_t>(rng.below(1000)));
    const auto o = overhead(m, c);
    EXPECT_GE(o.overhead, Nanos{0});
    if (m < c) {
      ++clamps;
      EXPECT_EQ(o.overhead, Nanos{0});
    } else {
      EXPECT_EQ(o.overhead + c, m);
    }
  }
  EXPECT_GT(clamps, 0u);
  EXPECT_EQ(cap.events.size(), clamps);
}

TEST(Slr, Examples) {
  EXPECT_DOUBLE_EQ(slr(seconds(30), std::vector<TaskRecord>{rec(0, 0, 0, 10, 10), rec(1, 0, 0, 5, 5),
                                                            rec(2, 0, 0, 5, 5)}),
                   1.5);
  EXPECT_DOUBLE_EQ(slr(seconds(20), seconds(20)), 1.0);
  EXPECT_DOUBLE_EQ(slr(seconds(60), seconds(20)), 3.0);
  try {
    slr(seconds(1), Nanos{0});
    FAIL() << "expected ZeroComputeTime";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroComputeTime);
  }
}

TEST(Slr, RoundTripIdentity) {
  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    const Nanos m(1 + static_cast<std::int64_t>(rng.below(1000000000000ULL)));
    const Nanos c(1 + static_cast<std::int64_t>(rng.below(1000000000000ULL)));
    const double s = slr(m, c);
    const double back = s * static_cast<double>(c.count());
    EXPECT_NEAR(back, static_cast<double>(m.count()), 4.0 * std::abs(back) * 1e-16 + 1.0);
  }
}

TEST(Quantile, TypeSixValues) {
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 0.25), 1.25);
  EXPECT_DOUBLE_EQ(quantile({4, 3, 2, 1}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 0.75), 3.75);
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4, 5, 6, 7}, 0.25), 2.0);
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4, 5, 6, 7}, 0.75), 6.0);
  // Ranks outside [1, n] clamp to the extremes.
  EXPECT_DOUBLE_EQ(quantile({1, 2}, 0.1), 1.0);
  EXPECT_DOUBLE_EQ(quantile({1, 2}, 0.9), 2.0);
  EXPECT_DOUBLE_EQ(quantile({7}, 0.5), 7.0);
}

TEST(BoxStats, TukeyWhiskersAndOutliers) {
  const auto b = box_stats({1, 2, 3, 4, 5, 6, 7, 100});
  EXPECT_DOUBLE_EQ(b.q1, 2.25);
  EXPECT_DOUBLE_EQ(b.median, 4.5);
  EXPECT_DOUBLE_EQ(b.q3, 6.75);
  EXPECT_DOUBLE_EQ(b.whisker_lo, 1.0);
  EXPECT_DOUBLE_EQ(b.whisker_hi, 7.0);
  EXPECT_EQ(b.outliers, std::vector<double>{100.0});
  EXPECT_DOUBLE_EQ(b.min, 1.0);
  EXPECT_DOUBLE_EQ(b.max, 100.0);
}

TEST(BoxStats, DegenerateDistribution) {
  const auto b = box_stats(std::vector<double>(9, 2.5));
  EXPECT_EQ(b.q1, b.median);
  EXPECT_EQ(b.median, b.q3);
  EXPECT_TRUE(b.outliers.empty());
}

TEST(BoxStats, OrderingProperty) {
  Rng rng(21);
  for (int t = 0; t < 300; ++t) {
    std::vector<double> v;
    for (std::size_t i = 0, n = 1 + rng.below(40); i < n; ++i) v.push_back(rng.uniform(-5, 5) * rng.uniform(0, 3));
    const auto b = box_stats(v);
    EXPECT_LE(b.min, b.q1);
    EXPECT_LE(b.q1, b.median);
    EXPECT_LE(b.median, b.q3);
    EXPECT_LE(b.q3, b.max);
    EXPECT_LE(b.min, b.whisker_lo);
    EXPECT_LE(b.whisker_hi, b.max);
  }
}

TEST(Summarize, SingleRecord) {
  const auto s = summarize({rec(0, 0, 2, 5, 3)});
  EXPECT_EQ(s.makespan, seconds(5));
  EXPECT_EQ(s.overhead, seconds(2));
  EXPECT_DOUBLE_EQ(s.slr, 5.0 / 3.0);
  EXPECT_FALSE(s.overhead_excluding_queue.has_value());
}

TEST(Summarize, WallSpanOverridesAndZeroRule) {
  const auto s = summarize({rec(0, 0, 0, 0.4, 0.4)}, Nanos{0});
  EXPECT_EQ(s.makespan, milliseconds(400));
  EXPECT_EQ(s.overhead, Nanos{0});
  EXPECT_DOUBLE_EQ(s.slr, 1.0);
}

TEST(Summarize, EmptyRecords) {
  try {
    summarize({});
    FAIL() << "expected EmptyRecords";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyRecords);
  }
}

TEST(Summarize, PermutationInvariant) {
  Rng rng(33);
  for (int t = 0; t < 50; ++t) {
    auto records = random_records(rng, 1 + rng.below(30));
    const auto base = summarize(records);
    for (std::size_t i = records.size(); i > 1; --i) std::swap(records[i - 1], records[rng.below(i)]);
    const auto shuffled = summarize(records);
    EXPECT_EQ(summary_to_json(base).dump(), summary_to_json(shuffled).dump());
  }
}

TEST(Summarize, PerJobSimSlr) {
  backends::SimConfig cfg;
  cfg.server_init = 0.0;
  cfg.perjob_launch_overhead = ConstantDist{2.0};
  backends::SimOptions opt;
  const auto out = backends::run_sim(std::vector<Nanos>(100, milliseconds(10)), cfg, opt);
  const auto s = summarize(records_from_outcomes(out));
  EXPECT_NEAR(s.slr, 201.0, 1e-9);
  ASSERT_TRUE(s.overhead_excluding_queue.has_value());
  EXPECT_EQ(*s.overhead_excluding_queue, seconds(200));
}

TEST(Summarize, QueueWaitExcludedColumn) {
  std::vector<TaskRecord> r{rec(0, 0, 4, 6, 2)};
  r[0].alloc_t = seconds(3);
  const auto s = summarize(r);
  EXPECT_EQ(s.overhead, seconds(4));
  EXPECT_EQ(*s.overhead_excluding_queue, seconds(1));
}

TEST(RecordsCsv, RoundTrip) {
  Rng rng(2);
  auto records = random_records(rng, 25);
  const auto dir = std::filesystem::temp_directory_path();
  write_records_csv(dir / "uqlb_records.csv", records);
  EXPECT_EQ(read_records_csv(dir / "uqlb_records.csv"), records);
  for (auto& r : records) r.alloc_t = r.submit_t + milliseconds(1);
  write_records_csv(dir / "uqlb_records.csv", records);
  EXPECT_EQ(read_records_csv(dir / "uqlb_records.csv"), records);
  std::filesystem::remove(dir / "uqlb_records.csv");
}

TEST(RecordsCsv, RejectsInvalidRecords) {
  const auto path = std::filesystem::temp_directory_path() / "uqlb_bad_records.csv";
  std::ofstream(path) << "task_id,submit_t,start_t,end_t,cpu_time\n0,5.0,1.0,6.0,1.0\n";
  EXPECT_THROW(read_records_csv(path), Error);
  std::ofstream(path) << "id,a,b\n";
  EXPECT_THROW(read_records_csv(path), Error);
  std::filesystem::remove(path);
}

TEST(SummaryJson, SchemaKeys) {
  const auto j = summary_to_json(summarize({rec(0, 0, 2, 5, 3), rec(1, 0, 2, 5, 1)}));
  for (const char* key : {"tasks", "makespan", "total_cpu", "overhead", "overhead_per_task", "slr",
                          "overhead_excluding_queue", "box"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  for (const char* metric : {"cpu_time", "wait", "turnaround"}) EXPECT_TRUE(j["box"].contains(metric)) << metric;
  EXPECT_DOUBLE_EQ(j["overhead_per_task"].get<double>(), 0.5);
}

TEST(BoxCsv, Layout) {
  std::ostringstream out;
  write_box_csv(out, {{"cpu_time", box_stats({1, 2, 3, 4, 5, 6, 7, 100})}});
  const auto text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "metric,min,q1,median,q3,max,whisker_lo,whisker_hi,outliers");
  EXPECT_NE(text.find("cpu_time,"), std::string::npos);
  EXPECT_NE(text.find(",100"), std::string::npos);
}

TEST(BalancerLog, ReadsCompletedEvents) {
  const auto path = std::filesystem::temp_directory_path() / "uqlb_events.jsonl";
  {
    std::ofstream out(path);
    out << R"({"event":"spawn","server":1,"t_ns":5})" << '\n';
    out << R"({"event":"completed","request":2,"server":1,"submit_ns":10,"start_ns":20,"end_ns":50,"cpu_ns":25,"t_ns":50})"
        << '\n';
    out << R"({"event":"completed","request":1,"server":1,"submit_ns":0,"start_ns":5,"end_ns":9,"cpu_ns":4,"t_ns":9})"
        << '\n';
  }
  const auto r = read_balancer_log(path);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].task_id, 2u);
  EXPECT_EQ(r[0].cpu_time, Nanos(25));
  EXPECT_EQ(r[1].start_t, Nanos(5));
  std::filesystem::remove(path);
}
