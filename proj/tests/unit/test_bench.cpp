#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "uqlb/bench.hpp"
#include "uqlb/error.hpp"
#include "uqlb/text.hpp"

using namespace uqlb;
using namespace uqlb::bench;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("uqlb_bench_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

BenchmarkSuite suite(const std::string& name) { return find_suite(UQLB_SUITES_DIR, name); }

// E[clamp(X, a, b)] for X ~ LogNormal(mu, sigma^2) by composite Simpson in
// log space, independent of the closed form in the library.
double clamped_lognormal_mean(double mu, double sigma, double a, double b) {
  const int n = 200000;
  const double lo = mu - 12.0 * sigma;
  const double hi = mu + 12.0 * sigma;
  const double h = (hi - lo) / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double y = lo + i * h;
    const double z = (y - mu) / sigma;
    const double pdf = std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
    const double x = std::clamp(std::exp(y), a, b);
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * x * pdf;
  }
  return acc * h / 3.0;
}

}  // namespace

TEST(Suites, AllNamedSuitesResolve) {
  const auto names = list_suites(UQLB_SUITES_DIR);
  EXPECT_EQ(names, (std::vector<std::string>{"eigen-100", "eigen-5000", "gp", "synthetic-gs2"}));
  for (const auto& n : names) {
    const auto s = suite(n);
    EXPECT_EQ(s.name, n);
    for (Mode m : {Mode::PerJob, Mode::Bulk}) {
      EXPECT_NO_THROW(job_spec_for(s, m, s.sim_seconds_per_minute).validate());
      EXPECT_NO_THROW(job_spec_for(s, m, s.live_seconds_per_minute).validate());
    }
    EXPECT_NO_THROW(allocation_for(s, s.sim_seconds_per_minute).validate());
    EXPECT_EQ(s.depths, (std::vector<std::size_t>{2, 10}));
    EXPECT_EQ(s.n_evaluations, 100u);
    // The suite survives a JSON round trip.
    EXPECT_EQ(to_json(suite_from_json(to_json(s))), to_json(s));
  }
  EXPECT_FALSE(suite("eigen-5000").in_default);
  EXPECT_TRUE(suite("eigen-100").in_default);
}

TEST(Suites, ResourceRowsScaleToDeskUnits) {
  const auto s = suite("eigen-100");
  const auto pj = job_spec_for(s, Mode::PerJob, 0.01);
  EXPECT_EQ(pj.time_limit, std::chrono::milliseconds(10));  // 1 min
  EXPECT_EQ(pj.mode, backends::AllocationMode::PerJob);
  const auto bj = job_spec_for(s, Mode::Bulk, 0.01);
  EXPECT_EQ(bj.time_request, std::chrono::milliseconds(10));  // 1 min
  EXPECT_EQ(bj.time_limit, std::chrono::milliseconds(50));    // 5 min
  EXPECT_EQ(allocation_for(s, 0.01).allocation_time_limit, std::chrono::milliseconds(100));  // 10 min
  EXPECT_EQ(allocation_for(s, 0.01).max_worker_count, 1);

  const auto g = suite("synthetic-gs2");
  EXPECT_DOUBLE_EQ(g.sim_seconds_per_minute, 0.06);
  EXPECT_EQ(job_spec_for(g, Mode::Bulk, 0.06).time_request, std::chrono::milliseconds(900));     // 15 min
  EXPECT_EQ(job_spec_for(g, Mode::Bulk, 0.06).time_limit, std::chrono::milliseconds(14400));     // 240 min
  EXPECT_EQ(job_spec_for(g, Mode::PerJob, 0.06).time_limit, std::chrono::milliseconds(14400));   // 240 min
}

TEST(Suites, Gs2TaskTimesSpanTheTableRow) {
  const auto g = suite("synthetic-gs2");
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    for (auto d : sim_durations(g, seed)) {
      EXPECT_GE(d, std::chrono::milliseconds(60));     // 1 min
      EXPECT_LE(d, std::chrono::milliseconds(10800));  // 180 min
    }
  }
}

TEST(Suites, Gs2ReinitIsCalibratedToSixTenthsOfTheMeanTask) {
  const auto g = suite("synthetic-gs2");
  const double mean_minutes = clamped_lognormal_mean(2.6, 0.87, 1.0, 180.0);
  EXPECT_NEAR(mean(g.task_minutes), mean_minutes, 1e-6 * mean_minutes);
  const double reinit_cluster_seconds = mean(g.sim.env_reinit_overhead);
  EXPECT_NEAR(reinit_cluster_seconds, 0.6 * mean_minutes * 60.0, 1e-3);
}

TEST(Suites, UnknownSuiteIsUsageError) {
  try {
    find_suite(UQLB_SUITES_DIR, "nosuch");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
    EXPECT_NE(std::string(e.what()).find("eigen-100"), std::string::npos);
  }
  EXPECT_THROW(parse_modes("sometimes"), Error);
  EXPECT_EQ(parse_modes("both").size(), 2u);
}

TEST(Suites, InvalidSuitesRejected) {
  auto j = to_json(suite("gp"));
  auto bad = j;
  bad["plan"]["depths"] = std::vector<int>{0};
  EXPECT_THROW(suite_from_json(bad), Error);
  bad = j;
  bad["scale"]["sim_seconds_per_minute"] = -1.0;
  EXPECT_THROW(suite_from_json(bad), Error);
  bad = j;
  bad["resources"]["bulk_time_request"] = 50;
  EXPECT_THROW(suite_from_json(bad), Error);
  bad = j;
  bad["plan"]["fixed"] = {{1.0}};  // both box and fixed
  EXPECT_THROW(suite_from_json(bad), Error);
  bad = j;
  bad.erase("name");
  EXPECT_THROW(suite_from_json(bad), Error);
}

TEST(ScaledDistribution, SamplesScaleLinearly) {
  // Property: for the same draw stream, scaled(d, f) samples f times d's.
  for (const char* text : {"const:0.5", "uniform:1,10", "lognormal:2.6,0.87,1,180", "bimodal:0.3|const:1|uniform:2,3"}) {
    const auto d = parse_distribution(text);
    for (double f : {0.01, 0.06, 3.0}) {
      const auto s = scaled(d, f);
      Rng a(42);
      Rng b(42);
      for (int i = 0; i < 200; ++i) {
        const double x = sample(d, a);
        EXPECT_NEAR(sample(s, b), f * x, 1e-12 * std::max(1.0, f * x)) << text;
      }
      EXPECT_NEAR(mean(s), f * mean(d), 1e-9 * f * mean(d)) << text;
    }
  }
  EXPECT_THROW(scaled(ConstantDist{1.0}, 0.0), Error);
}

TEST(RunSuite, SimIsByteReproducible) {
  const auto a = fresh_dir("repro_a");
  const auto b = fresh_dir("repro_b");
  for (const auto& root : {a, b}) {
    RunOptions o;
    o.sim = true;
    o.results_dir = root;
    ASSERT_TRUE(run_suite(suite("synthetic-gs2"), o).ok());
  }
  for (const char* mode : {"perjob", "bulk"}) {
    for (const char* depth : {"2", "10"}) {
      const auto rel = std::filesystem::path("synthetic-gs2") / mode / depth;
      for (const char* file : {"records.csv", "summary.json", "box.csv"}) {
        const auto pa = a / rel / file;
        ASSERT_TRUE(std::filesystem::exists(pa)) << pa;
        EXPECT_EQ(slurp(pa), slurp(b / rel / file)) << rel / file;
      }
    }
  }
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}

TEST(RunSuite, GpBulkDepthTenSimIsQuickAndComplete) {
  const auto dir = fresh_dir("gp_bulk");
  RunOptions o;
  o.sim = true;
  o.modes = parse_modes("bulk");
  o.depths = {10};
  o.results_dir = dir;
  const auto start = std::chrono::steady_clock::now();
  const auto report = run_suite(suite("gp"), o);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(60));
  ASSERT_TRUE(report.ok());
  EXPECT_EQ(metrics::read_records_csv(dir / "gp/bulk/10/records.csv").size(), 100u);
  std::filesystem::remove_all(dir);
}

TEST(RunSuite, Eigen100BulkHasLowerSlrThanPerJob) {
  const auto s = suite("eigen-100");
  const auto pj = run_sim_experiment(s, Mode::PerJob, 2, 0);
  const auto bk = run_sim_experiment(s, Mode::Bulk, 2, 0);
  EXPECT_LT(bk.summary.slr, pj.summary.slr);
  EXPECT_GE(bk.summary.slr, 1.0);
}

TEST(RunSuite, SlrIsAtLeastOneForEveryShippedSimExperiment) {
  for (const auto& n : list_suites(UQLB_SUITES_DIR)) {
    const auto s = suite(n);
    for (Mode m : {Mode::PerJob, Mode::Bulk}) {
      for (auto depth : s.depths) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
          EXPECT_GE(run_sim_experiment(s, m, depth, seed).summary.slr, 1.0) << n << " " << to_string(m);
        }
      }
    }
  }
}

TEST(Compare, IdenticalInputsGiveUnitRatios) {
  const auto dir = fresh_dir("cmp_same");
  RunOptions o;
  o.sim = true;
  o.results_dir = dir;
  ASSERT_TRUE(run_suite(suite("eigen-100"), o).ok());
  const auto rows = compare(dir / "eigen-100/perjob", dir / "eigen-100/perjob");
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_DOUBLE_EQ(r.makespan_ratio, 1.0);
    EXPECT_DOUBLE_EQ(r.overhead_ratio, 1.0);
    EXPECT_DOUBLE_EQ(r.slr_a, r.slr_b);
    EXPECT_FALSE(r.overhead_flag);
    EXPECT_FALSE(r.makespan_flag);
  }
  std::ostringstream table;
  write_comparison(table, rows);
  EXPECT_NE(table.str().find("makespan_a"), std::string::npos);
  EXPECT_EQ(comparison_to_json(rows).size(), 2u);
  std::filesystem::remove_all(dir);
}

TEST(Compare, MissingDepthKeyIsNamed) {
  const auto dir = fresh_dir("cmp_missing");
  RunOptions o;
  o.sim = true;
  o.results_dir = dir;
  ASSERT_TRUE(run_suite(suite("eigen-100"), o).ok());
  std::filesystem::remove_all(dir / "eigen-100/bulk/10");
  try {
    compare(dir / "eigen-100/perjob", dir / "eigen-100/bulk");
    FAIL() << "expected KeyMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::KeyMismatch);
    EXPECT_NE(e.detail().find("'10'"), std::string::npos) << e.detail();
  }
  std::filesystem::remove_all(dir);
}

TEST(Compare, FlagsFollowThresholds) {
  const auto dir = fresh_dir("cmp_flags");
  auto write = [&](const std::string& side, double makespan, double overhead) {
    std::filesystem::create_directories(dir / side / "2");
    std::ofstream(dir / side / "2" / "summary.json")
        << nlohmann::json{{"makespan", makespan}, {"overhead", overhead}, {"slr", makespan / (makespan - overhead)}};
  };
  write("a", 100.0, 50.0);
  write("b", 61.0, 0.05);  // 39% shorter, 1000x less overhead
  auto rows = compare(dir / "a", dir / "b");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].makespan_reduction, 0.39, 1e-12);
  EXPECT_NEAR(rows[0].overhead_ratio, 1000.0, 1e-9);
  EXPECT_TRUE(rows[0].makespan_flag);
  EXPECT_TRUE(rows[0].overhead_flag);
  write("b", 63.0, 0.06);
  rows = compare(dir / "a", dir / "b");
  EXPECT_FALSE(rows[0].makespan_flag);
  EXPECT_FALSE(rows[0].overhead_flag);
  std::filesystem::remove_all(dir);
}

TEST(Compare, Gs2AnalogPerJobVersusBulk) {
  // With set-up at 0.6 of the mean task the expected reduction is close to
  // 0.6 / 1.6; the per-job queue and launch delays add a little on top.
  const auto dir = fresh_dir("cmp_gs2");
  RunOptions o;
  o.sim = true;
  o.results_dir = dir;
  ASSERT_TRUE(run_suite(suite("synthetic-gs2"), o).ok());
  for (const auto& r : compare(dir / "synthetic-gs2/perjob", dir / "synthetic-gs2/bulk")) {
    EXPECT_GE(r.makespan_reduction, 0.30) << r.key;
    EXPECT_TRUE(r.overhead_flag) << r.key;
  }
  std::filesystem::remove_all(dir);
}

TEST(LiveRun, Eigen100ProcessBackendSmallRun) {
  const auto dir = fresh_dir("live");
  LiveOptions lo;
  lo.model_server_bin = UQLB_MODEL_SERVER_BIN;
  lo.work_dir = dir;
  lo.n_evaluations = 6;
  for (Mode m : {Mode::PerJob, Mode::Bulk}) {
    const auto e = run_live_experiment(suite("eigen-100"), m, 2, 0, lo);
    EXPECT_TRUE(e.result.complete) << to_string(m);
    EXPECT_EQ(e.result.records.size(), 6u);
    EXPECT_LE(e.result.max_in_flight, 2u);
    EXPECT_GE(e.spawns, 1u);
    if (m == Mode::PerJob) {
      EXPECT_GE(e.spawns, 6u);  // one server per evaluation
    } else {
      EXPECT_LE(e.spawns, 2u);
    }
  }
  std::filesystem::remove_all(dir);
}
