#include "uqlb/clients/experiment.hpp"

#include <algorithm>
#include <mutex>
#include <thread>

#include "uqlb/clients/lhs.hpp"
#include "uqlb/error.hpp"
#include "uqlb/text.hpp"

namespace uqlb::clients {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

void ExperimentPlan::validate() const {
  if (queue_depth < 1) throw Error(ErrorCode::InvalidArgument, "queue_depth must be at least 1");
  if (n_evaluations < 1) throw Error(ErrorCode::InvalidArgument, "n_evaluations must be at least 1");
  if (box.has_value() == !fixed.empty()) {
    throw Error(ErrorCode::InvalidArgument, "exactly one of box or fixed parameters must be given");
  }
  if (box) box->validate();
  if (max_consecutive_failures < 1) throw Error(ErrorCode::InvalidArgument, "max_consecutive_failures must be positive");
}

ExperimentPlan experiment_plan_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "experiment plan must be an object");
  ExperimentPlan p;
  try {
    p.model_url = j.value("url", p.model_url);
    p.model_name = j.value("name", p.model_name);
    p.n_evaluations = j.value("n", p.n_evaluations);
    p.queue_depth = j.value("depth", p.queue_depth);
    p.seed = j.value("seed", p.seed);
    if (j.contains("box")) {
      const auto& b = j.at("box");
      p.box = (b.is_string() && b.get<std::string>() == "gs2") ? gs2_parameter_box() : parameter_box_from_json(b);
    }
    if (j.contains("fixed")) p.fixed = j.at("fixed").get<std::vector<std::vector<double>>>();
    if (j.contains("config")) p.config = j.at("config");
    p.max_consecutive_failures = j.value("max_consecutive_failures", p.max_consecutive_failures);
    if (j.contains("read_timeout_s")) {
      p.client.read_timeout =
          std::chrono::milliseconds(static_cast<long long>(j.at("read_timeout_s").get<double>() * 1000.0));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("experiment plan: ") + e.what());
  }
  p.validate();
  return p;
}

std::vector<std::vector<double>> plan_parameters(const ExperimentPlan& plan) {
  plan.validate();
  if (plan.box) return lhs_sample(*plan.box, plan.n_evaluations, plan.seed);
  std::vector<std::vector<double>> out;
  out.reserve(plan.n_evaluations);
  for (std::size_t i = 0; i < plan.n_evaluations; ++i) out.push_back(plan.fixed[i % plan.fixed.size()]);
  return out;
}

ExperimentResult run_experiment(const ExperimentPlan& plan, const Evaluator& evaluate) {
  const auto params = plan_parameters(plan);
  const std::size_t n = params.size();

  ExperimentResult result;
  result.outputs.resize(n);
  std::mutex mutex;
  std::size_t next = 0;
  std::size_t in_flight = 0;
  std::size_t consecutive_failures = 0;
  const auto t0 = Clock::now();
  auto since_start = [&] { return std::chrono::duration_cast<Nanos>(Clock::now() - t0); };

  auto worker = [&] {
    for (;;) {
      std::size_t task = 0;
      Nanos submit{0};
      {
        std::lock_guard lock(mutex);
        if (result.aborted || next >= n) return;
        task = next++;
        submit = since_start();
        result.in_flight_log.push_back({submit, ++in_flight});
        result.max_in_flight = std::max(result.max_in_flight, in_flight);
      }

      protocol::EvaluationResponse resp;
      std::string failure;
      try {
        resp = evaluate({plan.model_name, {params[task]}, plan.config});
        if (resp.error) failure = resp.error->code + ": " + resp.error->message;
      } catch (const std::exception& e) {
        failure = e.what();
      }

      std::lock_guard lock(mutex);
      const Nanos end = since_start();
      result.in_flight_log.push_back({end, --in_flight});
      if (!failure.empty()) {
        ++result.failures;
        result.failure_messages.push_back("task " + std::to_string(task) + ": " + failure);
        if (++consecutive_failures >= plan.max_consecutive_failures) result.aborted = true;
        continue;
      }
      consecutive_failures = 0;
      const Nanos round_trip = end - submit;
      const Nanos cpu = std::clamp(resp.compute_time.value_or(round_trip), Nanos{0}, round_trip);
      result.records.push_back({task, submit, end - cpu, end, cpu, std::nullopt});
      result.outputs[task] = std::move(resp.outputs);
    }
  };

  std::vector<std::thread> threads;
  const std::size_t workers = std::min(plan.queue_depth, n);
  threads.reserve(workers);
  for (std::size_t i = 0; i < workers; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  result.wall_span = since_start();
  std::sort(result.records.begin(), result.records.end(),
            [](const auto& a, const auto& b) { return a.task_id < b.task_id; });
  result.complete = result.records.size() == n;
  return result;
}

ExperimentResult run_experiment(const ExperimentPlan& plan) {
  return run_experiment(plan, [&](const protocol::EvaluationRequest& req) {
    return protocol::post_evaluate(plan.model_url, req, plan.client);
  });
}

}  // namespace uqlb::clients
