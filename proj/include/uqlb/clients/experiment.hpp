#pragma once

// Fixed-queue-depth experiment runner: keeps `queue_depth` evaluations in
// flight until `n_evaluations` have been issued, then lets the tail drain.

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uqlb/metrics.hpp"
#include "uqlb/parameter_box.hpp"
#include "uqlb/protocol.hpp"

namespace uqlb::clients {

using Nanos = std::chrono::nanoseconds;

struct ExperimentPlan {
  std::string model_url;
  std::string model_name = "modelname";
  std::size_t n_evaluations = 100;
  std::size_t queue_depth = 2;
  std::uint64_t seed = 0;
  // Parameter source: LHS over `box`, or `fixed` (cycled when shorter than
  // n_evaluations). Exactly one must be set.
  std::optional<ParameterBox> box;
  std::vector<std::vector<double>> fixed;
  protocol::Config config = protocol::empty_config();
  protocol::ClientOptions client;
  std::size_t max_consecutive_failures = 5;

  void validate() const;
};

// Keys: url, name, n, depth, seed, box (object or "gs2"), fixed, config,
// max_consecutive_failures, read_timeout_s.
ExperimentPlan experiment_plan_from_json(const nlohmann::json& j);

// One change of the in-flight count, for auditing the depth bound.
struct InFlightSample {
  Nanos t{0};
  std::size_t in_flight = 0;
};

struct ExperimentResult {
  std::vector<metrics::TaskRecord> records;  // successful tasks, by task_id
  std::vector<std::optional<protocol::Vectors>> outputs;  // indexed by task_id
  Nanos wall_span{0};
  bool complete = false;  // every task succeeded
  bool aborted = false;   // stopped after too many consecutive failures
  std::size_t failures = 0;
  std::vector<std::string> failure_messages;
  std::vector<InFlightSample> in_flight_log;
  std::size_t max_in_flight = 0;
};

using Evaluator = std::function<protocol::EvaluationResponse(const protocol::EvaluationRequest&)>;

// The inputs task i will use, as one vector each.
std::vector<std::vector<double>> plan_parameters(const ExperimentPlan& plan);

// Task records carry times relative to the experiment start. cpu_time is the
// server-reported compute time when available, otherwise the round trip.
ExperimentResult run_experiment(const ExperimentPlan& plan, const Evaluator& evaluate);
ExperimentResult run_experiment(const ExperimentPlan& plan);

}  // namespace uqlb::clients
