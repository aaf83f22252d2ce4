#pragma once

#include <cstdint>
#include <span>

#include "uqlb/distribution.hpp"

namespace uqlb::models {

// Stand-in for a simulator with input-dependent, hard-to-predict runtime.
struct SyntheticTask {
  Distribution duration = ConstantDist{0.0};
  std::uint64_t seed = 0;
  // Spin instead of sleeping, so the task shows up as CPU time.
  bool busy_wait = false;
};

std::uint64_t hash_input(std::span<const double> input) noexcept;

// Deterministic in (seed, input): the same pair always draws the same duration.
double draw_duration(const SyntheticTask& task, std::span<const double> input);

// Runs for the drawn duration and returns the measured elapsed seconds.
double synthetic_evaluate(const SyntheticTask& task, std::span<const double> input);

}  // namespace uqlb::models
