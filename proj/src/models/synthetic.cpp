#include "uqlb/models/synthetic.hpp"

#include <bit>
#include <chrono>
#include <thread>

namespace uqlb::models {

std::uint64_t hash_input(std::span<const double> input) noexcept {
  // FNV-1a over the IEEE bit patterns; +0.0 and -0.0 hash alike.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double x : input) {
    const auto bits = std::bit_cast<std::uint64_t>(x == 0.0 ? 0.0 : x);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

double draw_duration(const SyntheticTask& task, std::span<const double> input) {
  Rng rng(mix_seed(task.seed, hash_input(input)));
  return sample(task.duration, rng);
}

double synthetic_evaluate(const SyntheticTask& task, std::span<const double> input) {
  using clock = std::chrono::steady_clock;
  const double seconds = draw_duration(task, input);
  const auto start = clock::now();
  const auto deadline = start + std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(seconds));
  if (task.busy_wait) {
    while (clock::now() < deadline) {
    }
  } else {
    std::this_thread::sleep_until(deadline);
  }
  return std::chrono::duration<double>(clock::now() - start).count();
}

}  // namespace uqlb::models
