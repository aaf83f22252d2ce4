#pragma once

// Seeded duration distributions shared by the synthetic model and the
// scheduler simulator. Sampling is built on raw mt19937_64 output so draws are
// bit-identical across standard library implementations.

#include <cstdint>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <variant>

#include <json.hpp>

namespace uqlb {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Box-Muller; one draw consumes two uniforms.
  double standard_normal();

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

// Mixes a seed with a second key (SplitMix64 finalizer).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t key) noexcept;

struct ConstantDist {
  double value = 0.0;
};

struct UniformDist {
  double lo = 0.0;
  double hi = 0.0;
};

// exp(N(mu, sigma^2)), optionally clamped to [min, max].
struct LogNormalDist {
  double mu = 0.0;
  double sigma = 1.0;
  double min = 0.0;
  double max = std::numeric_limits<double>::infinity();
};

struct BimodalDist;

using Distribution = std::variant<ConstantDist, UniformDist, LogNormalDist,
                                  std::shared_ptr<const BimodalDist>>;

// With probability p_fast draw from `fast`, otherwise from `slow`.
struct BimodalDist {
  double p_fast = 0.5;
  Distribution fast;
  Distribution slow;
};

Distribution make_bimodal(double p_fast, Distribution fast, Distribution slow);

// Every draw is >= 0; negative parameterizations are rejected at parse time.
double sample(const Distribution& dist, Rng& rng);

double mean(const Distribution& dist);

// The distribution of factor * X; factor must be positive.
Distribution scaled(const Distribution& dist, double factor);

// Compact textual form: "const:0.05", "uniform:1,10",
// "lognormal:mu,sigma[,min,max]", "bimodal:p|<fast>|<slow>".
Distribution parse_distribution(const std::string& text);
std::string format_distribution(const Distribution& dist);

// JSON accepts either the compact string or an object with a "kind" key.
nlohmann::json distribution_to_json(const Distribution& dist);
Distribution distribution_from_json(const nlohmann::json& j);

}  // namespace uqlb
