#include "uqlb/distribution.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "uqlb/error.hpp"
#include "uqlb/text.hpp"

namespace uqlb {

double Rng::standard_normal() {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) return 0;
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t key) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (key + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Distribution make_bimodal(double p_fast, Distribution fast, Distribution slow) {
  if (!(p_fast >= 0.0 && p_fast <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "bimodal probability must lie in [0,1]");
  }
  return std::make_shared<const BimodalDist>(
      BimodalDist{p_fast, std::move(fast), std::move(slow)});
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void validate(const Distribution& dist) {
  std::visit(overloaded{
                 [](const ConstantDist& d) {
                   if (!(d.value >= 0.0) || !std::isfinite(d.value)) {
                     throw Error(ErrorCode::InvalidArgument, "constant must be finite and >= 0");
                   }
                 },
                 [](const UniformDist& d) {
                   if (!(d.lo >= 0.0 && d.hi >= d.lo) || !std::isfinite(d.hi)) {
                     throw Error(ErrorCode::InvalidArgument, "uniform needs 0 <= lo <= hi");
                   }
                 },
                 [](const LogNormalDist& d) {
                   if (!(d.sigma >= 0.0) || !(d.min >= 0.0) || !(d.max >= d.min)) {
                     throw Error(ErrorCode::InvalidArgument,
                                 "lognormal needs sigma >= 0 and 0 <= min <= max");
                   }
                 },
                 [](const std::shared_ptr<const BimodalDist>& d) {
                   if (!d) throw Error(ErrorCode::InvalidArgument, "empty bimodal");
                   validate(d->fast);
                   validate(d->slow);
                 },
             },
             dist);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

double sample(const Distribution& dist, Rng& rng) {
  return std::visit(
      overloaded{
          [](const ConstantDist& d) { return d.value; },
          [&](const UniformDist& d) { return rng.uniform(d.lo, d.hi); },
          [&](const LogNormalDist& d) {
            const double x = std::exp(d.mu + d.sigma * rng.standard_normal());
            return std::clamp(x, d.min, d.max);
          },
          [&](const std::shared_ptr<const BimodalDist>& d) {
            const bool fast = rng.uniform01() < d->p_fast;
            return sample(fast ? d->fast : d->slow, rng);
          },
      },
      dist);
}

double mean(const Distribution& dist) {
  return std::visit(
      overloaded{
          [](const ConstantDist& d) { return d.value; },
          [](const UniformDist& d) { return 0.5 * (d.lo + d.hi); },
          [](const LogNormalDist& d) {
            if (d.sigma == 0.0) return std::clamp(std::exp(d.mu), d.min, d.max);
            // E[clamp(X, a, b)] for X ~ LogNormal(mu, sigma^2).
            const double s = d.sigma;
            const double la = d.min > 0.0 ? (std::log(d.min) - d.mu) / s
                                          : -std::numeric_limits<double>::infinity();
            const double lb = std::isfinite(d.max) ? (std::log(d.max) - d.mu) / s
                                                   : std::numeric_limits<double>::infinity();
            const double body = std::exp(d.mu + 0.5 * s * s) * (normal_cdf(lb - s) - normal_cdf(la - s));
            const double lower = d.min > 0.0 ? d.min * normal_cdf(la) : 0.0;
            const double upper = std::isfinite(d.max) ? d.max * (1.0 - normal_cdf(lb)) : 0.0;
            return lower + body + upper;
          },
          [](const std::shared_ptr<const BimodalDist>& d) {
            return d->p_fast * mean(d->fast) + (1.0 - d->p_fast) * mean(d->slow);
          },
      },
      dist);
}

Distribution scaled(const Distribution& dist, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw Error(ErrorCode::InvalidArgument, "scale factor must be positive and finite");
  }
  return std::visit(
      overloaded{
          [&](const ConstantDist& d) -> Distribution { return ConstantDist{d.value * factor}; },
          [&](const UniformDist& d) -> Distribution { return UniformDist{d.lo * factor, d.hi * factor}; },
          [&](const LogNormalDist& d) -> Distribution {
            return LogNormalDist{d.mu + std::log(factor), d.sigma, d.min * factor, d.max * factor};
          },
          [&](const std::shared_ptr<const BimodalDist>& d) -> Distribution {
            return make_bimodal(d->p_fast, scaled(d->fast, factor), scaled(d->slow, factor));
          },
      },
      dist);
}

namespace {

std::vector<double> parse_numbers(std::string_view text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(parse_double(part));
  return out;
}

Distribution parse_simple(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorCode::InvalidArgument, "distribution needs a kind prefix: " + std::string(text));
  }
  const auto kind = text.substr(0, colon);
  const auto args = parse_numbers(text.substr(colon + 1));
  if ((kind == "const" || kind == "constant") && args.size() == 1) return ConstantDist{args[0]};
  if (kind == "uniform" && args.size() == 2) return UniformDist{args[0], args[1]};
  if (kind == "lognormal" && (args.size() == 2 || args.size() == 4)) {
    LogNormalDist d{args[0], args[1]};
    if (args.size() == 4) {
      d.min = args[2];
      d.max = args[3];
    }
    return d;
  }
  throw Error(ErrorCode::InvalidArgument, "bad distribution: " + std::string(text));
}

}  // namespace

Distribution parse_distribution(const std::string& text) {
  const std::string_view view = trim(text);
  Distribution dist;
  if (view.starts_with("bimodal:")) {
    const auto parts = split(view.substr(8), '|');
    if (parts.size() != 3) {
      throw Error(ErrorCode::InvalidArgument, "bimodal form is bimodal:p|<fast>|<slow>");
    }
    dist = make_bimodal(parse_double(parts[0]), parse_simple(trim(parts[1])),
                        parse_simple(trim(parts[2])));
  } else {
    dist = parse_simple(view);
  }
  validate(dist);
  return dist;
}

std::string format_distribution(const Distribution& dist) {
  return std::visit(
      overloaded{
          [](const ConstantDist& d) { return "const:" + format_double(d.value); },
          [](const UniformDist& d) {
            return "uniform:" + format_double(d.lo) + "," + format_double(d.hi);
          },
          [](const LogNormalDist& d) {
            std::string s = "lognormal:" + format_double(d.mu) + "," + format_double(d.sigma);
            if (d.min != 0.0 || std::isfinite(d.max)) {
              s += "," + format_double(d.min) + "," + format_double(d.max);
            }
            return s;
          },
          [](const std::shared_ptr<const BimodalDist>& d) {
            return "bimodal:" + format_double(d->p_fast) + "|" + format_distribution(d->fast) +
                   "|" + format_distribution(d->slow);
          },
      },
      dist);
}

nlohmann::json distribution_to_json(const Distribution& dist) {
  using nlohmann::json;
  return std::visit(
      overloaded{
          [](const ConstantDist& d) { return json{{"kind", "const"}, {"value", d.value}}; },
          [](const UniformDist& d) { return json{{"kind", "uniform"}, {"lo", d.lo}, {"hi", d.hi}}; },
          [](const LogNormalDist& d) {
            json j{{"kind", "lognormal"}, {"mu", d.mu}, {"sigma", d.sigma}, {"min", d.min}};
            if (std::isfinite(d.max)) j["max"] = d.max;
            return j;
          },
          [](const std::shared_ptr<const BimodalDist>& d) {
            return json{{"kind", "bimodal"},
                        {"p_fast", d->p_fast},
                        {"fast", distribution_to_json(d->fast)},
                        {"slow", distribution_to_json(d->slow)}};
          },
      },
      dist);
}

Distribution distribution_from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse_distribution(j.get<std::string>());
  if (j.is_number()) {
    Distribution d = ConstantDist{j.get<double>()};
    validate(d);
    return d;
  }
  if (!j.is_object() || !j.contains("kind")) {
    throw Error(ErrorCode::InvalidArgument, "distribution must be a string, number or {kind: ...}");
  }
  const auto kind = j.at("kind").get<std::string>();
  Distribution dist;
  try {
    if (kind == "const" || kind == "constant") {
      dist = ConstantDist{j.at("value").get<double>()};
    } else if (kind == "uniform") {
      dist = UniformDist{j.at("lo").get<double>(), j.at("hi").get<double>()};
    } else if (kind == "lognormal") {
      LogNormalDist d{j.at("mu").get<double>(), j.at("sigma").get<double>()};
      d.min = j.value("min", 0.0);
      d.max = j.value("max", std::numeric_limits<double>::infinity());
      dist = d;
    } else if (kind == "bimodal") {
      dist = make_bimodal(j.at("p_fast").get<double>(), distribution_from_json(j.at("fast")),
                          distribution_from_json(j.at("slow")));
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown distribution kind: " + kind);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("distribution: ") + e.what());
  }
  validate(dist);
  return dist;
}

}  // namespace uqlb
