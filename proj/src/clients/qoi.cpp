#include "uqlb/clients/qoi.hpp"

#include <cmath>
#include <numbers>

#include "uqlb/clients/experiment.hpp"
#include "uqlb/error.hpp"

namespace uqlb::clients {

using nlohmann::json;

std::string to_string(QuadratureRule rule) {
  return rule == QuadratureRule::Trapezoid ? "trapezoid" : "gauss-legendre";
}

QuadratureRule parse_quadrature_rule(const std::string& text) {
  if (text == "trapezoid") return QuadratureRule::Trapezoid;
  if (text == "gauss-legendre") return QuadratureRule::GaussLegendre;
  throw Error(ErrorCode::InvalidArgument, "unknown quadrature rule '" + text + "'");
}

Rule1D trapezoid_rule(double a, double b, std::size_t n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "trapezoid rule needs at least 2 nodes");
  Rule1D r;
  const double h = (b - a) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    r.nodes.push_back(i + 1 == n ? b : a + h * static_cast<double>(i));
    r.weights.push_back((i == 0 || i + 1 == n) ? 0.5 * h : h);
  }
  return r;
}

Rule1D gauss_legendre_rule(double a, double b, std::size_t n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "Gauss-Legendre rule needs at least 1 node");
  Rule1D r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double nd = static_cast<double>(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    // Newton on P_n from the usual asymptotic starting guess.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kd = static_cast<double>(k);
        const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
        p0 = p1;
        p1 = p2;
      }
      dp = nd * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = mid - half * x;
    r.nodes[n - 1 - i] = mid + half * x;
    r.weights[i] = r.weights[n - 1 - i] = half * w;
  }
  return r;
}

Rule1D make_rule(QuadratureRule rule, double a, double b, std::size_t n) {
  return rule == QuadratureRule::Trapezoid ? trapezoid_rule(a, b, n) : gauss_legendre_rule(a, b, n);
}

void QoIConfig::validate() const {
  if (ky_nodes < 2 || theta_nodes < 2) throw Error(ErrorCode::InvalidArgument, "node counts must be at least 2");
  if (!(theta_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "theta_max must be positive");
  if (!(ky_min < ky_max)) throw Error(ErrorCode::InvalidArgument, "k_y range must satisfy a < b");
  if (!(rho_star != 0.0 && c_s != 0.0)) throw Error(ErrorCode::InvalidArgument, "rho_star and c_s must be non-zero");
  if (ky_index >= base_input.size() || theta_index >= base_input.size() || ky_index == theta_index) {
    throw Error(ErrorCode::InvalidArgument, "k_y and theta indices must be distinct positions in base_input");
  }
  if (queue_depth < 1) throw Error(ErrorCode::InvalidArgument, "queue_depth must be at least 1");
}

QoIConfig qoi_config_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "QoI config must be an object");
  QoIConfig c;
  try {
    c.q0 = j.value("q0", c.q0);
    c.lambda = j.value("lambda", c.lambda);
    c.alpha = j.value("alpha", c.alpha);
    c.rho_star = j.value("rho_star", c.rho_star);
    c.c_s = j.value("c_s", c.c_s);
    if (j.contains("ky_range")) {
      const auto range = j.at("ky_range").get<std::vector<double>>();
      if (range.size() != 2) throw Error(ErrorCode::InvalidArgument, "ky_range must be [a, b]");
      c.ky_min = range[0];
      c.ky_max = range[1];
    }
    c.ky_nodes = j.value("ky_nodes", c.ky_nodes);
    c.theta_max = j.value("theta_max", c.theta_max);
    c.theta_nodes = j.value("theta_nodes", c.theta_nodes);
    if (j.contains("rule")) c.rule = parse_quadrature_rule(j.at("rule").get<std::string>());
    if (j.contains("base_input")) c.base_input = j.at("base_input").get<std::vector<double>>();
    c.ky_index = j.value("ky_index", c.ky_index);
    c.theta_index = j.value("theta_index", c.theta_index);
    c.model_name = j.value("name", c.model_name);
    if (j.contains("config")) c.model_config = j.at("config");
    c.queue_depth = j.value("depth", c.queue_depth);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("QoI config: ") + e.what());
  }
  c.validate();
  return c;
}

double qoi_prefactor(const QoIConfig& cfg) {
  return cfg.q0 * std::pow(cfg.lambda, cfg.alpha - 1.0) / (cfg.rho_star * cfg.c_s);
}

QoIGrid qoi_grid(const QoIConfig& cfg) {
  cfg.validate();
  const auto ky = make_rule(cfg.rule, cfg.ky_min, cfg.ky_max, cfg.ky_nodes);
  const auto th = make_rule(cfg.rule, 0.0, cfg.theta_max, cfg.theta_nodes);
  QoIGrid g;
  for (std::size_t i = 0; i < ky.nodes.size(); ++i) {
    for (std::size_t k = 0; k < th.nodes.size(); ++k) {
      g.points.emplace_back(ky.nodes[i], th.nodes[k]);
      g.weights.push_back(ky.weights[i] * th.weights[k] / cfg.theta_max);
    }
  }
  return g;
}

namespace {

double weighted_sum(const QoIGrid& g, const std::vector<double>& values, const QoIConfig& cfg) {
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorCode::NonFiniteIntegrand, "integrand is not finite at k_y=" + std::to_string(g.points[i].first) +
                                                     ", theta=" + std::to_string(g.points[i].second));
    }
    sum += g.weights[i] * values[i];
  }
  return qoi_prefactor(cfg) * sum;
}

}  // namespace

double qoi_integral(const std::function<double(double, double)>& f, const QoIConfig& cfg) {
  const auto g = qoi_grid(cfg);
  std::vector<double> values;
  values.reserve(g.points.size());
  for (const auto& [ky, th] : g.points) values.push_back(f(ky, th));
  return weighted_sum(g, values, cfg);
}

double qoi_integral(const std::string& model_url, const QoIConfig& cfg) {
  const auto g = qoi_grid(cfg);
  ExperimentPlan plan;
  plan.model_url = model_url;
  plan.model_name = cfg.model_name;
  plan.config = cfg.model_config;
  plan.queue_depth = cfg.queue_depth;
  plan.n_evaluations = g.points.size();
  for (const auto& [ky, th] : g.points) {
    auto x = cfg.base_input;
    x[cfg.ky_index] = ky;
    x[cfg.theta_index] = th;
    plan.fixed.push_back(std::move(x));
  }
  const auto result = run_experiment(plan);
  if (!result.complete) {
    throw Error(ErrorCode::UpstreamFailure,
                std::to_string(result.failures) + " integrand evaluations failed" +
                    (result.failure_messages.empty() ? std::string() : ": " + result.failure_messages.front()));
  }
  std::vector<double> values;
  values.reserve(g.points.size());
  for (const auto& out : result.outputs) {
    if (!out || out->empty() || (*out)[0].size() != 1) {
      throw Error(ErrorCode::SchemaViolation, "integrand model must return a single scalar");
    }
    values.push_back((*out)[0][0]);
  }
  return weighted_sum(g, values, cfg);
}

}  // namespace uqlb::clients
