#pragma once

// Quasi-linear flux style quantity of interest:
//
//   Q = P * int_a^b dk_y (1/theta_max) int_0^theta_max f(k_y, theta) dtheta,
//   P = Q0 * Lambda^(alpha - 1) / (rho_star * c_s)
//
// with f supplied by a model and evaluated on a tensor-product grid.

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uqlb/protocol.hpp"

namespace uqlb::clients {

enum class QuadratureRule { Trapezoid, GaussLegendre };

std::string to_string(QuadratureRule rule);
QuadratureRule parse_quadrature_rule(const std::string& text);

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Composite trapezoid with n >= 2 equally spaced nodes including both ends.
Rule1D trapezoid_rule(double a, double b, std::size_t n);
// n-point Gauss-Legendre mapped to [a, b].
Rule1D gauss_legendre_rule(double a, double b, std::size_t n);
Rule1D make_rule(QuadratureRule rule, double a, double b, std::size_t n);

struct QoIConfig {
  double q0 = 1.0;
  double lambda = 1.0;
  double alpha = 1.0;
  double rho_star = 1.0;
  double c_s = 1.0;
  double ky_min = 0.0;
  double ky_max = 1.0;
  std::size_t ky_nodes = 32;
  double theta_max = 1.0;
  std::size_t theta_nodes = 32;
  QuadratureRule rule = QuadratureRule::Trapezoid;

  // Model input layout: `base_input` with k_y and theta written at the given
  // positions. The remaining entries stay fixed for the whole integral.
  std::vector<double> base_input{0.0, 0.0};
  std::size_t ky_index = 0;
  std::size_t theta_index = 1;

  std::string model_name = "modelname";
  protocol::Config model_config = protocol::empty_config();
  std::size_t queue_depth = 2;

  void validate() const;
};

QoIConfig qoi_config_from_json(const nlohmann::json& j);

double qoi_prefactor(const QoIConfig& cfg);

// Grid points (k_y, theta) in evaluation order and their product weights
// (including the 1/theta_max factor).
struct QoIGrid {
  std::vector<std::pair<double, double>> points;
  std::vector<double> weights;
};
QoIGrid qoi_grid(const QoIConfig& cfg);

// Local integrand. Throws NonFiniteIntegrand on NaN or infinite values.
double qoi_integral(const std::function<double(double ky, double theta)>& f, const QoIConfig& cfg);

// Integrand served at `model_url` (directly or through the balancer), with
// up to cfg.queue_depth evaluations in flight. The model must return one
// scalar. Throws UpstreamFailure when any evaluation fails.
double qoi_integral(const std::string& model_url, const QoIConfig& cfg);

}  // namespace uqlb::clients
