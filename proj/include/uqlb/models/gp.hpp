#pragma once

// Zero-mean Gaussian-process regression with a squared-exponential kernel.
//
//   k(x, x') = sf2 * exp(-sum_q (x_q - x'_q)^2 / (2 l_q^2))
//   mean(x*) = k(X, x*)^T (K + sn^2 I)^{-1} y
//   var(x*)  = k(x*, x*) - k(X, x*)^T (K + sn^2 I)^{-1} k(X, x*)
//
// The inverse is never formed: fit() stores the Cholesky factor L of
// K + sn^2 I and alpha = L^-T L^-1 y.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "uqlb/linalg.hpp"
#include "uqlb/parameter_box.hpp"

namespace uqlb::models {

struct SquaredExponentialKernel {
  double signal_variance = 1.0;
  std::vector<double> lengthscales;

  double operator()(std::span<const double> a, std::span<const double> b) const;
  std::size_t dimension() const noexcept { return lengthscales.size(); }
};

struct GpPrediction {
  double mean = 0.0;
  double variance = 0.0;
};

class GpModel {
 public:
  // Variance in [-kVarianceSlack, 0) is clamped to 0; anything more negative
  // is a NumericalBreakdown.
  static constexpr double kVarianceSlack = 1e-9;

  // X is N x d (N may be 0), y has N entries. Throws DimensionMismatch or
  // NotPositiveDefinite.
  static GpModel fit(Matrix inputs, std::vector<double> targets, SquaredExponentialKernel kernel,
                     double noise_sd);

  GpPrediction predict(std::span<const double> x) const;

  std::size_t dimension() const noexcept { return kernel_.dimension(); }
  std::size_t training_size() const noexcept { return targets_.size(); }
  const Matrix& inputs() const noexcept { return inputs_; }
  const std::vector<double>& targets() const noexcept { return targets_; }
  const SquaredExponentialKernel& kernel() const noexcept { return kernel_; }
  double noise_sd() const noexcept { return noise_sd_; }
  const Matrix& factor() const noexcept { return factor_; }
  const std::vector<double>& alpha() const noexcept { return alpha_; }

 private:
  Matrix inputs_;
  std::vector<double> targets_;
  SquaredExponentialKernel kernel_;
  double noise_sd_ = 0.0;
  Matrix factor_;
  std::vector<double> alpha_;
};

// Covariance matrix K(X, X) + noise_sd^2 I.
Matrix covariance_matrix(const Matrix& inputs, const SquaredExponentialKernel& kernel, double noise_sd);

// One independent GP per output column, all sharing the same inputs.
class GpSurrogate {
 public:
  static GpSurrogate fit(const Matrix& inputs, const Matrix& outputs, SquaredExponentialKernel kernel,
                         double noise_sd);

  std::size_t input_dimension() const noexcept;
  std::size_t output_dimension() const noexcept { return outputs_.size(); }
  std::vector<GpPrediction> predict(std::span<const double> x) const;
  const GpModel& output(std::size_t i) const { return outputs_.at(i); }

 private:
  std::vector<GpModel> outputs_;
};

struct TrainingData {
  std::vector<std::string> input_names;
  std::vector<std::string> output_names;
  Matrix inputs;   // N x d
  Matrix outputs;  // N x m
};

// CSV with a header row: d input columns followed by `output_columns`
// output columns.
TrainingData read_training_csv(const std::filesystem::path& path, std::size_t output_columns);
void write_training_csv(const std::filesystem::path& path, const TrainingData& data);

// Reference response over a box: each output is a sum of sines of the
// box-normalized coordinates with output-specific phases.
std::vector<double> reference_function(const ParameterBox& box, std::span<const double> x,
                                       std::size_t outputs);

// n LHS points over the box with targets from reference_function.
TrainingData synthetic_training_data(const ParameterBox& box, std::size_t n, std::size_t outputs,
                                     std::uint64_t seed);

}  // namespace uqlb::models
