#include "uqlb/models/gp.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "uqlb/clients/lhs.hpp"
#include "uqlb/error.hpp"
#include "uqlb/text.hpp"

namespace uqlb::models {

double SquaredExponentialKernel::operator()(std::span<const double> a, std::span<const double> b) const {
  double r2 = 0.0;
  for (std::size_t q = 0; q < lengthscales.size(); ++q) {
    const double d = (a[q] - b[q]) / lengthscales[q];
    r2 += d * d;
  }
  return signal_variance * std::exp(-0.5 * r2);
}

Matrix covariance_matrix(const Matrix& inputs, const SquaredExponentialKernel& kernel, double noise_sd) {
  const std::size_t n = inputs.rows();
  Matrix k(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = kernel(inputs.row(i), inputs.row(j));
      k(i, j) = v;
      k(j, i) = v;
    }
    k(i, i) += noise_sd * noise_sd;
  }
  return k;
}

GpModel GpModel::fit(Matrix inputs, std::vector<double> targets, SquaredExponentialKernel kernel,
                     double noise_sd) {
  if (kernel.lengthscales.empty()) throw Error(ErrorCode::DimensionMismatch, "kernel has no lengthscales");
  if (!(kernel.signal_variance > 0.0)) throw Error(ErrorCode::InvalidArgument, "signal variance must be > 0");
  for (double l : kernel.lengthscales) {
    if (!(l > 0.0)) throw Error(ErrorCode::InvalidArgument, "lengthscales must be > 0");
  }
  if (!(noise_sd >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise sd must be >= 0");
  if (inputs.rows() != targets.size()) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(inputs.rows()) + " inputs but " +
                                                  std::to_string(targets.size()) + " targets");
  }
  if (inputs.rows() > 0 && inputs.cols() != kernel.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "inputs have " + std::to_string(inputs.cols()) +
                                                  " columns, kernel has " +
                                                  std::to_string(kernel.dimension()) + " lengthscales");
  }

  GpModel gp;
  gp.factor_ = cholesky(covariance_matrix(inputs, kernel, noise_sd));
  gp.alpha_ = solve_lower_transposed(gp.factor_, solve_lower(gp.factor_, targets));
  gp.inputs_ = std::move(inputs);
  gp.targets_ = std::move(targets);
  gp.kernel_ = std::move(kernel);
  gp.noise_sd_ = noise_sd;
  return gp;
}

GpPrediction GpModel::predict(std::span<const double> x) const {
  if (x.size() != dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "query has " + std::to_string(x.size()) +
                                                  " coordinates, model has " + std::to_string(dimension()));
  }
  const std::size_t n = training_size();
  std::vector<double> k_star(n);
  for (std::size_t i = 0; i < n; ++i) k_star[i] = kernel_(inputs_.row(i), x);

  const double prior = kernel_.signal_variance;
  const double mean = dot(k_star, alpha_);
  // k*^T (K + sn^2 I)^-1 k* = |L^-1 k*|^2
  const auto v = solve_lower(factor_, k_star);
  double variance = prior - dot(v, v);
  if (variance < 0.0) {
    if (variance < -kVarianceSlack) {
      throw Error(ErrorCode::NumericalBreakdown, "posterior variance " + std::to_string(variance));
    }
    variance = 0.0;
  }
  return {mean, variance};
}

GpSurrogate GpSurrogate::fit(const Matrix& inputs, const Matrix& outputs, SquaredExponentialKernel kernel,
                             double noise_sd) {
  if (outputs.rows() != inputs.rows()) throw Error(ErrorCode::DimensionMismatch, "inputs/outputs row count");
  if (outputs.cols() == 0) throw Error(ErrorCode::DimensionMismatch, "no output columns");
  GpSurrogate s;
  for (std::size_t c = 0; c < outputs.cols(); ++c) {
    std::vector<double> y(outputs.rows());
    for (std::size_t r = 0; r < outputs.rows(); ++r) y[r] = outputs(r, c);
    s.outputs_.push_back(GpModel::fit(inputs, std::move(y), kernel, noise_sd));
  }
  return s;
}

std::size_t GpSurrogate::input_dimension() const noexcept {
  return outputs_.empty() ? 0 : outputs_.front().dimension();
}

std::vector<GpPrediction> GpSurrogate::predict(std::span<const double> x) const {
  std::vector<GpPrediction> out;
  out.reserve(outputs_.size());
  for (const auto& gp : outputs_) out.push_back(gp.predict(x));
  return out;
}

TrainingData read_training_csv(const std::filesystem::path& path, std::size_t output_columns) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::IoError, path.string() + " is empty");
  std::vector<std::string> header;
  for (auto cell : split(line, ',')) header.emplace_back(trim(cell));
  if (output_columns == 0 || header.size() <= output_columns) {
    throw Error(ErrorCode::DimensionMismatch, path.string() + ": need at least one input column and " +
                                                  std::to_string(output_columns) + " output columns");
  }
  const std::size_t d = header.size() - output_columns;
  TrainingData data;
  data.input_names.assign(header.begin(), header.begin() + static_cast<std::ptrdiff_t>(d));
  data.output_names.assign(header.begin() + static_cast<std::ptrdiff_t>(d), header.end());

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::DimensionMismatch, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                                    std::to_string(header.size()) + " columns");
    }
    std::vector<double> row;
    for (auto c : cells) row.push_back(parse_double(c));
    rows.push_back(std::move(row));
  }
  data.inputs = Matrix(rows.size(), d);
  data.outputs = Matrix(rows.size(), output_columns);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < d; ++c) data.inputs(r, c) = rows[r][c];
    for (std::size_t c = 0; c < output_columns; ++c) data.outputs(r, c) = rows[r][d + c];
  }
  return data;
}

void write_training_csv(const std::filesystem::path& path, const TrainingData& data) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  std::string sep;
  for (const auto& n : data.input_names) out << std::exchange(sep, ",") << n;
  for (const auto& n : data.output_names) out << std::exchange(sep, ",") << n;
  out << '\n';
  for (std::size_t r = 0; r < data.inputs.rows(); ++r) {
    sep.clear();
    for (double v : data.inputs.row(r)) out << std::exchange(sep, ",") << format_double(v);
    for (double v : data.outputs.row(r)) out << std::exchange(sep, ",") << format_double(v);
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

std::vector<double> reference_function(const ParameterBox& box, std::span<const double> x,
                                       std::size_t outputs) {
  std::vector<double> y(outputs, 0.0);
  for (std::size_t o = 0; o < outputs; ++o) {
    for (std::size_t q = 0; q < box.size(); ++q) {
      const auto& r = box.dims[q];
      const double u = (x[q] - r.min) / (r.max - r.min);
      y[o] += std::sin(3.0 * u + 0.7 * static_cast<double>(q) + 1.3 * static_cast<double>(o));
    }
  }
  return y;
}

TrainingData synthetic_training_data(const ParameterBox& box, std::size_t n, std::size_t outputs,
                                     std::uint64_t seed) {
  const auto points = clients::lhs_sample(box, n, seed);
  TrainingData data;
  for (const auto& d : box.dims) data.input_names.push_back(d.name);
  for (std::size_t o = 0; o < outputs; ++o) data.output_names.push_back("y" + std::to_string(o));
  data.inputs = Matrix(n, box.size());
  data.outputs = Matrix(n, outputs);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t q = 0; q < box.size(); ++q) data.inputs(i, q) = points[i][q];
    const auto y = reference_function(box, points[i], outputs);
    for (std::size_t o = 0; o < outputs; ++o) data.outputs(i, o) = y[o];
  }
  return data;
}

}  // namespace uqlb::models
