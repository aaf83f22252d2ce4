#pragma once

// Protocol adapters for the benchmark models and the bootstrap that serves
// one of them on a free port and announces it through a registration file.

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "uqlb/models/eigen.hpp"
#include "uqlb/models/gp.hpp"
#include "uqlb/models/synthetic.hpp"
#include "uqlb/protocol.hpp"

namespace uqlb::models {

inline constexpr const char* kDefaultModelName = "modelname";

// Input: one scalar that is mixed into the matrix seed (pass the same value
// to get the same matrix). Output: the n eigenvalues, plus the n*n
// column-major eigenvectors when config {"eigenvectors": true}.
class EigenModel : public protocol::Model {
 public:
  EigenModel(std::string name, std::size_t n, std::uint64_t seed, double tolerance = 1e-10);

  protocol::Sizes input_sizes(const protocol::Config&) const override { return {1}; }
  protocol::Sizes output_sizes(const protocol::Config& config) const override;
  protocol::Vectors evaluate(const protocol::Vectors& inputs, const protocol::Config& config) override;

 private:
  std::size_t n_;
  std::uint64_t seed_;
  double tolerance_;
};

// Output: [posterior means (m)], [posterior variances (m)].
class GpServerModel : public protocol::Model {
 public:
  GpServerModel(std::string name, GpSurrogate surrogate);

  protocol::Sizes input_sizes(const protocol::Config&) const override;
  protocol::Sizes output_sizes(const protocol::Config&) const override;
  protocol::Vectors evaluate(const protocol::Vectors& inputs, const protocol::Config& config) override;

  const GpSurrogate& surrogate() const noexcept { return surrogate_; }

 private:
  GpSurrogate surrogate_;
};

// Output: [elapsed seconds].
class SyntheticModel : public protocol::Model {
 public:
  SyntheticModel(std::string name, SyntheticTask task, std::size_t input_dim = 1);

  protocol::Sizes input_sizes(const protocol::Config&) const override { return {input_dim_}; }
  protocol::Sizes output_sizes(const protocol::Config&) const override { return {1}; }
  protocol::Vectors evaluate(const protocol::Vectors& inputs, const protocol::Config& config) override;

 private:
  SyntheticTask task_;
  std::size_t input_dim_;
};

class IdentityModel : public protocol::Model {
 public:
  IdentityModel(std::string name, std::size_t dim) : Model(std::move(name)), dim_(dim) {}

  protocol::Sizes input_sizes(const protocol::Config&) const override { return {dim_}; }
  protocol::Sizes output_sizes(const protocol::Config&) const override { return {dim_}; }
  protocol::Vectors evaluate(const protocol::Vectors& inputs, const protocol::Config&) override { return inputs; }

 private:
  std::size_t dim_;
};

class FunctionModel : public protocol::Model {
 public:
  using Fn = std::function<protocol::Vectors(const protocol::Vectors&, const protocol::Config&)>;

  FunctionModel(std::string name, protocol::Sizes in, protocol::Sizes out, Fn fn)
      : Model(std::move(name)), in_(std::move(in)), out_(std::move(out)), fn_(std::move(fn)) {}

  protocol::Sizes input_sizes(const protocol::Config&) const override { return in_; }
  protocol::Sizes output_sizes(const protocol::Config&) const override { return out_; }
  protocol::Vectors evaluate(const protocol::Vectors& inputs, const protocol::Config& config) override {
    return fn_(inputs, config);
  }

 private:
  protocol::Sizes in_;
  protocol::Sizes out_;
  Fn fn_;
};

enum class ModelKind { Eigen, Gp, Synthetic, Identity };

ModelKind parse_model_kind(const std::string& text);
std::string to_string(ModelKind kind);

struct BenchmarkModelSpec {
  ModelKind kind = ModelKind::Eigen;
  std::string name = kDefaultModelName;
  std::uint64_t seed = 0;

  // eigen
  std::size_t n = 100;
  double tolerance = 1e-10;

  // gp: training CSV, or synthetic LHS draws over the GS2 box when absent.
  std::optional<std::filesystem::path> train_data;
  std::size_t train_n = 64;
  std::size_t outputs = 2;
  double signal_variance = 1.0;
  // Empty: half of each box width (or 1.0 for CSV inputs).
  std::vector<double> lengthscales;
  double noise_sd = 1e-3;

  // synthetic / identity
  Distribution duration = ConstantDist{0.0};
  std::size_t input_dim = 1;
  bool busy_wait = false;
};

std::shared_ptr<protocol::Model> make_benchmark_model(const BenchmarkModelSpec& spec);

// Writes "<host>:<port>\n" to a temp file in the same directory, fsyncs it,
// renames it over `path` and fsyncs the directory. Throws IoError.
void write_registration_file(const std::filesystem::path& path, const std::string& address);

// The address, once the file exists and holds a complete newline-terminated
// line; nullopt before that.
std::optional<std::string> read_registration_file(const std::filesystem::path& path);

// Splits "host:port"; throws InvalidArgument on malformed input.
std::pair<std::string, int> parse_address(const std::string& address);

// Serves `model` on a kernel-chosen port and publishes the address. Returns
// only after the registration file is durable.
std::unique_ptr<protocol::ModelServer> serve_benchmark(std::shared_ptr<protocol::Model> model,
                                                       const std::filesystem::path& registration_file,
                                                       protocol::ServerOptions options = {});

}  // namespace uqlb::models
