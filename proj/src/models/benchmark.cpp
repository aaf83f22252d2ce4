#include "uqlb/models/benchmark.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "uqlb/text.hpp"

namespace uqlb::models {

using protocol::Config;
using protocol::Sizes;
using protocol::Vectors;

EigenModel::EigenModel(std::string name, std::size_t n, std::uint64_t seed, double tolerance)
    : Model(std::move(name)), n_(n), seed_(seed), tolerance_(tolerance) {
  if (n_ == 0) throw Error(ErrorCode::InvalidArgument, "eigen model needs n >= 1");
}

namespace {

bool wants_eigenvectors(const Config& config) {
  return config.is_object() && config.contains("eigenvectors") && config["eigenvectors"].is_boolean() &&
         config["eigenvectors"].get<bool>();
}

}  // namespace

Sizes EigenModel::output_sizes(const Config& config) const {
  if (wants_eigenvectors(config)) return {n_, n_ * n_};
  return {n_};
}

Vectors EigenModel::evaluate(const Vectors& inputs, const Config& config) {
  const auto key = static_cast<std::uint64_t>(std::llround(inputs.at(0).at(0)));
  const auto eig = eigen_solve({n_, mix_seed(seed_, key), tolerance_});
  Vectors out{eig.values};
  if (wants_eigenvectors(config)) {
    protocol::Vector vecs;
    vecs.reserve(n_ * n_);
    for (std::size_t j = 0; j < n_; ++j)
      for (std::size_t k = 0; k < n_; ++k) vecs.push_back(eig.vectors(k, j));
    out.push_back(std::move(vecs));
  }
  return out;
}

GpServerModel::GpServerModel(std::string name, GpSurrogate surrogate)
    : Model(std::move(name)), surrogate_(std::move(surrogate)) {}

Sizes GpServerModel::input_sizes(const Config&) const { return {surrogate_.input_dimension()}; }

Sizes GpServerModel::output_sizes(const Config&) const {
  return {surrogate_.output_dimension(), surrogate_.output_dimension()};
}

Vectors GpServerModel::evaluate(const Vectors& inputs, const Config&) {
  const auto preds = surrogate_.predict(inputs.at(0));
  protocol::Vector means;
  protocol::Vector variances;
  for (const auto& p : preds) {
    means.push_back(p.mean);
    variances.push_back(p.variance);
  }
  return {means, variances};
}

SyntheticModel::SyntheticModel(std::string name, SyntheticTask task, std::size_t input_dim)
    : Model(std::move(name)), task_(std::move(task)), input_dim_(input_dim) {
  if (input_dim_ == 0) throw Error(ErrorCode::InvalidArgument, "synthetic model needs input_dim >= 1");
}

Vectors SyntheticModel::evaluate(const Vectors& inputs, const Config&) {
  return {{synthetic_evaluate(task_, inputs.at(0))}};
}

ModelKind parse_model_kind(const std::string& text) {
  if (text == "eigen") return ModelKind::Eigen;
  if (text == "gp") return ModelKind::Gp;
  if (text == "synthetic") return ModelKind::Synthetic;
  if (text == "identity") return ModelKind::Identity;
  throw Error(ErrorCode::InvalidArgument, "unknown model kind '" + text + "' (eigen|gp|synthetic|identity)");
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Eigen:
      return "eigen";
    case ModelKind::Gp:
      return "gp";
    case ModelKind::Synthetic:
      return "synthetic";
    case ModelKind::Identity:
      return "identity";
  }
  return "unknown";
}

std::shared_ptr<protocol::Model> make_benchmark_model(const BenchmarkModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::Eigen:
      return std::make_shared<EigenModel>(spec.name, spec.n, spec.seed, spec.tolerance);
    case ModelKind::Synthetic:
      return std::make_shared<SyntheticModel>(spec.name, SyntheticTask{spec.duration, spec.seed, spec.busy_wait},
                                              spec.input_dim);
    case ModelKind::Identity:
      return std::make_shared<IdentityModel>(spec.name, spec.input_dim);
    case ModelKind::Gp: {
      TrainingData data;
      std::vector<double> lengthscales = spec.lengthscales;
      if (spec.train_data) {
        data = read_training_csv(*spec.train_data, spec.outputs);
        if (lengthscales.empty()) lengthscales.assign(data.inputs.cols(), 1.0);
      } else {
        const auto box = gs2_parameter_box();
        data = synthetic_training_data(box, spec.train_n, spec.outputs, spec.seed);
        if (lengthscales.empty()) {
          for (const auto& d : box.dims) lengthscales.push_back(0.5 * (d.max - d.min));
        }
      }
      if (lengthscales.size() == 1 && data.inputs.cols() > 1) lengthscales.assign(data.inputs.cols(), lengthscales[0]);
      auto surrogate = GpSurrogate::fit(data.inputs, data.outputs,
                                        SquaredExponentialKernel{spec.signal_variance, lengthscales}, spec.noise_sd);
      return std::make_shared<GpServerModel>(spec.name, std::move(surrogate));
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown model kind");
}

namespace {

[[noreturn]] void throw_io(const std::string& what) {
  throw Error(ErrorCode::IoError, what + ": " + std::strerror(errno));
}

class Fd {
 public:
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  int get() const noexcept { return fd_; }
  int release() noexcept { return std::exchange(fd_, -1); }

 private:
  int fd_;
};

}  // namespace

void write_registration_file(const std::filesystem::path& path, const std::string& address) {
  const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  const auto tmp = dir / ("." + path.filename().string() + ".tmp." + std::to_string(::getpid()));
  const std::string line = address + "\n";
  {
    Fd fd(::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644));
    if (fd.get() < 0) throw_io("cannot create " + tmp.string());
    std::size_t written = 0;
    while (written < line.size()) {
      const auto n = ::write(fd.get(), line.data() + written, line.size() - written);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw_io("write " + tmp.string());
      }
      written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd.get()) != 0) throw_io("fsync " + tmp.string());
    if (::close(fd.release()) != 0) throw_io("close " + tmp.string());
  }
  if (::rename(tmp.c_str(), path.c_str()) != 0) {
    const int saved = errno;
    ::unlink(tmp.c_str());
    errno = saved;
    throw_io("rename to " + path.string());
  }
  Fd dfd(::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC));
  if (dfd.get() >= 0) ::fsync(dfd.get());
}

std::optional<std::string> read_registration_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();
  const auto nl = content.find('\n');
  if (nl == std::string::npos) return std::nullopt;
  std::string address(trim(std::string_view(content).substr(0, nl)));
  if (address.empty()) return std::nullopt;
  return address;
}

std::pair<std::string, int> parse_address(const std::string& address) {
  std::string_view view = trim(address);
  if (view.starts_with("http://")) view.remove_prefix(7);
  const auto colon = view.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw Error(ErrorCode::InvalidArgument, "address must be host:port, got '" + address + "'");
  }
  const auto port = parse_int(view.substr(colon + 1));
  if (port <= 0 || port > 65535) throw Error(ErrorCode::InvalidArgument, "port out of range in '" + address + "'");
  return {std::string(view.substr(0, colon)), static_cast<int>(port)};
}

std::unique_ptr<protocol::ModelServer> serve_benchmark(std::shared_ptr<protocol::Model> model,
                                                       const std::filesystem::path& registration_file,
                                                       protocol::ServerOptions options) {
  // Fail on an unwritable destination before binding anything.
  const auto dir = registration_file.has_parent_path() ? registration_file.parent_path() : std::filesystem::path(".");
  if (::access(dir.c_str(), W_OK) != 0) throw_io("registration directory " + dir.string() + " is not writable");

  options.port = 0;
  auto server = protocol::serve_models({std::move(model)}, std::move(options));
  write_registration_file(registration_file, server->address());
  return server;
}

}  // namespace uqlb::models
