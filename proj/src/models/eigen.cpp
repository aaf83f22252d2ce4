#include "uqlb/models/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "uqlb/distribution.hpp"
#include "uqlb/error.hpp"

namespace uqlb::models {

Matrix random_symmetric_matrix(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "matrix dimension must be >= 1");
  Rng rng(seed);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
  return s;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

EigenDecomposition jacobi_eigen(const Matrix& symmetric, double tolerance, int max_sweeps) {
  if (symmetric.rows() != symmetric.cols() || symmetric.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "jacobi_eigen needs a non-empty square matrix");
  }
  const std::size_t n = symmetric.rows();
  Matrix a = symmetric;
  Matrix v = Matrix::identity(n);
  const double scale = std::max(symmetric.frobenius_norm(), std::numeric_limits<double>::min());
  // Converge well past the residual target; residuals track the off-norm.
  const double target = std::max(1e-3 * tolerance, 1e-15) * scale;

  int sweep = 0;
  while (off_diagonal_norm(a) > target) {
    if (sweep == max_sweeps) {
      throw Error(ErrorCode::NoConvergence, "no convergence after " + std::to_string(max_sweeps) + " sweeps");
    }
    ++sweep;
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // An element below the diagonals' last bit cannot move them: drop it.
        const double g = 100.0 * std::abs(apq);
        if (std::abs(app) + g == std::abs(app) && std::abs(aqq) + g == std::abs(aqq)) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        rotated = true;
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  EigenDecomposition out;
  out.sweeps = sweep;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, j) = v(k, order[j]);
  }
  return out;
}

EigenDecomposition eigen_solve(const EigenTask& task) {
  if (task.n == 0) throw Error(ErrorCode::InvalidArgument, "eigen task needs n >= 1");
  return jacobi_eigen(random_symmetric_matrix(task.n, task.seed), task.tolerance);
}

double max_residual(const Matrix& a, const EigenDecomposition& eig) {
  const std::size_t n = a.rows();
  double worst = 0.0;
  std::vector<double> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) col[k] = eig.vectors(k, j);
    auto av = a * std::span<const double>(col);
    for (std::size_t k = 0; k < n; ++k) av[k] -= eig.values[j] * col[k];
    worst = std::max(worst, norm2(av));
  }
  return worst;
}

}  // namespace uqlb::models
