#pragma once

#include <cstdint>

#include "uqlb/linalg.hpp"

namespace uqlb::models {

struct EigenTask {
  std::size_t n = 100;
  std::uint64_t seed = 0;
  // Per-pair bound on |A v - lambda v|_2 relative to |A|_F.
  double tolerance = 1e-10;
};

struct EigenDecomposition {
  std::vector<double> values;  // descending
  Matrix vectors;              // column j pairs with values[j]
  int sweeps = 0;
};

// A' = (A + A^T) / 2 with A_ij ~ U(-1, 1) drawn from the seed.
Matrix random_symmetric_matrix(std::size_t n, std::uint64_t seed);

// Cyclic Jacobi rotations on a symmetric matrix. Throws NoConvergence if the
// off-diagonal mass is still above tolerance * |A|_F after max_sweeps.
EigenDecomposition jacobi_eigen(const Matrix& symmetric, double tolerance = 1e-10, int max_sweeps = 100);

EigenDecomposition eigen_solve(const EigenTask& task);

// max_j |A v_j - lambda_j v_j|_2
double max_residual(const Matrix& a, const EigenDecomposition& eig);

}  // namespace uqlb::models
