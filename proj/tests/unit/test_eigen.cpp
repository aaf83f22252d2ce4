#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "uqlb/models/benchmark.hpp"
#include "uqlb/models/eigen.hpp"

using namespace uqlb;
using namespace uqlb::models;

namespace {

oracle::Dense to_dense(const Matrix& m) {
  oracle::Dense d(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) d[i][j] = m(i, j);
  return d;
}

}  // namespace

TEST(Jacobi, Identity) {
  const auto eig = jacobi_eigen(Matrix::identity(3));
  EXPECT_EQ(eig.values, (std::vector<double>{1.0, 1.0, 1.0}));
  EXPECT_EQ(eig.sweeps, 0);
}

TEST(Jacobi, DiagonalSortedDescending) {
  const auto eig = jacobi_eigen(Matrix{{1.0, 0.0, 0.0}, {0.0, 3.0, 0.0}, {0.0, 0.0, 2.0}});
  EXPECT_EQ(eig.values, (std::vector<double>{3.0, 2.0, 1.0}));
  // Eigenvector for 3 is e_2.
  EXPECT_EQ(std::abs(eig.vectors(1, 0)), 1.0);
}

TEST(Jacobi, TwoByTwoClosedForm) {
  // [[2,1],[1,2]] has eigenvalues 3 and 1.
  const auto eig = jacobi_eigen(Matrix{{2.0, 1.0}, {1.0, 2.0}});
  EXPECT_NEAR(eig.values[0], 3.0, 1e-15);
  EXPECT_NEAR(eig.values[1], 1.0, 1e-15);
}

TEST(Jacobi, TraceOracleSeededTen) {
  const auto a = random_symmetric_matrix(10, 2024);
  const auto eig = jacobi_eigen(a);
  double sum = 0.0;
  for (double v : eig.values) sum += v;
  double trace = 0.0;
  for (std::size_t i = 0; i < 10; ++i) trace += a(i, i);
  EXPECT_LE(std::abs(sum - trace), 1e-8 * std::max(1.0, std::abs(trace)));
  EXPECT_TRUE(std::is_sorted(eig.values.rbegin(), eig.values.rend()));
}

TEST(Jacobi, DeterminantOracleUpToEight) {
  for (std::size_t n = 1; n <= 8; ++n) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto a = random_symmetric_matrix(n, seed);
      const auto eig = jacobi_eigen(a);
      double product = 1.0;
      for (double v : eig.values) product *= v;
      const double det = oracle::cofactor_determinant(to_dense(a));
      EXPECT_LE(std::abs(product - det), 1e-6 * std::max(std::abs(det), 1e-300)) << "n=" << n;
    }
  }
}

TEST(Jacobi, ResidualsAndOrthonormalVectors) {
  const auto a = random_symmetric_matrix(40, 9);
  const auto eig = jacobi_eigen(a, 1e-10);
  EXPECT_LE(max_residual(a, eig), 1e-10 * a.frobenius_norm());
  const auto vtv = eig.vectors.transposed() * eig.vectors;
  for (std::size_t i = 0; i < 40; ++i)
    for (std::size_t j = 0; j < 40; ++j) EXPECT_NEAR(vtv(i, j), i == j ? 1.0 : 0.0, 1e-12);
}

TEST(Jacobi, SymmetricGeneratorAndDeterminism) {
  const auto a = random_symmetric_matrix(6, 77);
  EXPECT_EQ(a, a.transposed());
  EXPECT_EQ(a, random_symmetric_matrix(6, 77));
  EXPECT_NE(a, random_symmetric_matrix(6, 78));
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) EXPECT_LE(std::abs(a(i, j)), 1.0);
}

TEST(Jacobi, NoConvergenceWhenSweepsExhausted) {
  const auto a = random_symmetric_matrix(20, 1);
  try {
    jacobi_eigen(a, 1e-12, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoConvergence);
  }
}

TEST(EigenModel, OutputsEigenvaluesAndOptionalVectors) {
  EigenModel model("modelname", 5, 4);
  EXPECT_EQ(model.output_sizes(protocol::empty_config()), (protocol::Sizes{5}));
  const auto out = model.evaluate({{0.0}}, protocol::empty_config());
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out, model.evaluate({{0.0}}, protocol::empty_config()));
  protocol::Config cfg{{"eigenvectors", true}};
  EXPECT_EQ(model.output_sizes(cfg), (protocol::Sizes{5, 25}));
  const auto with_vectors = model.evaluate({{0.0}}, cfg);
  ASSERT_EQ(with_vectors.size(), 2u);
  EXPECT_EQ(with_vectors[0], out[0]);
  EXPECT_EQ(with_vectors[1].size(), 25u);
}
