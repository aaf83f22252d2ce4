#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace uqlb {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  Matrix transposed() const;
  double frobenius_norm() const;
  double trace() const;

  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

std::vector<double> operator*(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

// Lower-triangular L with L*L^T = a. Throws NotPositiveDefinite when a
// pivot is not strictly positive.
Matrix cholesky(const Matrix& a);

// Solves L*x = b (forward) and L^T*x = b (backward) for lower-triangular L.
std::vector<double> solve_lower(const Matrix& lower, std::span<const double> b);
std::vector<double> solve_lower_transposed(const Matrix& lower, std::span<const double> b);

}  // namespace uqlb
