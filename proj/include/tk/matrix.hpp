#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tk {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Largest |a(i,j) - a(j,i)| over the matrix; requires a square matrix.
double asymmetry(const Matrix& a);

/// Eigen-decomposition of a symmetric matrix. `values` ascending; column k
/// of `vectors` is the unit eigenvector of values[k] (empty when vectors
/// were not requested).
struct SymmetricEigen {
  std::vector<double> values;
  Matrix vectors;
  int sweeps = 0;
};

/// Cyclic Jacobi rotations on a dense symmetric matrix. Sweeps continue
/// until the off-diagonal Frobenius norm drops below `relative_tolerance`
/// times its initial value. Throws NonSymmetric when the input is not
/// symmetric to 1e-12 (scaled by the largest entry when that exceeds one).
SymmetricEigen jacobi_eigen(const Matrix& a, bool want_vectors, double relative_tolerance = 1e-10);

struct CholeskyOutcome {
  bool positive_semidefinite = false;
  std::size_t rank = 0;
};

/// Rank-revealing Cholesky with diagonal pivoting. Stops once the largest
/// remaining pivot is <= tolerance; the matrix is reported PSD when the
/// untouched Schur complement is then bounded by the tolerance entry-wise.
CholeskyOutcome pivoted_cholesky(const Matrix& a, double tolerance);

}  // namespace tk
