#pragma once

#include <cstddef>
#include <vector>

namespace lexann {

/// Row-major dense matrix of doubles; just enough for desk-scale PCA.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  const double* row(std::size_t i) const { return a_.data() + i * cols_; }
  double* row(std::size_t i) { return a_.data() + i * cols_; }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::vector<double>& data() noexcept { return a_; }
  const std::vector<double>& data() const noexcept { return a_; }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> a_;
};

struct SymmetricEigen {
  std::vector<double> values;  // descending
  Matrix vectors;              // row i = unit eigenvector for values[i]
};

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Deterministic; eigenvectors follow the sign convention that each vector's
/// largest-magnitude entry is positive (first such entry on ties).
SymmetricEigen eigen_symmetric(Matrix a);

using Points = std::vector<std::vector<double>>;

Points to_points(const std::vector<std::vector<float>>& x);

std::vector<double> column_mean(const Points& x);

/// Sample covariance (divides by n - 1) of mean-centered rows.
Matrix covariance(const Points& x, const std::vector<double>& mean);

}  // namespace lexann
