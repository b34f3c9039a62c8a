#include "lexann/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lexann {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

namespace {

double off_diagonal_sq(const Matrix& a) {
  double s = 0.0;
  for (std::size_t p = 0; p + 1 < a.rows(); ++p) {
    for (std::size_t q = p + 1; q < a.cols(); ++q) {
      s += a(p, q) * a(p, q);
    }
  }
  return s;
}

void fix_sign(double* v, std::size_t n) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  }
  if (v[best] < 0.0) {
    for (std::size_t i = 0; i < n; ++i) v[i] = -v[i];
  }
}

}  // namespace

SymmetricEigen eigen_symmetric(Matrix a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("eigen_symmetric requires a square matrix");
  }
  const std::size_t n = a.rows();
  Matrix v = Matrix::identity(n);

  if (n > 0) {
    double frob_sq = 0.0;
    for (double x : a.data()) frob_sq += x * x;
    const double stop = std::max(frob_sq, 1e-300) * 1e-28;

    constexpr int kMaxSweeps = 64;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
      if (off_diagonal_sq(a) <= stop) break;
      for (std::size_t p = 0; p + 1 < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
          const double apq = a(p, q);
          if (apq == 0.0) continue;
          const double app = a(p, p);
          const double aqq = a(q, q);
          // Classic Jacobi rotation annihilating a(p, q).
          const double theta = (aqq - app) / (2.0 * apq);
          const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
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
          for (std::size_t k = 0; k < n; ++k) {
            const double vkp = v(k, p);
            const double vkq = v(k, q);
            v(k, p) = c * vkp - s * vkq;
            v(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&a](std::size_t i, std::size_t j) {
    return a(i, i) > a(j, j);
  });

  SymmetricEigen out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t src = order[i];
    out.values[i] = a(src, src);
    for (std::size_t k = 0; k < n; ++k) {
      out.vectors(i, k) = v(k, src);  // column src of v is the eigenvector
    }
    fix_sign(out.vectors.row(i), n);
  }
  return out;
}

Points to_points(const std::vector<std::vector<float>>& x) {
  Points out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i].assign(x[i].begin(), x[i].end());
  }
  return out;
}

std::vector<double> column_mean(const Points& x) {
  if (x.empty()) {
    throw std::invalid_argument("column_mean of an empty point set");
  }
  const std::size_t dim = x[0].size();
  std::vector<double> mean(dim, 0.0);
  for (const auto& row : x) {
    if (row.size() != dim) {
      throw std::invalid_argument("point set rows differ in dimension");
    }
    for (std::size_t j = 0; j < dim; ++j) mean[j] += row[j];
  }
  const double inv = 1.0 / static_cast<double>(x.size());
  for (double& m : mean) m *= inv;
  return mean;
}

Matrix covariance(const Points& x, const std::vector<double>& mean) {
  const std::size_t n = x.size();
  const std::size_t dim = mean.size();
  if (n < 2) {
    throw std::invalid_argument("covariance needs at least 2 points");
  }
  Matrix cov(dim, dim);
  std::vector<double> d(dim);
  for (const auto& row : x) {
    for (std::size_t j = 0; j < dim; ++j) d[j] = row[j] - mean[j];
    for (std::size_t j = 0; j < dim; ++j) {
      const double dj = d[j];
      if (dj == 0.0) continue;
      double* out = cov.row(j);
      for (std::size_t k = j; k < dim; ++k) {
        out[k] += dj * d[k];
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(n - 1);
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t k = j; k < dim; ++k) {
      const double c = cov(j, k) * inv;
      cov(j, k) = c;
      cov(k, j) = c;
    }
  }
  return cov;
}

}  // namespace lexann
