#include "tk/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tk/error.hpp"

namespace tk {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double asymmetry(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error(Errc::DimensionMismatch, "matrix is not square");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) worst = std::max(worst, std::abs(a(i, j) - a(j, i)));
  return worst;
}

namespace {

double off_diagonal_norm(const std::vector<double>& a, std::size_t n) {
  double sum = 0.0;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = p + 1; q < n; ++q) sum += a[p * n + q] * a[p * n + q];
  return std::sqrt(2.0 * sum);
}

}  // namespace

SymmetricEigen jacobi_eigen(const Matrix& input, bool want_vectors, double relative_tolerance) {
  const std::size_t n = input.rows();
  if (input.cols() != n) throw Error(Errc::DimensionMismatch, "matrix is not square");
  double scale = 1.0;
  for (double v : input.data()) scale = std::max(scale, std::abs(v));
  if (asymmetry(input) > 1e-12 * scale) throw Error(Errc::NonSymmetric, "matrix is not symmetric");

  std::vector<double> a(input.data().begin(), input.data().end());
  // Rows of vt are the eigenvectors; kept transposed so rotations touch
  // contiguous memory.
  std::vector<double> vt;
  if (want_vectors) {
    vt.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) vt[i * n + i] = 1.0;
  }

  SymmetricEigen result;
  const double initial = off_diagonal_norm(a, n);
  const double target = relative_tolerance * initial;
  constexpr int max_sweeps = 100;

  double off = initial;
  while (off > target && off > 0.0 && result.sweeps < max_sweeps) {
    ++result.sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double app = a[p * n + p];
        const double aqq = a[q * n + q];
        // Skip rotations that can no longer change the diagonal.
        const double g = 100.0 * std::abs(apq);
        if (result.sweeps > 4 && std::abs(app) + g == std::abs(app) && std::abs(aqq) + g == std::abs(aqq)) {
          a[p * n + q] = 0.0;
          a[q * n + p] = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        double* row_p = &a[p * n];
        double* row_q = &a[q * n];
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = row_p[r];
          const double arq = row_q[r];
          const double new_p = arp - s * (arq + tau * arp);
          const double new_q = arq + s * (arp - tau * arq);
          row_p[r] = new_p;
          row_q[r] = new_q;
          a[r * n + p] = new_p;
          a[r * n + q] = new_q;
        }
        row_p[p] = app - t * apq;
        row_q[q] = aqq + t * apq;
        row_p[q] = 0.0;
        row_q[p] = 0.0;

        if (want_vectors) {
          double* vp = &vt[p * n];
          double* vq = &vt[q * n];
          for (std::size_t r = 0; r < n; ++r) {
            const double x = vp[r];
            const double y = vq[r];
            vp[r] = x - s * (y + tau * x);
            vq[r] = y + s * (x - tau * y);
          }
        }
      }
    }
    off = off_diagonal_norm(a, n);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a[x * n + x] < a[y * n + y]; });
  result.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) result.values[k] = a[order[k] * n + order[k]];
  if (want_vectors) {
    result.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t r = 0; r < n; ++r) result.vectors(r, k) = vt[order[k] * n + r];
  }
  return result;
}

CholeskyOutcome pivoted_cholesky(const Matrix& input, double tolerance) {
  const std::size_t n = input.rows();
  if (input.cols() != n) throw Error(Errc::DimensionMismatch, "matrix is not square");
  Matrix s = input;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  CholeskyOutcome out;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t best = k;
    for (std::size_t j = k + 1; j < n; ++j)
      if (s(perm[j], perm[j]) > s(perm[best], perm[best])) best = j;
    std::swap(perm[k], perm[best]);
    const std::size_t pk = perm[k];
    const double pivot = s(pk, pk);
    if (pivot <= tolerance) {
      for (std::size_t i = k; i < n; ++i)
        for (std::size_t j = k; j < n; ++j)
          if (std::abs(s(perm[i], perm[j])) > tolerance) {
            out.rank = k;
            return out;
          }
      out.rank = k;
      out.positive_semidefinite = true;
      return out;
    }
    const double root = std::sqrt(pivot);
    for (std::size_t i = k + 1; i < n; ++i) s(perm[i], pk) /= root;
    for (std::size_t i = k + 1; i < n; ++i) {
      const double li = s(perm[i], pk);
      if (li == 0.0) continue;
      auto row = s.row(perm[i]);
      for (std::size_t j = k + 1; j <= i; ++j) row[perm[j]] -= li * s(perm[j], pk);
    }
    // Keep the trailing block symmetric; only the lower half was updated.
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < i; ++j) s(perm[j], perm[i]) = s(perm[i], perm[j]);
  }
  out.rank = n;
  out.positive_semidefinite = true;
  return out;
}

}  // namespace tk
