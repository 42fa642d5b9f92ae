#include "pla/embed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pla/error.hpp"

namespace pla {

namespace {

double offdiag_frobenius(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = i + 1; j < a.cols; ++j) s += a(i, j) * a(i, j);
  return std::sqrt(2.0 * s);
}

}  // namespace

EigenDecomposition jacobi_eigensolve(const Matrix& sym, std::size_t max_sweeps,
                                     double tol) {
  if (sym.rows != sym.cols)
    raise("ShapeMismatch", "eigensolver needs a square matrix");
  const std::size_t n = sym.rows;

  Matrix a = sym;
  Matrix v(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  const double scale = frobenius_norm(a);
  const double threshold = tol * std::max(scale, 1e-300);

  bool converged = offdiag_frobenius(a) <= threshold;
  for (std::size_t sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    converged = offdiag_frobenius(a) <= threshold;
  }
  if (!converged)
    raise("ConvergenceFailure",
          "Jacobi eigensolver did not converge within sweep budget");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&a](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

  EigenDecomposition dec;
  dec.eigenvalues.resize(n);
  dec.eigenvectors = Matrix(n, n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t col = order[k];
    dec.eigenvalues[k] = a(col, col);
    // sign convention: largest-magnitude component positive (first on ties)
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double mag = std::abs(v(i, col));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    const double flip = v(arg, col) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) dec.eigenvectors(k, i) = flip * v(i, col);
  }
  return dec;
}

EmbeddingTable spectral_embed(const KernelMatrix& kernel, std::size_t dimension) {
  const std::size_t n = kernel.values.rows;
  if (dimension == 0 || dimension > n)
    raise("InvalidConfig", "embedding dimension must lie in [1, V_d]");

  const EigenDecomposition dec = jacobi_eigensolve(kernel.values);

  EmbeddingTable table;
  table.dimension = dimension;
  table.eigenvalues.resize(dimension);
  table.vectors = Matrix(n, dimension, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double lam = std::max(dec.eigenvalues[k], 0.0);
    table.total_positive_energy += lam;
    if (k < dimension) {
      table.eigenvalues[k] = lam;
      const double root = std::sqrt(lam);
      for (std::size_t i = 0; i < n; ++i)
        table.vectors(i, k) = root * dec.eigenvectors(k, i);
    }
  }
  return table;
}

}  // namespace pla
