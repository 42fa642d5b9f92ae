#pragma once

#include <cstddef>
#include <vector>

#include "pla/kernel.hpp"
#include "pla/matrix.hpp"

namespace pla {

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // descending
  Matrix eigenvectors;              // row k = unit eigenvector for eigenvalue k
};

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Converged when the
// off-diagonal Frobenius norm falls below tol * ||A||_F; throws
// Error("ConvergenceFailure") after `max_sweeps` sweeps. Eigenvector signs
// are fixed so each vector's largest-magnitude component is positive.
EigenDecomposition jacobi_eigensolve(const Matrix& sym, std::size_t max_sweeps = 100,
                                     double tol = 1e-10);

// Token coordinates from the kernel spectrum: row i holds
// (sqrt(l_1) v_{1,i}, ..., sqrt(l_D) v_{D,i}) with negative eigenvalues
// clipped to zero before the square root.
struct EmbeddingTable {
  Matrix vectors;                   // V_d x D
  std::vector<double> eigenvalues;  // retained top D, clipped, descending
  std::size_t dimension = 0;
  double total_positive_energy = 0.0;  // sum of all clipped eigenvalues

  double retained_energy() const {
    double s = 0.0;
    for (double v : eigenvalues) s += v;
    return s;
  }
};

EmbeddingTable spectral_embed(const KernelMatrix& kernel, std::size_t dimension);

}  // namespace pla
