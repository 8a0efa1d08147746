#pragma once

#include <vector>

#include "milkspec/core/matrix.hpp"

namespace milkspec {

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // descending
  Matrix eigenvectors;              // orthonormal columns, paired with eigenvalues
};

struct JacobiOptions {
  double symmetry_tolerance = 1e-10;
  /// Stop once every off-diagonal magnitude is below this times ‖A‖_F.
  double off_diagonal_tolerance = 1e-12;
  int max_sweeps = 100;
};

/// Cyclic Jacobi eigensolver for symmetric matrices. Throws
/// std::invalid_argument for non-square or asymmetric input and
/// DegenerateError when the sweep limit is reached.
EigenDecomposition sym_eigen(const Matrix& a, const JacobiOptions& options = {});

/// Flips each column so that its largest-magnitude entry is positive (the
/// first such entry on ties).
void normalize_column_signs(Matrix& vectors);

}  // namespace milkspec
