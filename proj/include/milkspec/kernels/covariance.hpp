#pragma once

#include "milkspec/core/matrix.hpp"
#include "milkspec/kernels/exec.hpp"

namespace milkspec::kernels {

/// XᵀX / (n − 1) for an already column-centred X. Each output entry is a
/// sequential sum over rows, so both paths agree bit for bit.
Matrix covariance(const Matrix& centered, Exec exec);

}  // namespace milkspec::kernels
