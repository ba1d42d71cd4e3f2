#pragma once

#include <Eigen/Dense>

#include "klmsim/common.hpp"

namespace klmsim {

using ComplexMatrix = Eigen::MatrixXcd;

/// Permanent by direct summation over all n! permutations.
/// Reference implementation; guarded to n <= 9.
Complex permanent_naive(const ComplexMatrix& m);

/// Permanent via Ryser's inclusion-exclusion formula with Gray-code subset
/// iteration, O(2^n * n). Guarded to n <= 24.
Complex permanent_ryser(const ComplexMatrix& m);

}  // namespace klmsim
