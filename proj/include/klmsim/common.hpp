#pragma once

#include <complex>
#include <cstddef>

namespace klmsim {

using Complex = std::complex<double>;

// Numerical thresholds shared across the library. Tests assert against the
// same constants, so changing one here changes the contract everywhere.
inline constexpr double kUnitarityTol = 1e-12;     // max-entry norm of U U^dag - I
inline constexpr double kNormTol = 1e-10;          // allowed state-norm drift
inline constexpr double kAmplitudeEps = 1e-14;     // sparse amplitude pruning
inline constexpr double kBranchEps = 1e-14;        // zero-probability branch drop
inline constexpr double kSymmetryTol = 1e-10;      // alive-subspace transposition defect
inline constexpr double kBosonicSectorTol = 1e-8;  // max defect accepted by fq_to_fock
inline constexpr double kEquivalenceTol = 1e-9;    // suite distance thresholds

// Exact for n <= 170 in double precision; throws for negative n.
double factorial(int n);

double binomial(int n, int k);

}  // namespace klmsim
