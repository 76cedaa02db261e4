#pragma once

#include "logcap/measures.hpp"

namespace logcap {

/// Independent check of mutual energies by nested adaptive quadrature of
/// -log|x - y|. Requires piece lengths >= 1e-6. Throws OracleFailure when the
/// error estimate exceeds the 1e-8 absolute target.
double quadrature_oracle(const StepMeasure& mu, const StepMeasure& nu);

/// Same for the normalized uniform measures on [a0, a1] and [b0, b1].
double quadrature_oracle_pair(double a0, double a1, double b0, double b1);

/// Mass of a density on [a, b] by the same quadrature.
double quadrature_mass(double (*density)(double), double a, double b);

}  // namespace logcap
