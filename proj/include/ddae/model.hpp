#pragma once

#include "ddae/types.hpp"

namespace ddae {

// Checks dimensions and delays, computes the nullspace bases of E from its
// full SVD (rank threshold tol_rank * sigma_max(E)) and verifies that
// U^T A0 V is nonsingular. Throws DimensionMismatch, NonpositiveDelay or
// AssumptionOneViolated.
NullspaceBases validate(const DdaeSystem& sys, double tol_rank = 1e-10);

// Block decomposition of the system under the bases produced by validate.
PartitionedSystem partition(const DdaeSystem& sys, const NullspaceBases& bases);

// T(lambda) = C (lambda E - A0 - sum A_i e^{-lambda tau_i})^{-1} B.
// Throws SingularAtLambda when the characteristic matrix is singular to
// working precision (reciprocal condition below 1e-14).
CMat transfer(const DdaeSystem& sys, Complex lambda);

// Same value computed through the 2x2 block form of the partitioned system;
// serves as an algebraic cross-check of transfer().
CMat transfer_partitioned(const PartitionedSystem& part, Complex lambda,
                          const std::vector<double>& delays);

// Largest k singular values of T(j w) along a sorted frequency grid.
// Grid points where T is singular are skipped and flagged.
SigmaCurve sigma_sweep(const DdaeSystem& sys, const std::vector<double>& grid, int k = 1);

// sigma_1(T(j w)); returns -1 when T is singular at j w.
double sigma1(const DdaeSystem& sys, double omega);

}  // namespace ddae
