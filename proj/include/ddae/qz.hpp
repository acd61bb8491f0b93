#pragma once

#include "ddae/types.hpp"

namespace ddae {

// Finite generalized eigenvalues of the pencil lambda Q - P via the LAPACK QZ
// driver. Near-infinite eigenvalues (|beta| ~ 0) are dropped. Matrices are
// taken by value; the factorization overwrites them.
std::vector<Complex> generalized_eigenvalues(Mat P, Mat Q);

}  // namespace ddae
